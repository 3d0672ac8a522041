#pragma once

#include <cstdint>
#include <vector>

#include "epigp/gp.hpp"

namespace epigp {

/// Inputs of the high-probability error bound and the variance bound.
struct BoundConfig {
    double tau = 5.0;              // grid radius, days
    double delta = 0.05;           // failure probability, in (0,1)
    double lipschitz_target = 0.01; // Lipschitz constant of the true trend
    double interval_length = 50.0; // length of the time interval of interest
    double radius = 0.0;           // variance-bound ball radius; <= 0 means
                                   // the largest valid one, length_scale * sqrt(e)

    void validate() const;
};

struct LipschitzConstants {
    double kernel = 0.0;   // L_k
    double mean = 0.0;     // L_m
    double variance = 0.0; // L_{sigma^2}
};

/// The error-bound report: the scale factor gamma, the offset xi, their
/// ingredients, and the per-test-point bounds.
struct BoundReport {
    double gamma = 0.0;
    double xi = 0.0;
    long covering_number = 0;
    LipschitzConstants lipschitz;
    double radius = 0.0;
    std::vector<double> per_point_bound; // sqrt(gamma)*sigma(t*) + xi
    std::vector<double> variance_bounds; // variance bound at each test point
};

/// Which algebraic form of the posterior-variance bound to evaluate.
///
/// PriorSquared (default): alpha^2 - alpha^4 / (alpha^2 + sigma^2/m). Exact
/// in the limit of m observations coinciding with the test time; for
/// spread-out observations it can undershoot the true posterior variance.
/// Prior: alpha^2 - alpha^2 / (alpha^2 + sigma^2/m), kept for comparison.
/// Lipschitz: alpha^2 - (alpha^2 - L_k r)^2 / (alpha^2 + sigma^2/m), the
/// relaxation that is a sound upper bound for any r within the validity
/// radius, since k(d) >= alpha^2 - L_k r for all d <= r.
enum class VarianceBoundForm { PriorSquared, Prior, Lipschitz };

/// Posterior-variance bound from the count of training points within
/// distance r of the test time. Requires r <= length_scale * sqrt(e);
/// an empty ball yields the vacuous bound alpha^2.
double variance_bound(const KernelParams& params, const NoiseModel& noise,
                      const TrainSet& train, double t_star, double radius,
                      VarianceBoundForm form = VarianceBoundForm::PriorSquared);

/// Largest radius for which the variance bound is valid: length_scale * e^{1/2}.
double max_variance_bound_radius(const KernelParams& params);

/// Lipschitz constant of the squared-exponential kernel in one argument,
/// alpha^2 / (beta * e^{1/2}).
double lipschitz_kernel(const KernelParams& params);

/// Lipschitz constant of the posterior mean,
/// L_k * sqrt(n) * ||(K + sigma^2 I)^{-1} targets||.
double lipschitz_mean(const KernelParams& params, const NoiseModel& noise,
                      const TrainSet& train);

/// Lipschitz constant of the posterior variance,
/// (2 n alpha^4 / (beta e^{1/2})) * ||(K + sigma^2 I)^{-1}||, with the
/// spectral norm, i.e. 1 / lambda_min of the system matrix.
double lipschitz_variance(const KernelParams& params, const NoiseModel& noise,
                          const TrainSet& train);

/// Minimum number of radius-tau intervals covering an interval of the given
/// length: ceil(length / (2 tau)) + 1.
long covering_number(double interval_length, double tau);

/// gamma_delta(tau) = 2 log(length / (2 tau delta) + 1 / delta). The real-
/// valued covering expression is used here exactly, without the ceiling.
double gamma(double delta, double interval_length, double tau);

/// xi_delta(tau) = (L_target + L_mean) tau + sqrt(gamma L_var tau).
double xi(double tau, double lipschitz_target, double lipschitz_mean,
          double lipschitz_variance, double gamma_value);

/// Full report for a posterior computed from the same (params, noise, train).
BoundReport error_bound(const Posterior& post, const BoundConfig& config,
                        const KernelParams& params, const NoiseModel& noise,
                        const TrainSet& train,
                        VarianceBoundForm form = VarianceBoundForm::PriorSquared);

/// Monte-Carlo check of the error bound: draws the latent trend from the
/// prior GP on a fine grid, trains on a strided subset with added noise, and
/// counts test points whose |latent - posterior mean| exceeds the bound.
/// The target Lipschitz constant is estimated from fine-grid finite
/// differences. Per-trial seeds derive deterministically from base_seed.
struct ValidationConfig {
    int trials = 200;
    double interval_length = 50.0;
    double grid_step = 0.5;
    int train_stride = 4;
    double tau = 1.0;
    double delta = 0.05;
    KernelParams params{1.0, 5.0};
    NoiseModel noise{0.01};
    std::uint64_t base_seed = 12345;
};

struct ValidationResult {
    long total_points = 0;
    long violations = 0;
    double violation_fraction = 0.0;
};

ValidationResult validate_error_bound(const ValidationConfig& config);

} // namespace epigp
