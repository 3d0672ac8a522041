#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace epigp {

/// Squared-exponential kernel hyperparameters:
/// k(a,b) = signal_variance * exp(-(a-b)^2 / (2 * length_scale^2)).
struct KernelParams {
    double signal_variance; // alpha^2, units of the target squared
    double length_scale;    // beta, days

    void validate() const;
};

/// I.i.d. Gaussian observation noise, covariance sigma^2 * I.
struct NoiseModel {
    double variance; // sigma^2

    void validate() const;
};

/// Training window: strictly increasing times with one target per time.
struct TrainSet {
    std::vector<double> times;
    std::vector<double> targets;

    std::size_t size() const { return times.size(); }
    void validate() const;
};

/// Posterior of the GP at a batch of test times, plus the evidence of the
/// training window it was conditioned on.
struct Posterior {
    std::vector<double> test_times;
    std::vector<double> mean;
    std::vector<double> variance; // clamped to >= 0
    double log_marginal_likelihood;
};

double kernel_eval(const KernelParams& params, double a, double b);

/// Dense kernel matrix K(times, times). Throws data_error on empty input.
Eigen::MatrixXd kernel_matrix(const KernelParams& params, std::span<const double> times);

/// Cholesky factor of K + sigma^2 I with jitter escalation. Starts at
/// 1e-10 * signal_variance and escalates x10 up to 1e-4 * signal_variance
/// before giving up with numeric_error("ill-conditioned kernel matrix").
Eigen::LLT<Eigen::MatrixXd> factorize_system(const KernelParams& params,
                                             const NoiseModel& noise,
                                             std::span<const double> times);

Posterior posterior(const KernelParams& params, const NoiseModel& noise,
                    const TrainSet& train, std::span<const double> test_times);

double log_marginal_likelihood(const KernelParams& params, const NoiseModel& noise,
                               const TrainSet& train);

/// Log-spaced hyperparameter grid. Counts of 1 collapse to the minimum.
struct GridSpec {
    double alpha2_min = 1e-4;
    double alpha2_max = 10.0;
    int alpha2_count = 11;
    double beta_min = 1.0;
    double beta_max = 100.0;
    int beta_count = 13;

    void validate() const;
};

std::vector<KernelParams> make_grid(const GridSpec& spec);

/// Grid point maximizing the log marginal likelihood. Ties break toward the
/// smallest length scale, then the smallest signal variance. Grid points
/// whose system cannot be factorized are skipped; if none survive, throws.
KernelParams select_hyperparameters(const TrainSet& train, const NoiseModel& noise,
                                    std::span<const KernelParams> grid);

} // namespace epigp
