#include "epigp/bounds.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "epigp/errors.hpp"

namespace epigp {

void BoundConfig::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw config_error("failure probability delta must lie in (0,1)");
    }
    if (!(tau > 0.0)) {
        throw config_error("grid radius tau must be positive");
    }
    if (!(interval_length > 0.0)) {
        throw config_error("interval length must be positive");
    }
    if (lipschitz_target < 0.0) {
        throw config_error("target Lipschitz constant must be non-negative");
    }
}

double max_variance_bound_radius(const KernelParams& params) {
    return params.length_scale * std::exp(0.5);
}

double variance_bound(const KernelParams& params, const NoiseModel& noise,
                      const TrainSet& train, double t_star, double radius,
                      VarianceBoundForm form) {
    params.validate();
    noise.validate();
    train.validate();
    if (!(radius > 0.0) || radius > max_variance_bound_radius(params)) {
        throw config_error("radius exceeds Lipschitz validity");
    }
    long in_ball = 0;
    for (double t : train.times) {
        if (std::abs(t - t_star) <= radius) {
            ++in_ball;
        }
    }
    if (in_ball == 0) {
        return params.signal_variance; // vacuous: no data near the test time
    }
    const double a2 = params.signal_variance;
    const double denom = a2 + noise.variance / static_cast<double>(in_ball);
    double numer = 0.0;
    switch (form) {
    case VarianceBoundForm::PriorSquared:
        numer = a2 * a2;
        break;
    case VarianceBoundForm::Prior:
        numer = a2;
        break;
    case VarianceBoundForm::Lipschitz: {
        const double floor = a2 - lipschitz_kernel(params) * radius;
        numer = floor * floor; // floor >= 0 under the radius precondition
        break;
    }
    }
    return a2 - numer / denom;
}

double lipschitz_kernel(const KernelParams& params) {
    params.validate();
    return params.signal_variance / (params.length_scale * std::exp(0.5));
}

double lipschitz_mean(const KernelParams& params, const NoiseModel& noise,
                      const TrainSet& train) {
    train.validate();
    const auto llt = factorize_system(params, noise, train.times);
    const Eigen::Map<const Eigen::VectorXd> y(train.targets.data(),
                                              static_cast<Eigen::Index>(train.targets.size()));
    const Eigen::VectorXd psi = llt.solve(y);
    const double n = static_cast<double>(train.size());
    return lipschitz_kernel(params) * std::sqrt(n) * psi.norm();
}

double lipschitz_variance(const KernelParams& params, const NoiseModel& noise,
                          const TrainSet& train) {
    params.validate();
    noise.validate();
    train.validate();
    Eigen::MatrixXd system = kernel_matrix(params, train.times);
    system.diagonal().array() += noise.variance;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw numeric_error("ill-conditioned kernel matrix");
    }
    const double lambda_min = eig.eigenvalues().minCoeff();
    if (!(lambda_min > 0.0)) {
        throw numeric_error("ill-conditioned kernel matrix");
    }
    const double n = static_cast<double>(train.size());
    const double a2 = params.signal_variance;
    return 2.0 * n * a2 * a2 / (params.length_scale * std::exp(0.5)) / lambda_min;
}

long covering_number(double interval_length, double tau) {
    if (!(interval_length > 0.0) || !(tau > 0.0)) {
        throw config_error("covering number requires positive interval and radius");
    }
    return static_cast<long>(std::ceil(interval_length / (2.0 * tau))) + 1;
}

double gamma(double delta, double interval_length, double tau) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw config_error("failure probability delta must lie in (0,1)");
    }
    if (!(interval_length > 0.0) || !(tau > 0.0)) {
        throw config_error("gamma requires positive interval and radius");
    }
    return 2.0 * std::log(interval_length / (2.0 * tau * delta) + 1.0 / delta);
}

double xi(double tau, double lipschitz_target, double lipschitz_mean,
          double lipschitz_variance, double gamma_value) {
    if (lipschitz_target < 0.0 || lipschitz_mean < 0.0 || lipschitz_variance < 0.0 ||
        gamma_value < 0.0 || !(tau > 0.0)) {
        throw config_error("xi requires non-negative ingredients and positive tau");
    }
    return (lipschitz_target + lipschitz_mean) * tau +
           std::sqrt(gamma_value * lipschitz_variance * tau);
}

BoundReport error_bound(const Posterior& post, const BoundConfig& config,
                        const KernelParams& params, const NoiseModel& noise,
                        const TrainSet& train, VarianceBoundForm form) {
    config.validate();
    BoundReport report;
    report.gamma = gamma(config.delta, config.interval_length, config.tau);
    report.covering_number = covering_number(config.interval_length, config.tau);
    report.lipschitz.kernel = lipschitz_kernel(params);
    report.lipschitz.mean = lipschitz_mean(params, noise, train);
    report.lipschitz.variance = lipschitz_variance(params, noise, train);
    report.xi = xi(config.tau, config.lipschitz_target, report.lipschitz.mean,
                   report.lipschitz.variance, report.gamma);
    report.radius =
        config.radius > 0.0 ? config.radius : max_variance_bound_radius(params);

    const double sqrt_gamma = std::sqrt(report.gamma);
    report.per_point_bound.reserve(post.variance.size());
    for (double var : post.variance) {
        report.per_point_bound.push_back(sqrt_gamma * std::sqrt(var) + report.xi);
    }
    report.variance_bounds.reserve(post.test_times.size());
    for (double t_star : post.test_times) {
        report.variance_bounds.push_back(
            variance_bound(params, noise, train, t_star, report.radius, form));
    }
    return report;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

ValidationResult validate_error_bound(const ValidationConfig& config) {
    if (config.trials < 1 || config.train_stride < 1 || !(config.grid_step > 0.0)) {
        throw config_error("invalid validation configuration");
    }
    const int grid_size =
        static_cast<int>(std::floor(config.interval_length / config.grid_step)) + 1;
    std::vector<double> grid(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i) {
        grid[static_cast<std::size_t>(i)] = config.grid_step * i;
    }

    // factor of the prior covariance on the fine grid, for sampling
    Eigen::MatrixXd prior = kernel_matrix(config.params, grid);
    prior.diagonal().array() += 1e-12 * config.params.signal_variance;
    Eigen::LLT<Eigen::MatrixXd> prior_llt(prior);
    if (prior_llt.info() != Eigen::Success) {
        throw numeric_error("ill-conditioned kernel matrix");
    }
    const Eigen::MatrixXd prior_factor = prior_llt.matrixL();

    ValidationResult result;
    for (int trial = 0; trial < config.trials; ++trial) {
        std::mt19937_64 rng(splitmix64(config.base_seed + static_cast<std::uint64_t>(trial)));
        std::normal_distribution<double> unit(0.0, 1.0);

        Eigen::VectorXd white(grid_size);
        for (int i = 0; i < grid_size; ++i) {
            white(i) = unit(rng);
        }
        const Eigen::VectorXd latent = prior_factor * white;

        double lipschitz_target = 0.0;
        for (int i = 0; i + 1 < grid_size; ++i) {
            lipschitz_target =
                std::max(lipschitz_target, std::abs(latent(i + 1) - latent(i)) / config.grid_step);
        }

        TrainSet train;
        const double noise_sd = std::sqrt(config.noise.variance);
        for (int i = 0; i < grid_size; i += config.train_stride) {
            train.times.push_back(grid[static_cast<std::size_t>(i)]);
            train.targets.push_back(latent(i) + noise_sd * unit(rng));
        }

        const Posterior post = posterior(config.params, config.noise, train, grid);
        BoundConfig bc;
        bc.tau = config.tau;
        bc.delta = config.delta;
        bc.lipschitz_target = lipschitz_target;
        bc.interval_length = config.interval_length;
        const BoundReport report = error_bound(post, bc, config.params, config.noise, train);

        for (int i = 0; i < grid_size; ++i) {
            const double err = std::abs(latent(i) - post.mean[static_cast<std::size_t>(i)]);
            ++result.total_points;
            if (err > report.per_point_bound[static_cast<std::size_t>(i)]) {
                ++result.violations;
            }
        }
    }
    result.violation_fraction =
        static_cast<double>(result.violations) / static_cast<double>(result.total_points);
    return result;
}

} // namespace epigp
