#include "epigp/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "epigp/errors.hpp"

namespace epigp {

void KernelParams::validate() const {
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance)) {
        throw config_error("signal variance must be positive");
    }
    if (!(length_scale > 0.0) || !std::isfinite(length_scale)) {
        throw config_error("length scale must be positive");
    }
}

void NoiseModel::validate() const {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw config_error("noise variance must be positive");
    }
}

void TrainSet::validate() const {
    if (times.empty()) {
        throw data_error("empty training set");
    }
    if (times.size() != targets.size()) {
        throw data_error("training times and targets differ in length");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw data_error("training times must be strictly increasing");
        }
    }
}

double kernel_eval(const KernelParams& params, double a, double b) {
    const double d = a - b;
    return params.signal_variance *
           std::exp(-d * d / (2.0 * params.length_scale * params.length_scale));
}

Eigen::MatrixXd kernel_matrix(const KernelParams& params, std::span<const double> times) {
    if (times.empty()) {
        throw data_error("empty training set");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(times.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = params.signal_variance;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel_eval(params, times[static_cast<std::size_t>(i)],
                                         times[static_cast<std::size_t>(j)]);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

Eigen::LLT<Eigen::MatrixXd> factorize_system(const KernelParams& params,
                                             const NoiseModel& noise,
                                             std::span<const double> times) {
    params.validate();
    noise.validate();
    Eigen::MatrixXd system = kernel_matrix(params, times);
    system.diagonal().array() += noise.variance;

    Eigen::LLT<Eigen::MatrixXd> llt(system);
    if (llt.info() == Eigen::Success) {
        return llt;
    }
    for (double jitter = 1e-10 * params.signal_variance;
         jitter <= 1e-4 * params.signal_variance; jitter *= 10.0) {
        Eigen::MatrixXd jittered = system;
        jittered.diagonal().array() += jitter;
        llt.compute(jittered);
        if (llt.info() == Eigen::Success) {
            return llt;
        }
    }
    throw numeric_error("ill-conditioned kernel matrix");
}

namespace {

Eigen::VectorXd cross_kernel(const KernelParams& params, double t_star,
                             std::span<const double> times) {
    Eigen::VectorXd k(static_cast<Eigen::Index>(times.size()));
    for (std::size_t j = 0; j < times.size(); ++j) {
        k(static_cast<Eigen::Index>(j)) = kernel_eval(params, t_star, times[j]);
    }
    return k;
}

double evidence_from_factor(const Eigen::LLT<Eigen::MatrixXd>& llt,
                            const Eigen::VectorXd& targets) {
    const Eigen::VectorXd alpha = llt.solve(targets);
    const double quad = targets.dot(alpha);
    const double half_log_det = llt.matrixLLT().diagonal().array().log().sum();
    const double n = static_cast<double>(targets.size());
    return -0.5 * quad - half_log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

} // namespace

Posterior posterior(const KernelParams& params, const NoiseModel& noise,
                    const TrainSet& train, std::span<const double> test_times) {
    train.validate();
    const auto llt = factorize_system(params, noise, train.times);

    const Eigen::Map<const Eigen::VectorXd> y(train.targets.data(),
                                              static_cast<Eigen::Index>(train.targets.size()));
    const Eigen::VectorXd alpha = llt.solve(y);

    Posterior out;
    out.test_times.assign(test_times.begin(), test_times.end());
    out.mean.reserve(test_times.size());
    out.variance.reserve(test_times.size());
    for (double t_star : test_times) {
        const Eigen::VectorXd k_star = cross_kernel(params, t_star, train.times);
        out.mean.push_back(k_star.dot(alpha));
        const Eigen::VectorXd v = llt.solve(k_star);
        // prior variance minus the explained part; roundoff can push it
        // slightly negative
        const double var = params.signal_variance - k_star.dot(v);
        out.variance.push_back(std::max(0.0, var));
    }
    out.log_marginal_likelihood = evidence_from_factor(llt, y);
    return out;
}

double log_marginal_likelihood(const KernelParams& params, const NoiseModel& noise,
                               const TrainSet& train) {
    train.validate();
    const auto llt = factorize_system(params, noise, train.times);
    const Eigen::Map<const Eigen::VectorXd> y(train.targets.data(),
                                              static_cast<Eigen::Index>(train.targets.size()));
    return evidence_from_factor(llt, y);
}

void GridSpec::validate() const {
    if (!(alpha2_min > 0.0) || !(alpha2_max >= alpha2_min) || alpha2_count < 1) {
        throw config_error("invalid signal-variance grid bounds");
    }
    if (!(beta_min > 0.0) || !(beta_max >= beta_min) || beta_count < 1) {
        throw config_error("invalid length-scale grid bounds");
    }
}

namespace {

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    if (count == 1 || lo == hi) {
        out.push_back(lo);
        return out;
    }
    const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) {
        out.push_back(std::exp(std::log(lo) + step * i));
    }
    out.back() = hi; // pin the endpoint against drift
    return out;
}

} // namespace

std::vector<KernelParams> make_grid(const GridSpec& spec) {
    spec.validate();
    const auto alphas = log_spaced(spec.alpha2_min, spec.alpha2_max, spec.alpha2_count);
    const auto betas = log_spaced(spec.beta_min, spec.beta_max, spec.beta_count);
    std::vector<KernelParams> grid;
    grid.reserve(alphas.size() * betas.size());
    for (double a : alphas) {
        for (double b : betas) {
            grid.push_back(KernelParams{a, b});
        }
    }
    return grid;
}

KernelParams select_hyperparameters(const TrainSet& train, const NoiseModel& noise,
                                    std::span<const KernelParams> grid) {
    if (grid.empty()) {
        throw config_error("empty hyperparameter grid");
    }
    train.validate();

    bool found = false;
    KernelParams best{1.0, 1.0};
    double best_lml = -std::numeric_limits<double>::infinity();
    for (const KernelParams& candidate : grid) {
        double lml;
        try {
            lml = log_marginal_likelihood(candidate, noise, train);
        } catch (const numeric_error&) {
            continue;
        }
        if (!std::isfinite(lml)) {
            continue;
        }
        const bool better =
            !found || lml > best_lml ||
            (lml == best_lml && (candidate.length_scale < best.length_scale ||
                                 (candidate.length_scale == best.length_scale &&
                                  candidate.signal_variance < best.signal_variance)));
        if (better) {
            found = true;
            best = candidate;
            best_lml = lml;
        }
    }
    if (!found) {
        throw numeric_error("ill-conditioned kernel matrix");
    }
    return best;
}

} // namespace epigp
