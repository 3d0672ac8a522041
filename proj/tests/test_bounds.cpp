#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "epigp/bounds.hpp"
#include "epigp/errors.hpp"

using namespace epigp;
using Catch::Approx;

namespace {

TrainSet random_train(std::mt19937& rng, int max_n, double span) {
    std::uniform_int_distribution<int> size_dist(1, max_n);
    std::uniform_real_distribution<double> gap(0.2, span);
    std::normal_distribution<double> target(0.0, 1.0);
    TrainSet train;
    const int n = size_dist(rng);
    double t = 0.0;
    for (int i = 0; i < n; ++i) {
        t += gap(rng);
        train.times.push_back(t);
        train.targets.push_back(target(rng));
    }
    return train;
}

// oracle for the system matrix, built independently of gp.cpp
Eigen::MatrixXd oracle_system(const KernelParams& p, const NoiseModel& noise,
                              const TrainSet& train) {
    const Eigen::Index n = static_cast<Eigen::Index>(train.size());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = train.times[static_cast<std::size_t>(i)] -
                             train.times[static_cast<std::size_t>(j)];
            a(i, j) = p.signal_variance *
                      std::exp(-d * d / (2.0 * p.length_scale * p.length_scale));
        }
        a(i, i) += noise.variance;
    }
    return a;
}

} // namespace

TEST_CASE("variance bound") {
    const KernelParams params{1.0, 4.0};

    SECTION("direct evaluation") {
        TrainSet train;
        for (int i = 0; i < 10; ++i) {
            train.times.push_back(static_cast<double>(i) * 0.1);
            train.targets.push_back(0.0);
        }
        // all ten points within radius 2 of t* = 0.5
        const double bound = variance_bound(params, {0.002}, train, 0.5, 2.0);
        CHECK(bound == Approx(1.99960e-4).margin(1e-9));
    }
    SECTION("noise-free limit collapses to zero") {
        TrainSet train{{0.0, 1.0, 2.0}, {0.1, 0.2, 0.3}};
        const double bound = variance_bound(params, {1e-12}, train, 1.0, 2.0);
        CHECK(bound >= 0.0);
        CHECK(bound <= 1e-6);
    }
    SECTION("empty ball is vacuous") {
        TrainSet train{{0.0}, {0.5}};
        const double bound = variance_bound(params, {0.01}, train, 100.0, 1.0);
        CHECK(bound == params.signal_variance);
    }
    SECTION("radius beyond the Lipschitz validity is rejected") {
        TrainSet train{{0.0}, {0.5}};
        const double r_max = max_variance_bound_radius(params);
        CHECK(r_max == Approx(4.0 * std::exp(0.5)).epsilon(1e-14));
        CHECK_THROWS_WITH(variance_bound(params, {0.01}, train, 0.0, r_max * 1.01),
                          "radius exceeds Lipschitz validity");
        CHECK_THROWS_AS(variance_bound(params, {0.01}, train, 0.0, -1.0), config_error);
        CHECK_NOTHROW(variance_bound(params, {0.01}, train, 0.0, r_max));
    }
    SECTION("the prior-numerator form differs from the default") {
        const KernelParams p{2.0, 4.0};
        TrainSet train{{0.0, 0.5}, {0.1, 0.2}};
        const double s2 = 0.01;
        const double prior_squared =
            variance_bound(p, {s2}, train, 0.25, 1.0, VarianceBoundForm::PriorSquared);
        const double prior =
            variance_bound(p, {s2}, train, 0.25, 1.0, VarianceBoundForm::Prior);
        const double denom = 2.0 + s2 / 2.0;
        CHECK(prior_squared == Approx(2.0 - 4.0 / denom).epsilon(1e-14));
        CHECK(prior == Approx(2.0 - 2.0 / denom).epsilon(1e-14));
    }
}

TEST_CASE("variance-bound soundness against the computed posterior") {
    std::mt19937 rng(314);
    std::uniform_real_distribution<double> a2_dist(0.05, 5.0);
    std::uniform_real_distribution<double> beta_dist(1.0, 20.0);
    std::uniform_real_distribution<double> s2_dist(1e-4, 0.5);
    std::uniform_real_distribution<double> frac(0.1, 1.0);
    std::uniform_real_distribution<double> t_dist(0.0, 20.0);

    SECTION("the Lipschitz form upper-bounds the variance everywhere") {
        for (int trial = 0; trial < 200; ++trial) {
            const KernelParams params{a2_dist(rng), beta_dist(rng)};
            const NoiseModel noise{s2_dist(rng)};
            const TrainSet train = random_train(rng, 12, 3.0);
            const double t_star = t_dist(rng);
            const double radius = frac(rng) * max_variance_bound_radius(params);
            const double bound = variance_bound(params, noise, train, t_star, radius,
                                                VarianceBoundForm::Lipschitz);
            const std::vector<double> tests{t_star};
            const Posterior post = posterior(params, noise, train, tests);
            CHECK(post.variance[0] <= bound + 1e-10);
        }
    }

    SECTION("the default form is attained by near-coincident observations") {
        // the alpha^4 numerator is the limit of the in-ball points collapsing
        // onto the test time, so it holds when they (almost) do
        for (int trial = 0; trial < 50; ++trial) {
            const KernelParams params{a2_dist(rng), beta_dist(rng)};
            const NoiseModel noise{s2_dist(rng)};
            const double t_star = t_dist(rng);
            TrainSet train;
            const int m = 1 + trial % 4;
            for (int i = 0; i < m; ++i) {
                train.times.push_back(t_star + (i - m) * 1e-9 * params.length_scale);
                train.targets.push_back(0.1 * i);
            }
            const double radius = 0.5 * max_variance_bound_radius(params);
            const double bound = variance_bound(params, noise, train, t_star, radius);
            const std::vector<double> tests{t_star};
            const Posterior post = posterior(params, noise, train, tests);
            CHECK(post.variance[0] <= bound + 1e-10);
        }
    }

    SECTION("the default form undershoots for a distant in-ball point") {
        // one observation a full length scale away: the true variance stays
        // near the prior while the alpha^4 numerator claims near-zero
        const KernelParams params{1.0, 1.0};
        const NoiseModel noise{0.01};
        TrainSet train{{1.0}, {0.4}};
        const double bound = variance_bound(params, noise, train, 0.0, 1.5);
        const std::vector<double> tests{0.0};
        const Posterior post = posterior(params, noise, train, tests);
        CHECK(post.variance[0] > bound);
        const double sound = variance_bound(params, noise, train, 0.0, 1.5,
                                            VarianceBoundForm::Lipschitz);
        CHECK(post.variance[0] <= sound + 1e-10);
    }
}

TEST_CASE("kernel Lipschitz constant") {
    CHECK(lipschitz_kernel({1.0, 1.0}) == Approx(0.606531).margin(1e-6));
    CHECK(lipschitz_kernel({2.0, 1.0}) == Approx(2.0 * lipschitz_kernel({1.0, 1.0})));
    CHECK(lipschitz_kernel({1.0, 2.0}) == Approx(0.5 * lipschitz_kernel({1.0, 1.0})));
}

TEST_CASE("posterior-mean Lipschitz constant") {
    SECTION("zero targets give zero") {
        TrainSet train{{0.0, 1.0, 2.0}, {0.0, 0.0, 0.0}};
        CHECK(lipschitz_mean({1.0, 1.0}, {0.1}, train) == 0.0);
    }
    SECTION("scalar closed form") {
        TrainSet train{{3.0}, {2.0}};
        CHECK(lipschitz_mean({1.0, 1.0}, {1.0}, train) ==
              Approx(std::exp(-0.5)).epsilon(1e-12));
    }
    SECTION("matches the explicit-inverse oracle") {
        std::mt19937 rng(1618);
        for (int trial = 0; trial < 200; ++trial) {
            const KernelParams params{0.9, 6.0};
            const NoiseModel noise{0.05};
            const TrainSet train = random_train(rng, 10, 4.0);
            const Eigen::MatrixXd a = oracle_system(params, noise, train);
            Eigen::VectorXd y(static_cast<Eigen::Index>(train.size()));
            for (std::size_t i = 0; i < train.size(); ++i) {
                y(static_cast<Eigen::Index>(i)) = train.targets[i];
            }
            const double expected = params.signal_variance /
                                    (params.length_scale * std::exp(0.5)) *
                                    std::sqrt(static_cast<double>(train.size())) *
                                    (a.inverse() * y).norm();
            CHECK(lipschitz_mean(params, noise, train) == Approx(expected).margin(1e-8));
        }
    }
}

TEST_CASE("posterior-variance Lipschitz constant") {
    SECTION("scalar closed form") {
        TrainSet train{{3.0}, {2.0}};
        CHECK(lipschitz_variance({1.0, 1.0}, {1.0}, train) ==
              Approx(std::exp(-0.5)).epsilon(1e-12));
    }
    SECTION("more noise loosens the inverse norm") {
        TrainSet train{{0.0, 1.0, 2.0, 3.0}, {0.1, -0.2, 0.3, 0.0}};
        const double tight = lipschitz_variance({1.0, 2.0}, {0.01}, train);
        const double loose = lipschitz_variance({1.0, 2.0}, {0.5}, train);
        CHECK(loose < tight);
    }
    SECTION("matches the eigendecomposition oracle") {
        std::mt19937 rng(271);
        for (int trial = 0; trial < 200; ++trial) {
            const KernelParams params{1.3, 5.0};
            const NoiseModel noise{0.02};
            const TrainSet train = random_train(rng, 8, 4.0);
            const Eigen::MatrixXd a = oracle_system(params, noise, train);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
            const double n = static_cast<double>(train.size());
            const double a2 = params.signal_variance;
            const double expected = 2.0 * n * a2 * a2 /
                                    (params.length_scale * std::exp(0.5)) /
                                    eig.eigenvalues().minCoeff();
            CHECK(lipschitz_variance(params, noise, train) ==
                  Approx(expected).margin(1e-8));
        }
    }
}

TEST_CASE("covering number") {
    CHECK(covering_number(50.0, 5.0) == 6);
    CHECK(covering_number(10.0, 5.0) == 2);
    CHECK(covering_number(60.0, 5.0) == 7);
    CHECK(covering_number(50.0, 4.9) == 7); // ceiling applies
    CHECK_THROWS_AS(covering_number(0.0, 5.0), config_error);
}

TEST_CASE("gamma") {
    SECTION("reference configuration") {
        CHECK(gamma(0.05, 50.0, 5.0) == Approx(9.57455).margin(1e-3));
        CHECK(gamma(0.05, 50.0, 5.0) == Approx(2.0 * std::log(120.0)).epsilon(1e-14));
    }
    SECTION("interval of one covering pair") {
        // T = 2 tau and delta = 1/2 make both summands equal to two
        CHECK(gamma(0.5, 10.0, 5.0) == Approx(2.0 * std::log(4.0)).epsilon(1e-14));
        CHECK(gamma(0.5, 10.0, 5.0) == Approx(2.77259).margin(1e-5));
    }
    SECTION("monotone decreasing in delta and tau") {
        double prev = gamma(0.01, 50.0, 5.0);
        for (double d : {0.05, 0.1, 0.5, 0.9}) {
            const double g = gamma(d, 50.0, 5.0);
            CHECK(g < prev);
            prev = g;
        }
        CHECK(gamma(0.05, 50.0, 6.0) < gamma(0.05, 50.0, 5.0));
    }
    SECTION("delta outside (0,1) is rejected") {
        CHECK_THROWS_AS(gamma(0.0, 50.0, 5.0), config_error);
        CHECK_THROWS_AS(gamma(1.0, 50.0, 5.0), config_error);
    }
}

TEST_CASE("xi") {
    CHECK(xi(1.0, 0.0, 0.0, 0.0, 0.0) == 0.0);
    CHECK(xi(1.0, 0.01, 1.0, 1.0, 4.0) == Approx(3.01).epsilon(1e-14));
    SECTION("monotone non-decreasing in each argument") {
        const double base = xi(1.0, 0.01, 1.0, 1.0, 4.0);
        CHECK(xi(1.5, 0.01, 1.0, 1.0, 4.0) >= base);
        CHECK(xi(1.0, 0.02, 1.0, 1.0, 4.0) >= base);
        CHECK(xi(1.0, 0.01, 2.0, 1.0, 4.0) >= base);
        CHECK(xi(1.0, 0.01, 1.0, 2.0, 4.0) >= base);
        CHECK(xi(1.0, 0.01, 1.0, 1.0, 5.0) >= base);
    }
}

TEST_CASE("error-bound report") {
    const KernelParams params{1.0, 5.0};
    const NoiseModel noise{0.002};
    TrainSet train;
    for (int i = 0; i < 30; ++i) {
        train.times.push_back(static_cast<double>(i + 1));
        train.targets.push_back(0.05 * std::sin(0.3 * i));
    }
    std::vector<double> tests;
    for (int i = 30; i < 50; ++i) {
        tests.push_back(static_cast<double>(i + 1));
    }
    const Posterior post = posterior(params, noise, train, tests);

    BoundConfig config; // defaults: tau 5, delta 0.05, L 0.01, length 50
    const BoundReport report = error_bound(post, config, params, noise, train);

    SECTION("reference configuration") {
        CHECK(report.gamma == Approx(9.57455).margin(1e-3));
        CHECK(report.covering_number == 6);
        CHECK(report.radius == Approx(5.0 * std::exp(0.5)).epsilon(1e-14));
        REQUIRE(report.per_point_bound.size() == tests.size());
        for (double b : report.per_point_bound) {
            CHECK(b >= report.xi);
        }
        for (double vb : report.variance_bounds) {
            CHECK(vb >= 0.0);
            CHECK(vb <= params.signal_variance);
        }
    }
    SECTION("bound grows with the posterior deviation") {
        // the test block extrapolates, so sigma and the bound both increase
        for (std::size_t i = 1; i < report.per_point_bound.size(); ++i) {
            CHECK(report.per_point_bound[i] >= report.per_point_bound[i - 1] - 1e-12);
        }
    }
    SECTION("zero-variance posterior collapses to xi") {
        Posterior flat;
        flat.test_times = {1.0, 2.0};
        flat.mean = {0.0, 0.0};
        flat.variance = {0.0, 0.0};
        flat.log_marginal_likelihood = 0.0;
        const BoundReport r = error_bound(flat, config, params, noise, train);
        CHECK(r.per_point_bound[0] == r.xi);
        CHECK(r.per_point_bound[1] == r.xi);
    }
    SECTION("bound is monotone in interval length and target Lipschitz constant") {
        BoundConfig wider = config;
        wider.interval_length = 100.0;
        const BoundReport rw = error_bound(post, wider, params, noise, train);
        BoundConfig steeper = config;
        steeper.lipschitz_target = 0.5;
        const BoundReport rs = error_bound(post, steeper, params, noise, train);
        for (std::size_t i = 0; i < report.per_point_bound.size(); ++i) {
            CHECK(rw.per_point_bound[i] >= report.per_point_bound[i]);
            CHECK(rs.per_point_bound[i] >= report.per_point_bound[i]);
        }
    }
}

TEST_CASE("Monte-Carlo validation of the error bound") {
    ValidationConfig config;
    config.trials = 50; // the acceptance suite runs the full 200
    const ValidationResult result = validate_error_bound(config);
    CHECK(result.total_points == 50L * 101L);
    CHECK(result.violation_fraction <= 0.07);

    SECTION("deterministic under the same seed") {
        const ValidationResult again = validate_error_bound(config);
        CHECK(again.violations == result.violations);
    }
}
