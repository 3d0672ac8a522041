#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epigp/gp.hpp"
#include "epigp/transform.hpp"

namespace epigp {

/// Moving-window schedule: train on `train_length` consecutive deltas,
/// predict the following `horizon`, advance by `stride`.
struct WindowSpec {
    int train_length = 30;
    int horizon = 20;
    int stride = 20; // defaults to the horizon: back-to-back test blocks

    void validate() const;
};

/// Hyperparameter policy: a fixed kernel, or marginal-likelihood grid search
/// re-run per window (freeze = fit once on the first window and reuse).
struct HyperPolicy {
    std::optional<KernelParams> fixed;
    GridSpec grid;
    bool freeze = false;
};

enum class IntervalMode { Latent, Observation };

struct ForecastRecord {
    int window_index = 0;
    bool partial = false; // trailing test block shorter than the horizon
    std::vector<double> train_times;
    std::vector<double> test_times;
    std::vector<double> predicted_mean;
    std::vector<double> predicted_variance;
    double interval_level = 0.95;
    double noise_variance = 0.0;
    // per-point (lower, upper); observation adds the noise variance
    std::vector<std::pair<double, double>> latent_interval;
    std::vector<std::pair<double, double>> observation_interval;
    std::vector<double> actuals;
    KernelParams kernel{1.0, 1.0};
};

struct WindowMetrics {
    int window_index = 0;
    double mse = 0.0;
    double coverage = 0.0;
    long points = 0;
};

struct Metrics {
    double mse = 0.0;
    double coverage = 0.0;
    std::vector<WindowMetrics> per_window;
};

std::vector<ForecastRecord> run_moving_window(const DeltaSeries& deltas,
                                              const WindowSpec& spec,
                                              const HyperPolicy& policy,
                                              const NoiseModel& noise,
                                              double interval_level = 0.95);

/// In-sample fit: one record with train = test = the full delta series.
ForecastRecord run_in_sample_fit(const DeltaSeries& deltas, const HyperPolicy& policy,
                                 const NoiseModel& noise, double interval_level = 0.95);

/// Fraction of (test point, actual) pairs inside the interval recomputed at
/// `level`: half-width z(level) * sqrt(variance [+ noise variance]).
double coverage(std::span<const ForecastRecord> records, double level, IntervalMode mode);

/// Mean squared error of the predicted mean over all test points.
double mse(std::span<const ForecastRecord> records);

Metrics compute_metrics(std::span<const ForecastRecord> records, double level,
                        IntervalMode mode);

/// One sensitivity cell: preprocessing parameters plus the resulting scores.
/// A failed cell carries its error message and NaN scores.
struct SweepRow {
    int window = 0;
    int lag = 0;
    double coverage = 0.0;
    double mse = 0.0;
    long windows_evaluated = 0;
    std::string error;
};

std::vector<SweepRow> sensitivity_sweep(const CaseSeries& raw, std::span<const int> windows,
                                        std::span<const int> lags, const WindowSpec& spec,
                                        const NoiseModel& noise, const HyperPolicy& policy,
                                        double interval_level = 0.95,
                                        IntervalMode mode = IntervalMode::Observation);

} // namespace epigp
