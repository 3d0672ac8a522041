#include "epigp/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epigp/errors.hpp"
#include "epigp/stats.hpp"

namespace epigp {

void WindowSpec::validate() const {
    if (train_length < 1 || horizon < 1 || stride < 1) {
        throw config_error("window lengths and stride must be positive");
    }
}

namespace {

KernelParams params_for_window(const TrainSet& train, const HyperPolicy& policy,
                               const NoiseModel& noise,
                               std::optional<KernelParams>& frozen) {
    if (policy.fixed) {
        return *policy.fixed;
    }
    if (policy.freeze && frozen) {
        return *frozen;
    }
    const auto grid = make_grid(policy.grid);
    const KernelParams selected = select_hyperparameters(train, noise, grid);
    if (policy.freeze) {
        frozen = selected;
    }
    return selected;
}

ForecastRecord make_record(int window_index, bool partial, TrainSet train,
                           std::span<const double> test_times,
                           std::span<const double> actuals, const KernelParams& params,
                           const NoiseModel& noise, double level) {
    const Posterior post = posterior(params, noise, train, test_times);
    ForecastRecord rec;
    rec.window_index = window_index;
    rec.partial = partial;
    rec.train_times = std::move(train.times);
    rec.test_times = post.test_times;
    rec.predicted_mean = post.mean;
    rec.predicted_variance = post.variance;
    rec.interval_level = level;
    rec.noise_variance = noise.variance;
    rec.actuals.assign(actuals.begin(), actuals.end());
    rec.kernel = params;

    const double z = normal_critical_value(level);
    rec.latent_interval.reserve(post.mean.size());
    rec.observation_interval.reserve(post.mean.size());
    for (std::size_t i = 0; i < post.mean.size(); ++i) {
        const double m = post.mean[i];
        const double latent_hw = z * std::sqrt(post.variance[i]);
        const double obs_hw = z * std::sqrt(post.variance[i] + noise.variance);
        rec.latent_interval.emplace_back(m - latent_hw, m + latent_hw);
        rec.observation_interval.emplace_back(m - obs_hw, m + obs_hw);
    }
    return rec;
}

} // namespace

std::vector<ForecastRecord> run_moving_window(const DeltaSeries& deltas,
                                              const WindowSpec& spec,
                                              const HyperPolicy& policy,
                                              const NoiseModel& noise,
                                              double interval_level) {
    spec.validate();
    const std::size_t n = deltas.size();
    const std::size_t train_len = static_cast<std::size_t>(spec.train_length);
    const std::size_t horizon = static_cast<std::size_t>(spec.horizon);
    if (n < train_len + horizon) {
        throw data_error("insufficient data for moving window");
    }

    std::vector<ForecastRecord> records;
    std::optional<KernelParams> frozen;
    for (std::size_t start = 0, index = 0;; start += static_cast<std::size_t>(spec.stride), ++index) {
        const std::size_t train_end = start + train_len;
        if (train_end >= n) {
            break;
        }
        const std::size_t test_end = std::min(train_end + horizon, n);

        TrainSet train;
        train.times.assign(deltas.times.begin() + static_cast<std::ptrdiff_t>(start),
                           deltas.times.begin() + static_cast<std::ptrdiff_t>(train_end));
        train.targets.assign(deltas.deltas.begin() + static_cast<std::ptrdiff_t>(start),
                             deltas.deltas.begin() + static_cast<std::ptrdiff_t>(train_end));

        const KernelParams params = params_for_window(train, policy, noise, frozen);
        const std::span<const double> test_times{deltas.times.data() + train_end,
                                                 test_end - train_end};
        const std::span<const double> actuals{deltas.deltas.data() + train_end,
                                              test_end - train_end};
        records.push_back(make_record(static_cast<int>(index),
                                      test_end - train_end < horizon, std::move(train),
                                      test_times, actuals, params, noise, interval_level));
        if (test_end == n) {
            break;
        }
    }
    return records;
}

ForecastRecord run_in_sample_fit(const DeltaSeries& deltas, const HyperPolicy& policy,
                                 const NoiseModel& noise, double interval_level) {
    TrainSet train;
    train.times = deltas.times;
    train.targets = deltas.deltas;
    std::optional<KernelParams> frozen;
    const KernelParams params = params_for_window(train, policy, noise, frozen);
    return make_record(0, false, std::move(train), deltas.times, deltas.deltas, params,
                       noise, interval_level);
}

namespace {

bool covered(const ForecastRecord& rec, std::size_t i, double z, IntervalMode mode) {
    const double extra = mode == IntervalMode::Observation ? rec.noise_variance : 0.0;
    const double hw = z * std::sqrt(rec.predicted_variance[i] + extra);
    return std::abs(rec.actuals[i] - rec.predicted_mean[i]) <= hw;
}

} // namespace

double coverage(std::span<const ForecastRecord> records, double level, IntervalMode mode) {
    if (records.empty()) {
        throw data_error("coverage requires at least one record");
    }
    const double z = normal_critical_value(level);
    long total = 0;
    long inside = 0;
    for (const ForecastRecord& rec : records) {
        for (std::size_t i = 0; i < rec.actuals.size(); ++i) {
            ++total;
            if (covered(rec, i, z, mode)) {
                ++inside;
            }
        }
    }
    return static_cast<double>(inside) / static_cast<double>(total);
}

double mse(std::span<const ForecastRecord> records) {
    if (records.empty()) {
        throw data_error("mse requires at least one record");
    }
    double sum = 0.0;
    long total = 0;
    for (const ForecastRecord& rec : records) {
        for (std::size_t i = 0; i < rec.actuals.size(); ++i) {
            const double e = rec.actuals[i] - rec.predicted_mean[i];
            sum += e * e;
            ++total;
        }
    }
    return sum / static_cast<double>(total);
}

Metrics compute_metrics(std::span<const ForecastRecord> records, double level,
                        IntervalMode mode) {
    Metrics metrics;
    metrics.mse = mse(records);
    metrics.coverage = coverage(records, level, mode);
    const double z = normal_critical_value(level);
    metrics.per_window.reserve(records.size());
    for (const ForecastRecord& rec : records) {
        WindowMetrics wm;
        wm.window_index = rec.window_index;
        wm.points = static_cast<long>(rec.actuals.size());
        long inside = 0;
        double sum = 0.0;
        for (std::size_t i = 0; i < rec.actuals.size(); ++i) {
            const double e = rec.actuals[i] - rec.predicted_mean[i];
            sum += e * e;
            if (covered(rec, i, z, mode)) {
                ++inside;
            }
        }
        wm.mse = sum / static_cast<double>(wm.points);
        wm.coverage = static_cast<double>(inside) / static_cast<double>(wm.points);
        metrics.per_window.push_back(wm);
    }
    return metrics;
}

std::vector<SweepRow> sensitivity_sweep(const CaseSeries& raw, std::span<const int> windows,
                                        std::span<const int> lags, const WindowSpec& spec,
                                        const NoiseModel& noise, const HyperPolicy& policy,
                                        double interval_level, IntervalMode mode) {
    std::vector<int> ws(windows.begin(), windows.end());
    std::vector<int> es(lags.begin(), lags.end());
    std::sort(ws.begin(), ws.end());
    std::sort(es.begin(), es.end());

    std::vector<SweepRow> rows;
    rows.reserve(ws.size() * es.size());
    for (int w : ws) {
        for (int eta : es) {
            SweepRow row;
            row.window = w;
            row.lag = eta;
            try {
                const SmoothedSeries smoothed = rolling_average(raw, w);
                const DeltaSeries deltas = log_difference(smoothed, eta);
                const auto records =
                    run_moving_window(deltas, spec, policy, noise, interval_level);
                row.coverage = coverage(records, interval_level, mode);
                row.mse = mse(records);
                row.windows_evaluated = static_cast<long>(records.size());
            } catch (const std::exception& e) {
                row.coverage = std::numeric_limits<double>::quiet_NaN();
                row.mse = std::numeric_limits<double>::quiet_NaN();
                row.error = e.what();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace epigp
