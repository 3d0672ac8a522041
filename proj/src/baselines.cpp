#include "epigp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "epigp/errors.hpp"
#include "epigp/stats.hpp"

namespace epigp {

namespace {

double standardize(const PolyModel& model, double t) {
    if (model.time_high == model.time_low) {
        return 0.0;
    }
    return 2.0 * (t - model.time_low) / (model.time_high - model.time_low) - 1.0;
}

Eigen::VectorXd monomials(double z, int degree) {
    Eigen::VectorXd v(degree + 1);
    double p = 1.0;
    for (int k = 0; k <= degree; ++k) {
        v(k) = p;
        p *= z;
    }
    return v;
}

} // namespace

PolyModel poly_fit(const TrainSet& train, int degree) {
    if (degree < 0) {
        throw config_error("polynomial degree must be non-negative");
    }
    train.validate();
    const long n = static_cast<long>(train.size());
    if (n < degree + 1) {
        throw data_error("polynomial fit needs at least degree + 1 points");
    }

    PolyModel model;
    model.degree = degree;
    model.time_low = train.times.front();
    model.time_high = train.times.back();
    model.dof = n - degree - 1;

    Eigen::MatrixXd design(n, degree + 1);
    for (long i = 0; i < n; ++i) {
        design.row(i) =
            monomials(standardize(model, train.times[static_cast<std::size_t>(i)]), degree)
                .transpose();
    }
    const Eigen::Map<const Eigen::VectorXd> y(train.targets.data(), n);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < degree + 1) {
        throw numeric_error("degenerate polynomial basis");
    }
    model.coefficients = qr.solve(y);

    const Eigen::VectorXd residuals = y - design * model.coefficients;
    const double rss = residuals.squaredNorm();
    model.residual_variance = model.dof > 0 ? rss / static_cast<double>(model.dof) : 0.0;

    const Eigen::MatrixXd gram = design.transpose() * design;
    model.design_gram_inverse =
        gram.ldlt().solve(Eigen::MatrixXd::Identity(degree + 1, degree + 1));
    return model;
}

std::vector<BandedPrediction> poly_predict(const PolyModel& model,
                                           std::span<const double> test_times,
                                           double level) {
    // dof 0 means an exact-interpolation fit: zero-width bands
    const double t_crit =
        model.dof > 0 ? student_t_critical_value(level, static_cast<double>(model.dof)) : 0.0;
    std::vector<BandedPrediction> out;
    out.reserve(test_times.size());
    for (double t : test_times) {
        const Eigen::VectorXd v = monomials(standardize(model, t), model.degree);
        BandedPrediction p;
        p.mean = v.dot(model.coefficients);
        const double leverage = v.dot(model.design_gram_inverse * v);
        const double hw =
            t_crit * std::sqrt(std::max(0.0, model.residual_variance * (1.0 + leverage)));
        p.lower = p.mean - hw;
        p.upper = p.mean + hw;
        out.push_back(p);
    }
    return out;
}

KnnModel knn_fit(const TrainSet& train, int kappa) {
    train.validate();
    if (kappa < 1 || static_cast<std::size_t>(kappa) > train.size()) {
        throw config_error("kappa must lie in [1, training size]");
    }
    return KnnModel{kappa, train.times, train.targets};
}

std::vector<BandedPrediction> knn_predict(const KnnModel& model,
                                          std::span<const double> test_times,
                                          double level) {
    if (model.train_times.empty()) {
        throw data_error("empty training set");
    }
    const double z = normal_critical_value(level);
    const std::size_t n = model.train_times.size();
    const std::size_t k = static_cast<std::size_t>(model.kappa);

    std::vector<std::size_t> order(n);
    std::vector<BandedPrediction> out;
    out.reserve(test_times.size());
    for (double t : test_times) {
        std::iota(order.begin(), order.end(), 0);
        // distance ties break toward the earlier time, i.e. the lower index
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                          order.end(), [&](std::size_t a, std::size_t b) {
                              const double da = std::abs(model.train_times[a] - t);
                              const double db = std::abs(model.train_times[b] - t);
                              return da < db || (da == db && a < b);
                          });
        double sum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            sum += model.train_targets[order[j]];
        }
        BandedPrediction p;
        p.mean = sum / static_cast<double>(k);
        double ss = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double d = model.train_targets[order[j]] - p.mean;
            ss += d * d;
        }
        const double sd = k > 1 ? std::sqrt(ss / static_cast<double>(k - 1)) : 0.0;
        p.lower = p.mean - z * sd;
        p.upper = p.mean + z * sd;
        out.push_back(p);
    }
    return out;
}

std::vector<ComparisonRow> compare(const MethodMetrics& gpr,
                                   std::span<const MethodMetrics> baselines) {
    const auto check_alignment = [&](const MethodMetrics& other) {
        if (other.metrics.per_window.size() != gpr.metrics.per_window.size()) {
            throw data_error("comparison methods evaluated on different test points");
        }
        for (std::size_t i = 0; i < gpr.metrics.per_window.size(); ++i) {
            const auto& a = gpr.metrics.per_window[i];
            const auto& b = other.metrics.per_window[i];
            if (a.window_index != b.window_index || a.points != b.points) {
                throw data_error("comparison methods evaluated on different test points");
            }
        }
    };

    std::vector<ComparisonRow> rows;
    rows.push_back({gpr.method, gpr.metrics.mse, gpr.metrics.coverage});
    for (const MethodMetrics& m : baselines) {
        check_alignment(m);
        rows.push_back({m.method, m.metrics.mse, m.metrics.coverage});
    }
    std::sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        return a.coverage > b.coverage || (a.coverage == b.coverage && a.method < b.method);
    });
    return rows;
}

namespace {

std::vector<BandedPrediction> predict_baseline(const TrainSet& train, BaselineKind kind,
                                               int order, std::span<const double> test_times,
                                               double level) {
    if (kind == BaselineKind::Polynomial) {
        return poly_predict(poly_fit(train, order), test_times, level);
    }
    return knn_predict(knn_fit(train, order), test_times, level);
}

} // namespace

std::vector<BaselineRecord> run_moving_window_baseline(const DeltaSeries& deltas,
                                                       const WindowSpec& spec,
                                                       BaselineKind kind, int order,
                                                       double interval_level) {
    spec.validate();
    const std::size_t n = deltas.size();
    const std::size_t train_len = static_cast<std::size_t>(spec.train_length);
    const std::size_t horizon = static_cast<std::size_t>(spec.horizon);
    if (n < train_len + horizon) {
        throw data_error("insufficient data for moving window");
    }

    std::vector<BaselineRecord> records;
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

        BaselineRecord rec;
        rec.window_index = static_cast<int>(index);
        rec.partial = test_end - train_end < horizon;
        rec.test_times.assign(deltas.times.begin() + static_cast<std::ptrdiff_t>(train_end),
                              deltas.times.begin() + static_cast<std::ptrdiff_t>(test_end));
        rec.actuals.assign(deltas.deltas.begin() + static_cast<std::ptrdiff_t>(train_end),
                           deltas.deltas.begin() + static_cast<std::ptrdiff_t>(test_end));
        rec.predictions = predict_baseline(train, kind, order, rec.test_times, interval_level);
        records.push_back(std::move(rec));
        if (test_end == n) {
            break;
        }
    }
    return records;
}

BaselineRecord run_in_sample_baseline(const DeltaSeries& deltas, BaselineKind kind,
                                      int order, double interval_level) {
    TrainSet train;
    train.times = deltas.times;
    train.targets = deltas.deltas;
    BaselineRecord rec;
    rec.window_index = 0;
    rec.test_times = deltas.times;
    rec.actuals = deltas.deltas;
    rec.predictions = predict_baseline(train, kind, order, rec.test_times, interval_level);
    return rec;
}

Metrics baseline_metrics(std::span<const BaselineRecord> records) {
    if (records.empty()) {
        throw data_error("metrics require at least one record");
    }
    Metrics metrics;
    double sum = 0.0;
    long total = 0;
    long inside = 0;
    for (const BaselineRecord& rec : records) {
        WindowMetrics wm;
        wm.window_index = rec.window_index;
        wm.points = static_cast<long>(rec.actuals.size());
        double wsum = 0.0;
        long winside = 0;
        for (std::size_t i = 0; i < rec.actuals.size(); ++i) {
            const double e = rec.actuals[i] - rec.predictions[i].mean;
            wsum += e * e;
            const bool in = rec.actuals[i] >= rec.predictions[i].lower &&
                            rec.actuals[i] <= rec.predictions[i].upper;
            if (in) {
                ++winside;
            }
        }
        wm.mse = wsum / static_cast<double>(wm.points);
        wm.coverage = static_cast<double>(winside) / static_cast<double>(wm.points);
        metrics.per_window.push_back(wm);
        sum += wsum;
        total += wm.points;
        inside += winside;
    }
    metrics.mse = sum / static_cast<double>(total);
    metrics.coverage = static_cast<double>(inside) / static_cast<double>(total);
    return metrics;
}

} // namespace epigp
