#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "epigp/forecast.hpp"
#include "epigp/gp.hpp"
#include "epigp/transform.hpp"

namespace epigp {

/// Ordinary least squares polynomial fit in a basis standardized to [-1, 1].
struct PolyModel {
    int degree = 0;
    Eigen::VectorXd coefficients;         // in the standardized basis
    double residual_variance = 0.0;       // RSS / (n - degree - 1)
    Eigen::MatrixXd design_gram_inverse;  // (V^T V)^{-1} for interval leverage
    double time_low = 0.0;                // affine map endpoints
    double time_high = 1.0;
    long dof = 0;                         // n - degree - 1
};

struct KnnModel {
    int kappa = 1;
    std::vector<double> train_times;
    std::vector<double> train_targets;
};

/// One predicted point with its confidence band.
struct BandedPrediction {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

PolyModel poly_fit(const TrainSet& train, int degree);

/// Prediction interval half-width
/// t(level, dof) * sqrt(residual_variance * (1 + leverage(t*))).
std::vector<BandedPrediction> poly_predict(const PolyModel& model,
                                           std::span<const double> test_times,
                                           double level);

KnnModel knn_fit(const TrainSet& train, int kappa);

/// Mean of the kappa nearest training targets (distance ties break toward
/// the earlier time); interval is mean +/- z(level) * sample std of those
/// targets. kappa = 1 yields a zero-width interval.
std::vector<BandedPrediction> knn_predict(const KnnModel& model,
                                          std::span<const double> test_times,
                                          double level);

/// Scores of one named method over a shared evaluation protocol.
struct MethodMetrics {
    std::string method;
    Metrics metrics;
};

struct ComparisonRow {
    std::string method;
    double mse = 0.0;
    double coverage = 0.0;
};

/// Rows sorted by coverage descending (method name breaks ties). All inputs
/// must be computed on identical test points.
std::vector<ComparisonRow> compare(const MethodMetrics& gpr,
                                   std::span<const MethodMetrics> baselines);

/// Moving-window record for a baseline; intervals are stored explicitly
/// because the baselines define their own band construction.
struct BaselineRecord {
    int window_index = 0;
    bool partial = false;
    std::vector<double> test_times;
    std::vector<BandedPrediction> predictions;
    std::vector<double> actuals;
};

enum class BaselineKind { Polynomial, Knn };

/// Runs a baseline over the same schedule as run_moving_window. `order` is
/// the polynomial degree or kappa.
std::vector<BaselineRecord> run_moving_window_baseline(const DeltaSeries& deltas,
                                                       const WindowSpec& spec,
                                                       BaselineKind kind, int order,
                                                       double interval_level = 0.95);

/// In-sample fit over the full series, mirroring run_in_sample_fit.
BaselineRecord run_in_sample_baseline(const DeltaSeries& deltas, BaselineKind kind,
                                      int order, double interval_level = 0.95);

Metrics baseline_metrics(std::span<const BaselineRecord> records);

} // namespace epigp
