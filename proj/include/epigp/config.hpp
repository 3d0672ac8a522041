#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "epigp/bounds.hpp"
#include "epigp/forecast.hpp"

namespace epigp {

/// Every free parameter of the pipeline, resolvable from defaults, a flat
/// JSON config file, and command-line flags (in that precedence order).
struct RunConfig {
    std::string input_path = "data/uk_cases.csv";
    int smoothing_window = 30;
    int lag = 7;
    double noise_variance = 0.002;
    WindowSpec window;

    // fixed kernel overrides grid search when both fields are present
    std::optional<double> fixed_signal_variance;
    std::optional<double> fixed_length_scale;
    GridSpec grid;
    bool freeze_hp = false;

    double tau = 5.0;
    double delta = 0.05;
    double lipschitz_target = 0.01;
    bool estimate_lipschitz = false; // max |delta(t+1) - delta(t)| heuristic
    std::optional<double> interval_length; // default: train_length + horizon
    std::optional<double> radius;          // default: length_scale * sqrt(e)
    VarianceBoundForm variance_bound_form = VarianceBoundForm::PriorSquared;

    double interval_level = 0.95;
    IntervalMode coverage_mode = IntervalMode::Observation;

    std::string output_dir = ".";
    std::uint64_t base_seed = 12345;
    bool fill_forward = false;
    double epsilon_floor = 0.0;

    std::vector<int> sweep_windows = {1, 3, 5, 10, 20, 30, 50};
    std::vector<int> sweep_lags = {7};
    int poly_degree = 3;
    int knn_kappa = 3;

    void validate() const;
    HyperPolicy hyper_policy() const;
    BoundConfig bound_config() const; // with interval_length/radius resolved
    NoiseModel noise_model() const { return NoiseModel{noise_variance}; }
};

/// Applies a flat key-value JSON object onto a config. Unknown keys are
/// rejected with config_error.
void apply_config_json(RunConfig& config, const nlohmann::json& j);

RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Fully resolved config as JSON, embedded in every emitted artifact.
nlohmann::json config_to_json(const RunConfig& config);

} // namespace epigp
