#include "epigp/config.hpp"

#include <fstream>

#include "epigp/errors.hpp"

namespace epigp {

void RunConfig::validate() const {
    if (smoothing_window < 1) {
        throw config_error("smoothing window must be positive");
    }
    if (lag < 1) {
        throw config_error("lag must be positive");
    }
    if (!(noise_variance > 0.0)) {
        throw config_error("noise variance must be positive");
    }
    window.validate();
    if (fixed_signal_variance.has_value() != fixed_length_scale.has_value()) {
        throw config_error("fixed kernel needs both signal_variance and length_scale");
    }
    if (fixed_signal_variance) {
        KernelParams{*fixed_signal_variance, *fixed_length_scale}.validate();
    }
    grid.validate();
    if (!(interval_level > 0.0 && interval_level < 1.0)) {
        throw config_error("confidence level must lie in (0,1)");
    }
    bound_config().validate();
    if (radius && !(*radius > 0.0)) {
        throw config_error("radius must be positive");
    }
    if (epsilon_floor < 0.0) {
        throw config_error("epsilon floor must be non-negative");
    }
    if (sweep_windows.empty() || sweep_lags.empty()) {
        throw config_error("sweep sets must be non-empty");
    }
    for (int w : sweep_windows) {
        if (w < 1) {
            throw config_error("sweep windows must be positive");
        }
    }
    for (int e : sweep_lags) {
        if (e < 1) {
            throw config_error("sweep lags must be positive");
        }
    }
    if (poly_degree < 0) {
        throw config_error("polynomial degree must be non-negative");
    }
    if (knn_kappa < 1) {
        throw config_error("kappa must be positive");
    }
}

HyperPolicy RunConfig::hyper_policy() const {
    HyperPolicy policy;
    if (fixed_signal_variance && fixed_length_scale) {
        policy.fixed = KernelParams{*fixed_signal_variance, *fixed_length_scale};
    }
    policy.grid = grid;
    policy.freeze = freeze_hp;
    return policy;
}

BoundConfig RunConfig::bound_config() const {
    BoundConfig bc;
    bc.tau = tau;
    bc.delta = delta;
    bc.lipschitz_target = lipschitz_target;
    bc.interval_length = interval_length
                             ? *interval_length
                             : static_cast<double>(window.train_length + window.horizon);
    bc.radius = radius ? *radius : 0.0;
    return bc;
}

namespace {

template <typename T>
T as(const nlohmann::json& v, const char* key) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw config_error(std::string("config key '") + key + "' has the wrong type");
    }
}

} // namespace

void apply_config_json(RunConfig& config, const nlohmann::json& j) {
    if (!j.is_object()) {
        throw config_error("config file must hold a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "input") {
            config.input_path = as<std::string>(value, "input");
        } else if (key == "window") {
            config.smoothing_window = as<int>(value, "window");
        } else if (key == "lag") {
            config.lag = as<int>(value, "lag");
        } else if (key == "noise_variance") {
            config.noise_variance = as<double>(value, "noise_variance");
        } else if (key == "train_length") {
            config.window.train_length = as<int>(value, "train_length");
        } else if (key == "horizon") {
            config.window.horizon = as<int>(value, "horizon");
            config.window.stride = config.window.horizon; // stride follows unless set
        } else if (key == "stride") {
            config.window.stride = as<int>(value, "stride");
        } else if (key == "signal_variance") {
            config.fixed_signal_variance = as<double>(value, "signal_variance");
        } else if (key == "length_scale") {
            config.fixed_length_scale = as<double>(value, "length_scale");
        } else if (key == "grid_alpha2_min") {
            config.grid.alpha2_min = as<double>(value, "grid_alpha2_min");
        } else if (key == "grid_alpha2_max") {
            config.grid.alpha2_max = as<double>(value, "grid_alpha2_max");
        } else if (key == "grid_alpha2_count") {
            config.grid.alpha2_count = as<int>(value, "grid_alpha2_count");
        } else if (key == "grid_beta_min") {
            config.grid.beta_min = as<double>(value, "grid_beta_min");
        } else if (key == "grid_beta_max") {
            config.grid.beta_max = as<double>(value, "grid_beta_max");
        } else if (key == "grid_beta_count") {
            config.grid.beta_count = as<int>(value, "grid_beta_count");
        } else if (key == "freeze_hp") {
            config.freeze_hp = as<bool>(value, "freeze_hp");
        } else if (key == "tau") {
            config.tau = as<double>(value, "tau");
        } else if (key == "delta") {
            config.delta = as<double>(value, "delta");
        } else if (key == "lipschitz_target") {
            config.lipschitz_target = as<double>(value, "lipschitz_target");
        } else if (key == "estimate_lipschitz") {
            config.estimate_lipschitz = as<bool>(value, "estimate_lipschitz");
        } else if (key == "interval_length") {
            config.interval_length = as<double>(value, "interval_length");
        } else if (key == "radius") {
            config.radius = as<double>(value, "radius");
        } else if (key == "variance_bound_form") {
            const auto form = as<std::string>(value, "variance_bound_form");
            if (form == "prior_squared") {
                config.variance_bound_form = VarianceBoundForm::PriorSquared;
            } else if (form == "prior") {
                config.variance_bound_form = VarianceBoundForm::Prior;
            } else if (form == "lipschitz") {
                config.variance_bound_form = VarianceBoundForm::Lipschitz;
            } else {
                throw config_error(
                    "variance_bound_form must be 'prior_squared', 'prior', or 'lipschitz'");
            }
        } else if (key == "level") {
            config.interval_level = as<double>(value, "level");
        } else if (key == "coverage_mode") {
            const auto mode = as<std::string>(value, "coverage_mode");
            if (mode == "latent") {
                config.coverage_mode = IntervalMode::Latent;
            } else if (mode == "observation") {
                config.coverage_mode = IntervalMode::Observation;
            } else {
                throw config_error("coverage_mode must be 'latent' or 'observation'");
            }
        } else if (key == "output_dir") {
            config.output_dir = as<std::string>(value, "output_dir");
        } else if (key == "seed") {
            config.base_seed = as<std::uint64_t>(value, "seed");
        } else if (key == "fill") {
            const auto fill = as<std::string>(value, "fill");
            if (fill == "forward") {
                config.fill_forward = true;
            } else if (fill == "none") {
                config.fill_forward = false;
            } else {
                throw config_error("fill must be 'forward' or 'none'");
            }
        } else if (key == "epsilon_floor") {
            config.epsilon_floor = as<double>(value, "epsilon_floor");
        } else if (key == "sweep_windows") {
            config.sweep_windows = as<std::vector<int>>(value, "sweep_windows");
        } else if (key == "sweep_lags") {
            config.sweep_lags = as<std::vector<int>>(value, "sweep_lags");
        } else if (key == "poly_degree") {
            config.poly_degree = as<int>(value, "poly_degree");
        } else if (key == "knn_kappa") {
            config.knn_kappa = as<int>(value, "knn_kappa");
        } else {
            throw config_error("unknown config key '" + key + "'");
        }
    }
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw config_error("cannot open config file '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config file '" + path + "' is not valid JSON: " + e.what());
    }
    apply_config_json(base, j);
    return base;
}

nlohmann::json config_to_json(const RunConfig& config) {
    nlohmann::json j;
    j["input"] = config.input_path;
    j["window"] = config.smoothing_window;
    j["lag"] = config.lag;
    j["noise_variance"] = config.noise_variance;
    j["train_length"] = config.window.train_length;
    j["horizon"] = config.window.horizon;
    j["stride"] = config.window.stride;
    if (config.fixed_signal_variance) {
        j["signal_variance"] = *config.fixed_signal_variance;
        j["length_scale"] = *config.fixed_length_scale;
    }
    j["grid_alpha2_min"] = config.grid.alpha2_min;
    j["grid_alpha2_max"] = config.grid.alpha2_max;
    j["grid_alpha2_count"] = config.grid.alpha2_count;
    j["grid_beta_min"] = config.grid.beta_min;
    j["grid_beta_max"] = config.grid.beta_max;
    j["grid_beta_count"] = config.grid.beta_count;
    j["freeze_hp"] = config.freeze_hp;
    j["tau"] = config.tau;
    j["delta"] = config.delta;
    j["lipschitz_target"] = config.lipschitz_target;
    j["estimate_lipschitz"] = config.estimate_lipschitz;
    j["interval_length"] = config.bound_config().interval_length;
    if (config.radius) {
        j["radius"] = *config.radius;
    }
    j["variance_bound_form"] =
        config.variance_bound_form == VarianceBoundForm::PriorSquared
            ? "prior_squared"
            : (config.variance_bound_form == VarianceBoundForm::Prior ? "prior"
                                                                      : "lipschitz");
    j["level"] = config.interval_level;
    j["coverage_mode"] =
        config.coverage_mode == IntervalMode::Latent ? "latent" : "observation";
    j["output_dir"] = config.output_dir;
    j["seed"] = config.base_seed;
    j["fill"] = config.fill_forward ? "forward" : "none";
    j["epsilon_floor"] = config.epsilon_floor;
    j["sweep_windows"] = config.sweep_windows;
    j["sweep_lags"] = config.sweep_lags;
    j["poly_degree"] = config.poly_degree;
    j["knn_kappa"] = config.knn_kappa;
    return j;
}

} // namespace epigp
