#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "epigp/baselines.hpp"
#include "epigp/bounds.hpp"
#include "epigp/config.hpp"
#include "epigp/csv_io.hpp"
#include "epigp/emit.hpp"
#include "epigp/errors.hpp"
#include "epigp/forecast.hpp"
#include "epigp/svg.hpp"
#include "epigp/transform.hpp"

namespace {

using namespace epigp;

struct Pipeline {
    CaseSeries raw;
    SmoothedSeries smoothed;
    DeltaSeries deltas;
};

Pipeline build_pipeline(const RunConfig& config) {
    Pipeline p;
    p.raw = ingest_csv(config.input_path, {config.fill_forward, config.epsilon_floor});
    p.smoothed = rolling_average(p.raw, config.smoothing_window);
    p.deltas = log_difference(p.smoothed, config.lag);
    return p;
}

std::string out_path(const RunConfig& config, const std::string& name) {
    return (std::filesystem::path(config.output_dir) / name).string();
}

int cmd_fit(const RunConfig& config) {
    const Pipeline p = build_pipeline(config);
    const ForecastRecord record = run_in_sample_fit(p.deltas, config.hyper_policy(),
                                                    config.noise_model(),
                                                    config.interval_level);
    const std::vector<ForecastRecord> records{record};
    const Metrics metrics =
        compute_metrics(records, config.interval_level, config.coverage_mode);
    const auto artifact =
        make_artifact(config_to_json(config), "records",
                      records_to_json(records, p.deltas.index_origin),
                      metrics_to_json(metrics));
    const std::string path = out_path(config, "fit.json");
    write_artifact(path, artifact);
    std::cout << "fit: n=" << record.actuals.size() << " coverage=" << metrics.coverage
              << " mse=" << metrics.mse << " -> " << path << "\n";
    return 0;
}

int cmd_predict(const RunConfig& config) {
    const Pipeline p = build_pipeline(config);
    const auto records = run_moving_window(p.deltas, config.window, config.hyper_policy(),
                                           config.noise_model(), config.interval_level);
    const Metrics metrics =
        compute_metrics(records, config.interval_level, config.coverage_mode);
    const auto artifact =
        make_artifact(config_to_json(config), "records",
                      records_to_json(records, p.deltas.index_origin),
                      metrics_to_json(metrics));
    const std::string path = out_path(config, "predict.json");
    write_artifact(path, artifact);
    std::cout << "predict: windows=" << records.size() << " coverage=" << metrics.coverage
              << " mse=" << metrics.mse << " -> " << path << "\n";
    return 0;
}

TrainSet train_set_for_record(const DeltaSeries& deltas, const ForecastRecord& rec) {
    TrainSet train;
    train.times = rec.train_times;
    train.targets.reserve(rec.train_times.size());
    for (double t : rec.train_times) {
        const auto it = std::lower_bound(deltas.times.begin(), deltas.times.end(), t);
        if (it == deltas.times.end() || *it != t) {
            throw data_error("record train time not found in delta series");
        }
        train.targets.push_back(
            deltas.deltas[static_cast<std::size_t>(it - deltas.times.begin())]);
    }
    return train;
}

double lipschitz_heuristic(const TrainSet& train) {
    double max_step = 0.0;
    for (std::size_t i = 1; i < train.targets.size(); ++i) {
        const double dt = train.times[i] - train.times[i - 1];
        if (dt > 0.0) {
            max_step = std::max(max_step,
                                std::abs(train.targets[i] - train.targets[i - 1]) / dt);
        }
    }
    return max_step;
}

int cmd_bounds(const RunConfig& config) {
    const Pipeline p = build_pipeline(config);
    const auto records = run_moving_window(p.deltas, config.window, config.hyper_policy(),
                                           config.noise_model(), config.interval_level);
    const NoiseModel noise = config.noise_model();

    std::vector<WindowBoundReport> reports;
    reports.reserve(records.size());
    for (const ForecastRecord& rec : records) {
        const TrainSet train = train_set_for_record(p.deltas, rec);
        BoundConfig bc = config.bound_config();
        if (config.estimate_lipschitz) {
            bc.lipschitz_target = lipschitz_heuristic(train);
        }
        Posterior post;
        post.test_times = rec.test_times;
        post.mean = rec.predicted_mean;
        post.variance = rec.predicted_variance;
        post.log_marginal_likelihood = 0.0;

        WindowBoundReport wr;
        wr.window_index = rec.window_index;
        wr.lipschitz_target = bc.lipschitz_target;
        wr.report = error_bound(post, bc, rec.kernel, noise, train,
                                config.variance_bound_form);
        wr.test_times = rec.test_times;
        wr.posterior_sd.reserve(rec.predicted_variance.size());
        wr.abs_error.reserve(rec.predicted_variance.size());
        for (std::size_t i = 0; i < rec.predicted_variance.size(); ++i) {
            wr.posterior_sd.push_back(std::sqrt(rec.predicted_variance[i]));
            wr.abs_error.push_back(std::abs(rec.actuals[i] - rec.predicted_mean[i]));
        }
        reports.push_back(std::move(wr));
    }

    const Metrics metrics =
        compute_metrics(records, config.interval_level, config.coverage_mode);
    const auto artifact = make_artifact(config_to_json(config), "report",
                                        bound_reports_to_json(reports),
                                        metrics_to_json(metrics));
    const std::string path = out_path(config, "bounds.json");
    write_artifact(path, artifact);
    std::cout << "bounds: windows=" << reports.size()
              << " gamma=" << (reports.empty() ? 0.0 : reports.front().report.gamma)
              << " -> " << path << "\n";
    return 0;
}

int cmd_baseline(const RunConfig& config) {
    const Pipeline p = build_pipeline(config);
    const auto gpr_records =
        run_moving_window(p.deltas, config.window, config.hyper_policy(),
                          config.noise_model(), config.interval_level);
    const Metrics gpr_metrics =
        compute_metrics(gpr_records, config.interval_level, config.coverage_mode);

    const auto poly_records =
        run_moving_window_baseline(p.deltas, config.window, BaselineKind::Polynomial,
                                   config.poly_degree, config.interval_level);
    const auto knn_records =
        run_moving_window_baseline(p.deltas, config.window, BaselineKind::Knn,
                                   config.knn_kappa, config.interval_level);

    const MethodMetrics gpr{"gpr", gpr_metrics};
    const std::vector<MethodMetrics> baselines{
        {"poly-" + std::to_string(config.poly_degree), baseline_metrics(poly_records)},
        {"knn-" + std::to_string(config.knn_kappa), baseline_metrics(knn_records)}};
    const auto table = compare(gpr, baselines);

    const auto artifact = make_artifact(config_to_json(config), "table",
                                        comparison_to_json(table),
                                        metrics_to_json(gpr_metrics));
    const std::string json_path = out_path(config, "baseline.json");
    write_artifact(json_path, artifact);
    const std::string csv_path = out_path(config, "baseline.csv");
    write_text_atomic(csv_path, comparison_to_csv(table));
    std::cout << "baseline: methods=" << table.size() << " -> " << json_path << ", "
              << csv_path << "\n";
    return 0;
}

int cmd_sensitivity(const RunConfig& config) {
    const CaseSeries raw =
        ingest_csv(config.input_path, {config.fill_forward, config.epsilon_floor});
    const auto rows =
        sensitivity_sweep(raw, config.sweep_windows, config.sweep_lags, config.window,
                          config.noise_model(), config.hyper_policy(),
                          config.interval_level, config.coverage_mode);
    const auto artifact = make_artifact(config_to_json(config), "table",
                                        sweep_to_json(rows), nlohmann::json(nullptr));
    const std::string json_path = out_path(config, "sensitivity.json");
    write_artifact(json_path, artifact);
    const std::string csv_path = out_path(config, "sensitivity.csv");
    write_text_atomic(csv_path, sweep_to_csv(rows));
    std::cout << "sensitivity: cells=" << rows.size() << " -> " << json_path << ", "
              << csv_path << "\n";
    return 0;
}

int cmd_plot(const RunConfig& config, std::string records_path, std::string svg_path) {
    if (records_path.empty()) {
        records_path = out_path(config, "predict.json");
    }
    if (svg_path.empty()) {
        svg_path = out_path(config, "plot.svg");
    }
    const auto artifact = read_json_file(records_path);
    const ParsedRecords parsed = parse_records_artifact(artifact);
    const std::string svg = render_forecast_svg(
        parsed.records, std::filesystem::path(records_path).filename().string());
    write_text_atomic(svg_path, svg);
    std::cout << "plot: records=" << parsed.records.size() << " -> " << svg_path << "\n";
    return 0;
}

void emit_error(int code, const std::string& message) {
    nlohmann::json j;
    j["error"] = {{"code", code}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian-process toolkit for epidemic trend modeling and forecasting"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "flat JSON config file; flags override it");

    RunConfig flags; // holds parsed flag values before merging
    std::string coverage_mode = "observation";
    std::string fill = "none";
    double fixed_alpha2 = 0.0;
    double fixed_beta = 0.0;
    double interval_length = 0.0;
    double radius = 0.0;

    auto* o_input = app.add_option("-i,--input", flags.input_path, "input CSV (date,cases)");
    auto* o_window = app.add_option("-w,--window", flags.smoothing_window,
                                    "trailing rolling-average window, days");
    auto* o_lag = app.add_option("--lag", flags.lag, "log-difference lag, days");
    auto* o_noise = app.add_option("--noise-variance", flags.noise_variance,
                                   "observation noise variance");
    auto* o_train = app.add_option("--train-length", flags.window.train_length,
                                   "moving-window training length, days");
    auto* o_horizon = app.add_option("--horizon", flags.window.horizon,
                                     "forecast horizon, days");
    auto* o_stride = app.add_option("--stride", flags.window.stride,
                                    "window stride, days (default: horizon)");
    auto* o_alpha2 = app.add_option("--signal-variance", fixed_alpha2,
                                    "fixed kernel signal variance (with --length-scale)");
    auto* o_beta = app.add_option("--length-scale", fixed_beta,
                                  "fixed kernel length scale (with --signal-variance)");
    auto* o_ga_min = app.add_option("--grid-alpha2-min", flags.grid.alpha2_min, "");
    auto* o_ga_max = app.add_option("--grid-alpha2-max", flags.grid.alpha2_max, "");
    auto* o_ga_count = app.add_option("--grid-alpha2-count", flags.grid.alpha2_count, "");
    auto* o_gb_min = app.add_option("--grid-beta-min", flags.grid.beta_min, "");
    auto* o_gb_max = app.add_option("--grid-beta-max", flags.grid.beta_max, "");
    auto* o_gb_count = app.add_option("--grid-beta-count", flags.grid.beta_count, "");
    auto* o_freeze = app.add_flag("--freeze-hp", flags.freeze_hp,
                                  "select hyperparameters once on the first window");
    auto* o_tau = app.add_option("--tau", flags.tau, "covering radius tau, days");
    auto* o_delta = app.add_option("--delta", flags.delta, "failure probability");
    auto* o_lip = app.add_option("--lipschitz-target", flags.lipschitz_target,
                                 "Lipschitz constant of the true trend");
    auto* o_est_lip = app.add_flag("--estimate-lipschitz", flags.estimate_lipschitz,
                                   "heuristic per-window estimate of the trend Lipschitz "
                                   "constant (max successive delta slope)");
    auto* o_ilen = app.add_option("--interval-length", interval_length,
                                  "time-interval length for the error bound "
                                  "(default: train-length + horizon)");
    auto* o_radius = app.add_option("--radius", radius,
                                    "variance-bound ball radius "
                                    "(default: length_scale * sqrt(e))");
    std::string vb_form = "prior_squared";
    auto* o_vbform = app.add_option("--variance-bound-form", vb_form,
                                    "prior_squared | prior | lipschitz")
                         ->check(CLI::IsMember({"prior_squared", "prior", "lipschitz"}));
    auto* o_level = app.add_option("--level", flags.interval_level, "confidence level");
    auto* o_mode = app.add_option("--coverage-mode", coverage_mode,
                                  "latent | observation")
                       ->check(CLI::IsMember({"latent", "observation"}));
    auto* o_outdir = app.add_option("-o,--output-dir", flags.output_dir, "output directory");
    auto* o_seed = app.add_option("--seed", flags.base_seed, "base random seed");
    auto* o_fill = app.add_option("--fill", fill, "forward | none: fill calendar gaps")
                       ->check(CLI::IsMember({"forward", "none"}));
    auto* o_floor = app.add_option("--epsilon-floor", flags.epsilon_floor,
                                   "constant added to raw cases before transforms");
    auto* o_sw = app.add_option("--sweep-windows", flags.sweep_windows,
                                "smoothing windows for the sensitivity sweep");
    auto* o_sl = app.add_option("--sweep-lags", flags.sweep_lags,
                                "lags for the sensitivity sweep");
    auto* o_pdeg = app.add_option("--poly-degree", flags.poly_degree,
                                  "polynomial baseline degree");
    auto* o_kappa = app.add_option("--knn-kappa", flags.knn_kappa,
                                   "k-nearest-neighbors baseline kappa");

    auto* sub_fit = app.add_subcommand("fit", "in-sample GP fit over the full series");
    auto* sub_predict =
        app.add_subcommand("predict", "moving-window forecasts with intervals");
    auto* sub_bounds =
        app.add_subcommand("bounds", "error-bound report per forecast window");
    auto* sub_baseline =
        app.add_subcommand("baseline", "compare GPR with polynomial and KNN baselines");
    auto* sub_sensitivity =
        app.add_subcommand("sensitivity", "coverage/MSE sweep over windows and lags");
    auto* sub_plot = app.add_subcommand("plot", "render an emitted record set to SVG");
    std::string plot_records;
    std::string plot_out;
    sub_plot->add_option("-r,--records", plot_records,
                         "records artifact to plot (default: <output-dir>/predict.json)");
    sub_plot->add_option("--out", plot_out, "SVG path (default: <output-dir>/plot.svg)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        emit_error(2, e.what());
        return 2;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) {
            config = load_config_file(config_path);
        }
        const auto take = [](const CLI::Option* opt, auto& dst, const auto& src) {
            if (opt->count() > 0) {
                dst = src;
            }
        };
        take(o_input, config.input_path, flags.input_path);
        take(o_window, config.smoothing_window, flags.smoothing_window);
        take(o_lag, config.lag, flags.lag);
        take(o_noise, config.noise_variance, flags.noise_variance);
        take(o_train, config.window.train_length, flags.window.train_length);
        if (o_horizon->count() > 0) {
            config.window.horizon = flags.window.horizon;
            if (o_stride->count() == 0) {
                config.window.stride = flags.window.horizon;
            }
        }
        take(o_stride, config.window.stride, flags.window.stride);
        if (o_alpha2->count() > 0) {
            config.fixed_signal_variance = fixed_alpha2;
        }
        if (o_beta->count() > 0) {
            config.fixed_length_scale = fixed_beta;
        }
        take(o_ga_min, config.grid.alpha2_min, flags.grid.alpha2_min);
        take(o_ga_max, config.grid.alpha2_max, flags.grid.alpha2_max);
        take(o_ga_count, config.grid.alpha2_count, flags.grid.alpha2_count);
        take(o_gb_min, config.grid.beta_min, flags.grid.beta_min);
        take(o_gb_max, config.grid.beta_max, flags.grid.beta_max);
        take(o_gb_count, config.grid.beta_count, flags.grid.beta_count);
        take(o_freeze, config.freeze_hp, flags.freeze_hp);
        take(o_tau, config.tau, flags.tau);
        take(o_delta, config.delta, flags.delta);
        take(o_lip, config.lipschitz_target, flags.lipschitz_target);
        take(o_est_lip, config.estimate_lipschitz, flags.estimate_lipschitz);
        if (o_ilen->count() > 0) {
            config.interval_length = interval_length;
        }
        if (o_radius->count() > 0) {
            config.radius = radius;
        }
        if (o_vbform->count() > 0) {
            config.variance_bound_form =
                vb_form == "prior_squared"
                    ? VarianceBoundForm::PriorSquared
                    : (vb_form == "prior" ? VarianceBoundForm::Prior
                                          : VarianceBoundForm::Lipschitz);
        }
        take(o_level, config.interval_level, flags.interval_level);
        if (o_mode->count() > 0) {
            config.coverage_mode = coverage_mode == "latent" ? IntervalMode::Latent
                                                             : IntervalMode::Observation;
        }
        take(o_outdir, config.output_dir, flags.output_dir);
        take(o_seed, config.base_seed, flags.base_seed);
        if (o_fill->count() > 0) {
            config.fill_forward = fill == "forward";
        }
        take(o_floor, config.epsilon_floor, flags.epsilon_floor);
        take(o_sw, config.sweep_windows, flags.sweep_windows);
        take(o_sl, config.sweep_lags, flags.sweep_lags);
        take(o_pdeg, config.poly_degree, flags.poly_degree);
        take(o_kappa, config.knn_kappa, flags.knn_kappa);

        config.validate();

        if (sub_fit->parsed()) {
            return cmd_fit(config);
        }
        if (sub_predict->parsed()) {
            return cmd_predict(config);
        }
        if (sub_bounds->parsed()) {
            return cmd_bounds(config);
        }
        if (sub_baseline->parsed()) {
            return cmd_baseline(config);
        }
        if (sub_sensitivity->parsed()) {
            return cmd_sensitivity(config);
        }
        if (sub_plot->parsed()) {
            return cmd_plot(config, plot_records, plot_out);
        }
        emit_error(2, "no subcommand given");
        return 2;
    } catch (const config_error& e) {
        emit_error(2, e.what());
        return 2;
    } catch (const data_error& e) {
        emit_error(3, e.what());
        return 3;
    } catch (const numeric_error& e) {
        emit_error(4, e.what());
        return 4;
    } catch (const std::exception& e) {
        emit_error(4, e.what());
        return 4;
    }
}
