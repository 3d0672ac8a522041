#include "epigp/emit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "epigp/csv_io.hpp"
#include "epigp/errors.hpp"

namespace epigp {

namespace {

nlohmann::json number_or_null(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return nullptr;
}

nlohmann::json intervals_to_json(const std::vector<std::pair<double, double>>& intervals) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [lo, hi] : intervals) {
        out.push_back(nlohmann::json::array({lo, hi}));
    }
    return out;
}

} // namespace

nlohmann::json records_to_json(std::span<const ForecastRecord> records, Date index_origin) {
    nlohmann::json out = nlohmann::json::array();
    for (const ForecastRecord& rec : records) {
        nlohmann::json r;
        r["window_index"] = rec.window_index;
        r["partial"] = rec.partial;
        r["train_times"] = rec.train_times;
        r["test_times"] = rec.test_times;
        nlohmann::json dates = nlohmann::json::array();
        for (double t : rec.test_times) {
            dates.push_back(format_date(index_origin +
                                        std::chrono::days{static_cast<long>(std::llround(t)) - 1}));
        }
        r["test_dates"] = dates;
        r["predicted_mean"] = rec.predicted_mean;
        r["predicted_variance"] = rec.predicted_variance;
        r["interval_level"] = rec.interval_level;
        r["noise_variance"] = rec.noise_variance;
        r["latent_interval"] = intervals_to_json(rec.latent_interval);
        r["observation_interval"] = intervals_to_json(rec.observation_interval);
        r["actuals"] = rec.actuals;
        r["kernel"] = {{"signal_variance", rec.kernel.signal_variance},
                       {"length_scale", rec.kernel.length_scale}};
        out.push_back(std::move(r));
    }
    return out;
}

nlohmann::json metrics_to_json(const Metrics& metrics) {
    nlohmann::json j;
    j["mse"] = metrics.mse;
    j["coverage"] = metrics.coverage;
    nlohmann::json per = nlohmann::json::array();
    for (const WindowMetrics& wm : metrics.per_window) {
        per.push_back({{"window_index", wm.window_index},
                       {"mse", wm.mse},
                       {"coverage", wm.coverage},
                       {"points", wm.points}});
    }
    j["per_window"] = per;
    return j;
}

nlohmann::json bound_reports_to_json(std::span<const WindowBoundReport> reports) {
    nlohmann::json out = nlohmann::json::array();
    for (const WindowBoundReport& wr : reports) {
        nlohmann::json r;
        r["window_index"] = wr.window_index;
        r["gamma"] = wr.report.gamma;
        r["xi"] = wr.report.xi;
        r["covering_number"] = wr.report.covering_number;
        r["lipschitz"] = {{"kernel", wr.report.lipschitz.kernel},
                          {"mean", wr.report.lipschitz.mean},
                          {"variance", wr.report.lipschitz.variance}};
        r["lipschitz_target"] = wr.lipschitz_target;
        r["radius"] = wr.report.radius;
        r["test_times"] = wr.test_times;
        r["posterior_sd"] = wr.posterior_sd;
        r["abs_error"] = wr.abs_error;
        r["per_point_bound"] = wr.report.per_point_bound;
        r["variance_bounds"] = wr.report.variance_bounds;
        out.push_back(std::move(r));
    }
    return out;
}

nlohmann::json sweep_to_json(std::span<const SweepRow> rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const SweepRow& row : rows) {
        out.push_back({{"window", row.window},
                       {"lag", row.lag},
                       {"coverage", number_or_null(row.coverage)},
                       {"mse", number_or_null(row.mse)},
                       {"windows_evaluated", row.windows_evaluated},
                       {"error", row.error.empty() ? nlohmann::json(nullptr)
                                                   : nlohmann::json(row.error)}});
    }
    return out;
}

namespace {

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        return "";
    }
    // shortest representation that round-trips
    const nlohmann::json j = v;
    return j.dump();
}

} // namespace

std::string sweep_to_csv(std::span<const SweepRow> rows) {
    std::ostringstream out;
    out << "window,lag,coverage,mse,windows_evaluated,error\r\n";
    for (const SweepRow& row : rows) {
        out << row.window << ',' << row.lag << ',' << format_double(row.coverage) << ','
            << format_double(row.mse) << ',' << row.windows_evaluated << ','
            << csv_quote(row.error) << "\r\n";
    }
    return out.str();
}

nlohmann::json comparison_to_json(std::span<const ComparisonRow> rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const ComparisonRow& row : rows) {
        out.push_back({{"method", row.method}, {"mse", row.mse}, {"coverage", row.coverage}});
    }
    return out;
}

std::string comparison_to_csv(std::span<const ComparisonRow> rows) {
    std::ostringstream out;
    out << "method,mse,coverage\r\n";
    for (const ComparisonRow& row : rows) {
        out << csv_quote(row.method) << ',' << format_double(row.mse) << ','
            << format_double(row.coverage) << "\r\n";
    }
    return out.str();
}

nlohmann::json make_artifact(nlohmann::json config, const std::string& payload_key,
                             nlohmann::json payload, nlohmann::json metrics) {
    nlohmann::json artifact;
    artifact["version"] = kArtifactVersion;
    artifact["config"] = std::move(config);
    artifact[payload_key] = std::move(payload);
    artifact["metrics"] = std::move(metrics);
    return artifact;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw data_error("cannot write '" + tmp.string() + "'");
        }
        out << content;
        if (!out.flush()) {
            throw data_error("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        throw data_error("cannot move '" + tmp.string() + "' to '" + target.string() + "'");
    }
}

void write_artifact(const std::string& path, const nlohmann::json& artifact) {
    write_text_atomic(path, artifact.dump(2) + "\n");
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open '" + path + "'");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error("'" + path + "' is not valid JSON: " + e.what());
    }
    return j;
}

ParsedRecords parse_records_artifact(const nlohmann::json& artifact) {
    ParsedRecords parsed;
    if (!artifact.contains("records") || !artifact["records"].is_array()) {
        throw data_error("artifact is missing a records array");
    }
    if (artifact.contains("config") && artifact["config"].contains("coverage_mode")) {
        parsed.coverage_mode =
            artifact["config"]["coverage_mode"].get<std::string>() == "latent"
                ? IntervalMode::Latent
                : IntervalMode::Observation;
    }
    try {
        for (const auto& r : artifact["records"]) {
            ForecastRecord rec;
            rec.window_index = r.at("window_index").get<int>();
            rec.partial = r.at("partial").get<bool>();
            rec.train_times = r.at("train_times").get<std::vector<double>>();
            rec.test_times = r.at("test_times").get<std::vector<double>>();
            rec.predicted_mean = r.at("predicted_mean").get<std::vector<double>>();
            rec.predicted_variance = r.at("predicted_variance").get<std::vector<double>>();
            rec.interval_level = r.at("interval_level").get<double>();
            rec.noise_variance = r.at("noise_variance").get<double>();
            for (const auto& pair : r.at("latent_interval")) {
                rec.latent_interval.emplace_back(pair.at(0).get<double>(),
                                                 pair.at(1).get<double>());
            }
            for (const auto& pair : r.at("observation_interval")) {
                rec.observation_interval.emplace_back(pair.at(0).get<double>(),
                                                      pair.at(1).get<double>());
            }
            rec.actuals = r.at("actuals").get<std::vector<double>>();
            rec.kernel.signal_variance = r.at("kernel").at("signal_variance").get<double>();
            rec.kernel.length_scale = r.at("kernel").at("length_scale").get<double>();
            parsed.interval_level = rec.interval_level;
            parsed.records.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("malformed records artifact: ") + e.what());
    }
    return parsed;
}

} // namespace epigp
