#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "epigp/baselines.hpp"
#include "epigp/bounds.hpp"
#include "epigp/forecast.hpp"

namespace epigp {

inline constexpr const char* kArtifactVersion = "0.1.0";

nlohmann::json records_to_json(std::span<const ForecastRecord> records, Date index_origin);
nlohmann::json metrics_to_json(const Metrics& metrics);

/// One bound report per forecast window, with the per-point absolute errors
/// alongside for plotting.
struct WindowBoundReport {
    int window_index = 0;
    double lipschitz_target = 0.0;
    BoundReport report;
    std::vector<double> test_times;
    std::vector<double> posterior_sd;
    std::vector<double> abs_error;
};

nlohmann::json bound_reports_to_json(std::span<const WindowBoundReport> reports);

nlohmann::json sweep_to_json(std::span<const SweepRow> rows);
std::string sweep_to_csv(std::span<const SweepRow> rows);

nlohmann::json comparison_to_json(std::span<const ComparisonRow> rows);
std::string comparison_to_csv(std::span<const ComparisonRow> rows);

/// Top-level artifact object: {config, <payload_key>: payload, metrics, version}.
nlohmann::json make_artifact(nlohmann::json config, const std::string& payload_key,
                             nlohmann::json payload, nlohmann::json metrics);

/// Serializes with a trailing newline and writes atomically
/// (temp file + rename).
void write_artifact(const std::string& path, const nlohmann::json& artifact);
void write_text_atomic(const std::string& path, const std::string& content);

/// Read-back of an emitted artifact's records, e.g. for plotting or for
/// recomputing metrics.
struct ParsedRecords {
    std::vector<ForecastRecord> records;
    double interval_level = 0.95;
    IntervalMode coverage_mode = IntervalMode::Observation;
};

ParsedRecords parse_records_artifact(const nlohmann::json& artifact);
nlohmann::json read_json_file(const std::string& path);

} // namespace epigp
