#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "epigp/config.hpp"
#include "epigp/csv_io.hpp"
#include "epigp/emit.hpp"
#include "epigp/errors.hpp"
#include "epigp/forecast.hpp"
#include "epigp/svg.hpp"

using namespace epigp;
using Catch::Approx;

namespace {

struct TempFile {
    std::filesystem::path path;

    explicit TempFile(const std::string& name, const std::string& content) {
        path = std::filesystem::temp_directory_path() / name;
        std::ofstream out(path, std::ios::binary);
        out << content;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
};

// minimal well-formedness scan: every tag closes, properly nested
bool xml_well_formed(const std::string& xml) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    while (i < xml.size()) {
        if (xml[i] != '<') {
            ++i;
            continue;
        }
        const std::size_t end = xml.find('>', i);
        if (end == std::string::npos) {
            return false;
        }
        std::string tag = xml.substr(i + 1, end - i - 1);
        i = end + 1;
        if (tag.empty()) {
            return false;
        }
        if (tag.front() == '?' || tag.front() == '!') {
            continue; // declaration or comment
        }
        if (tag.front() == '/') {
            if (stack.empty()) {
                return false;
            }
            const std::string name = tag.substr(1);
            if (stack.back() != name) {
                return false;
            }
            stack.pop_back();
            continue;
        }
        if (tag.back() == '/') {
            continue; // self-closing
        }
        stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
    }
    return stack.empty();
}

std::vector<ForecastRecord> tiny_records() {
    ForecastRecord rec;
    rec.window_index = 0;
    rec.partial = false;
    rec.train_times = {8.0, 9.0, 10.0};
    rec.test_times = {11.0, 12.0};
    rec.predicted_mean = {0.1, 0.2};
    rec.predicted_variance = {0.01, 0.02};
    rec.interval_level = 0.95;
    rec.noise_variance = 0.002;
    rec.latent_interval = {{-0.1, 0.3}, {-0.08, 0.48}};
    rec.observation_interval = {{-0.2, 0.4}, {-0.15, 0.55}};
    rec.actuals = {0.12, 0.4};
    rec.kernel = {1.0, 10.0};
    return {rec};
}

} // namespace

TEST_CASE("csv ingestion") {
    SECTION("two rows parse") {
        TempFile f("epigp_two.csv", "date,cases\n2022-03-01,100\n2022-03-02,110\n");
        const CaseSeries s = ingest_csv(f.path.string());
        REQUIRE(s.size() == 2u);
        CHECK(s.values[0] == 100.0);
        CHECK(format_date(s.dates[1]) == "2022-03-02");
    }
    SECTION("crlf and unsorted rows are accepted") {
        TempFile f("epigp_crlf.csv",
                   "date,cases\r\n2022-03-02,110\r\n2022-03-01,100\r\n");
        const CaseSeries s = ingest_csv(f.path.string());
        REQUIRE(s.size() == 2u);
        CHECK(s.values[0] == 100.0);
    }
    SECTION("duplicate dates name the offending line") {
        TempFile f("epigp_dup.csv",
                   "date,cases\n2022-03-01,100\n2022-03-02,110\n2022-03-02,120\n");
        CHECK_THROWS_WITH(ingest_csv(f.path.string()),
                          Catch::Matchers::ContainsSubstring("duplicate date") &&
                              Catch::Matchers::ContainsSubstring("line 4"));
    }
    SECTION("malformed rows name the line") {
        TempFile f("epigp_bad.csv", "date,cases\n2022-03-01,abc\n");
        CHECK_THROWS_WITH(ingest_csv(f.path.string()),
                          Catch::Matchers::ContainsSubstring("line 2"));
        TempFile g("epigp_bad2.csv", "date,cases\n2022-13-01,5\n");
        CHECK_THROWS_WITH(ingest_csv(g.path.string()),
                          Catch::Matchers::ContainsSubstring("line 2"));
    }
    SECTION("calendar gaps are rejected unless forward-filled") {
        TempFile f("epigp_gap.csv", "date,cases\n2022-03-01,100\n2022-03-04,130\n");
        CHECK_THROWS_AS(ingest_csv(f.path.string()), data_error);
        const CaseSeries s = ingest_csv(f.path.string(), {.fill_forward = true});
        REQUIRE(s.size() == 4u);
        CHECK(s.values[1] == 100.0); // filled
        CHECK(s.values[2] == 100.0);
        CHECK(s.values[3] == 130.0);
    }
    SECTION("non-positive cases need the epsilon floor") {
        TempFile f("epigp_zero.csv", "date,cases\n2022-03-01,0\n2022-03-02,5\n");
        CHECK_THROWS_AS(ingest_csv(f.path.string()), data_error);
        const CaseSeries s = ingest_csv(f.path.string(), {.epsilon_floor = 0.5});
        CHECK(s.values[0] == 0.5);
        CHECK(s.values[1] == 5.5);
    }
    SECTION("missing header or file") {
        TempFile f("epigp_hdr.csv", "day,count\n2022-03-01,100\n");
        CHECK_THROWS_AS(ingest_csv(f.path.string()), data_error);
        CHECK_THROWS_AS(ingest_csv("/nonexistent/file.csv"), data_error);
    }
}

#ifdef EPIGP_FIXTURE_PATH
TEST_CASE("bundled fixture") {
    if (!std::filesystem::exists(EPIGP_FIXTURE_PATH)) {
        SUCCEED("fixture not present");
        return;
    }
    const CaseSeries s = ingest_csv(EPIGP_FIXTURE_PATH);
    // calendar days from 2022-03-01 through 2023-02-28, inclusive
    CHECK(s.size() == 365u);
    CHECK(format_date(s.dates.front()) == "2022-03-01");
    CHECK(format_date(s.dates.back()) == "2023-02-28");
    for (double v : s.values) {
        CHECK(v > 0.0);
    }
}
#endif

TEST_CASE("csv quoting") {
    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_quote("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("run config") {
    SECTION("defaults validate") {
        RunConfig config;
        CHECK_NOTHROW(config.validate());
        CHECK(config.bound_config().interval_length == 50.0);
    }
    SECTION("unknown keys are rejected") {
        RunConfig config;
        CHECK_THROWS_WITH(apply_config_json(config, {{"not_a_key", 1}}),
                          Catch::Matchers::ContainsSubstring("unknown config key"));
    }
    SECTION("type errors are rejected") {
        RunConfig config;
        CHECK_THROWS_AS(apply_config_json(config, {{"lag", "seven"}}), config_error);
    }
    SECTION("values apply and horizon drags the stride") {
        RunConfig config;
        apply_config_json(config, {{"lag", 14},
                                   {"horizon", 10},
                                   {"noise_variance", 0.01},
                                   {"coverage_mode", "latent"}});
        CHECK(config.lag == 14);
        CHECK(config.window.horizon == 10);
        CHECK(config.window.stride == 10);
        CHECK(config.noise_variance == 0.01);
        CHECK(config.coverage_mode == IntervalMode::Latent);
    }
    SECTION("fixed kernel needs both halves") {
        RunConfig config;
        apply_config_json(config, {{"signal_variance", 1.0}});
        CHECK_THROWS_AS(config.validate(), config_error);
        apply_config_json(config, {{"length_scale", 10.0}});
        CHECK_NOTHROW(config.validate());
        CHECK(config.hyper_policy().fixed.has_value());
    }
    SECTION("config json round-trips through apply") {
        RunConfig config;
        config.smoothing_window = 10;
        config.sweep_lags = {1, 3};
        const nlohmann::json j = config_to_json(config);
        RunConfig restored;
        apply_config_json(restored, j);
        CHECK(restored.smoothing_window == 10);
        CHECK(restored.sweep_lags == std::vector<int>{1, 3});
        CHECK(config_to_json(restored) == j);
    }
}

TEST_CASE("artifact emission round-trips") {
    const auto records = tiny_records();
    const Metrics metrics = compute_metrics(records, 0.95, IntervalMode::Observation);
    RunConfig config;
    const auto artifact =
        make_artifact(config_to_json(config), "records",
                      records_to_json(records, parse_date("2022-03-30")),
                      metrics_to_json(metrics));

    SECTION("records parse back identically") {
        const ParsedRecords parsed = parse_records_artifact(artifact);
        REQUIRE(parsed.records.size() == 1u);
        const ForecastRecord& rec = parsed.records[0];
        CHECK(rec.test_times == records[0].test_times);
        CHECK(rec.predicted_mean == records[0].predicted_mean);
        CHECK(rec.predicted_variance == records[0].predicted_variance);
        CHECK(rec.actuals == records[0].actuals);
        CHECK(rec.noise_variance == records[0].noise_variance);
        CHECK(parsed.coverage_mode == IntervalMode::Observation);
    }
    SECTION("metrics recomputed from parsed records match exactly") {
        const ParsedRecords parsed = parse_records_artifact(artifact);
        const Metrics again =
            compute_metrics(parsed.records, parsed.interval_level, parsed.coverage_mode);
        CHECK(again.mse == metrics.mse);
        CHECK(again.coverage == metrics.coverage);
        CHECK(metrics_to_json(again) == artifact["metrics"]);
    }
    SECTION("serialization is byte-stable") {
        CHECK(artifact.dump(2) == artifact.dump(2));
        const auto reparsed = nlohmann::json::parse(artifact.dump(2));
        CHECK(reparsed == artifact);
    }
    SECTION("test dates map day indices onto the calendar") {
        CHECK(artifact["records"][0]["test_dates"][0] == "2022-04-09"); // index 11
    }
    SECTION("atomic write leaves no temp file") {
        const auto dir = std::filesystem::temp_directory_path() / "epigp_emit_test";
        std::filesystem::remove_all(dir);
        const std::string path = (dir / "out.json").string();
        write_artifact(path, artifact);
        CHECK(std::filesystem::exists(path));
        CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
        CHECK(read_json_file(path) == artifact);
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("table serialization") {
    SECTION("sweep csv") {
        std::vector<SweepRow> rows;
        rows.push_back({30, 7, 0.9429, 0.0011, 15, ""});
        SweepRow failed;
        failed.window = 400;
        failed.lag = 7;
        failed.coverage = std::numeric_limits<double>::quiet_NaN();
        failed.mse = std::numeric_limits<double>::quiet_NaN();
        failed.error = "insufficient data for window";
        rows.push_back(failed);

        const std::string csv = sweep_to_csv(rows);
        CHECK(csv.find("window,lag,coverage,mse,windows_evaluated,error\r\n") == 0);
        CHECK(csv.find("30,7,0.9429,0.0011,15,\r\n") != std::string::npos);
        CHECK(csv.find("400,7,,,0,insufficient data for window\r\n") != std::string::npos);

        const auto j = sweep_to_json(rows);
        CHECK(j[0]["error"].is_null());
        CHECK(j[1]["coverage"].is_null());
        CHECK(j[1]["error"] == "insufficient data for window");
    }
    SECTION("comparison csv quotes as needed") {
        const std::vector<ComparisonRow> rows{{"gpr", 0.0011, 0.9429},
                                              {"knn,3", 0.0046, 0.51}};
        const std::string csv = comparison_to_csv(rows);
        CHECK(csv.find("method,mse,coverage\r\n") == 0);
        CHECK(csv.find("\"knn,3\"") != std::string::npos);
    }
}

TEST_CASE("svg rendering") {
    SECTION("empty record set renders bare axes") {
        const std::vector<ForecastRecord> none;
        const std::string svg = render_forecast_svg(none, "empty");
        CHECK(svg.find("<?xml") == 0);
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("viewBox=\"0 0 960 480\"") != std::string::npos);
        CHECK(xml_well_formed(svg));
        CHECK(svg.find("<path") == std::string::npos);
    }
    SECTION("records render bands, means, and the observed series") {
        const auto records = tiny_records();
        const std::string svg = render_forecast_svg(records, "forecast");
        CHECK(xml_well_formed(svg));
        std::size_t paths = 0;
        for (std::size_t pos = svg.find("<path"); pos != std::string::npos;
             pos = svg.find("<path", pos + 1)) {
            ++paths;
        }
        // two bands and one mean per record, plus the observed series
        CHECK(paths == 4u);
        CHECK(svg.find("fill-opacity") != std::string::npos);
    }
}
