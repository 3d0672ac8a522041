#include "epigp/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "epigp/errors.hpp"

namespace epigp {

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

double parse_cases(const std::string& field, long line_no) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(field, &consumed);
    } catch (const std::exception&) {
        throw data_error("malformed cases value at line " + std::to_string(line_no));
    }
    if (consumed != field.size() || !std::isfinite(value)) {
        throw data_error("malformed cases value at line " + std::to_string(line_no));
    }
    return value;
}

} // namespace

CaseSeries ingest_csv(const std::string& path, const IngestOptions& options) {
    std::ifstream in(path);
    if (!in) {
        throw data_error("cannot open input file '" + path + "'");
    }

    std::string line;
    if (!std::getline(in, line)) {
        throw data_error("empty input file '" + path + "'");
    }
    if (strip_cr(line) != "date,cases") {
        throw data_error("expected header 'date,cases' in '" + path + "'");
    }

    struct Row {
        Date date;
        double value;
        long line_no;
    };
    std::vector<Row> rows;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw data_error("malformed row at line " + std::to_string(line_no));
        }
        Row row;
        try {
            row.date = parse_date(line.substr(0, comma));
        } catch (const data_error& e) {
            throw data_error(std::string(e.what()) + " at line " + std::to_string(line_no));
        }
        row.value = parse_cases(line.substr(comma + 1), line_no);
        row.line_no = line_no;
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw data_error("no data rows in '" + path + "'");
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].date == rows[i - 1].date) {
            throw data_error("duplicate date " + format_date(rows[i].date) + " at line " +
                             std::to_string(rows[i].line_no));
        }
    }

    if (options.epsilon_floor > 0.0) {
        for (Row& row : rows) {
            row.value += options.epsilon_floor;
        }
    }
    for (const Row& row : rows) {
        if (!(row.value > 0.0)) {
            throw data_error("non-positive cases at line " + std::to_string(row.line_no) +
                             (options.epsilon_floor > 0.0
                                  ? ""
                                  : " (consider --epsilon-floor)"));
        }
    }

    CaseSeries series;
    series.dates.reserve(rows.size());
    series.values.reserve(rows.size());
    for (const Row& row : rows) {
        if (!series.dates.empty()) {
            Date expected = series.dates.back() + std::chrono::days{1};
            if (options.fill_forward) {
                while (expected < row.date) {
                    series.dates.push_back(expected);
                    series.values.push_back(series.values.back());
                    expected += std::chrono::days{1};
                }
            } else if (expected != row.date) {
                throw data_error("missing calendar day " + format_date(expected) +
                                 " before line " + std::to_string(row.line_no) +
                                 " (use --fill=forward to impute)");
            }
        }
        series.dates.push_back(row.date);
        series.values.push_back(row.value);
    }
    series.validate();
    return series;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

} // namespace epigp
