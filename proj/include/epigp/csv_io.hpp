#pragma once

#include <string>

#include "epigp/transform.hpp"

namespace epigp {

struct IngestOptions {
    bool fill_forward = false;   // forward-fill missing calendar days
    double epsilon_floor = 0.0;  // > 0: added to every value before validation
};

/// Reads a `date,cases` CSV (ISO-8601 dates, UTF-8, LF or CRLF) into a
/// CaseSeries. Rows are sorted by date; duplicate dates and malformed rows
/// are rejected with the offending line number.
CaseSeries ingest_csv(const std::string& path, const IngestOptions& options = {});

/// RFC-4180 quoting: wraps the field in quotes when it contains a comma,
/// quote, or line break, doubling any embedded quotes.
std::string csv_quote(const std::string& field);

} // namespace epigp
