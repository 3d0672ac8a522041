#include "epigp/transform.hpp"

#include <cmath>
#include <cstdio>

#include "epigp/errors.hpp"

namespace epigp {

Date parse_date(const std::string& iso) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char tail = 0;
    if (std::sscanf(iso.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
        throw data_error("malformed date '" + iso + "' (expected YYYY-MM-DD)");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) {
        throw data_error("invalid calendar date '" + iso + "'");
    }
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

void CaseSeries::validate() const {
    if (dates.size() != values.size()) {
        throw data_error("case series dates and values differ in length");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            throw data_error("case series values must be positive (day " +
                             (i < dates.size() ? format_date(dates[i]) : std::to_string(i)) +
                             ")");
        }
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (dates[i] != dates[i - 1] + std::chrono::days{1}) {
            throw data_error("case series must cover consecutive days (gap after " +
                             format_date(dates[i - 1]) + ")");
        }
    }
}

Date DeltaSeries::date_of_index(double index) const {
    return index_origin + std::chrono::days{static_cast<long>(std::llround(index)) - 1};
}

SmoothedSeries rolling_average(const CaseSeries& series, int window) {
    if (window < 1) {
        throw config_error("smoothing window must be positive");
    }
    series.validate();
    if (series.size() < static_cast<std::size_t>(window)) {
        throw data_error("insufficient data for window");
    }
    SmoothedSeries out;
    out.window = window;
    const std::size_t n = series.size();
    const std::size_t w = static_cast<std::size_t>(window);
    out.dates.assign(series.dates.begin() + (w - 1), series.dates.end());
    out.values.reserve(n - w + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += series.values[i];
        if (i + 1 >= w) {
            out.values.push_back(sum / static_cast<double>(window));
            sum -= series.values[i + 1 - w];
        }
    }
    return out;
}

DeltaSeries log_difference(const SmoothedSeries& series, int lag) {
    if (lag < 1) {
        throw config_error("log-difference lag must be positive");
    }
    const std::size_t m = series.size();
    if (m <= static_cast<std::size_t>(lag)) {
        throw data_error("series too short for log-difference lag");
    }
    for (double v : series.values) {
        if (!(v > 0.0)) {
            throw data_error("log-difference requires positive cases");
        }
    }
    DeltaSeries out;
    out.lag = lag;
    out.index_origin = series.dates.empty() ? Date{} : series.dates.front();
    const std::size_t eta = static_cast<std::size_t>(lag);
    out.times.reserve(m - eta);
    out.deltas.reserve(m - eta);
    for (std::size_t i = eta; i < m; ++i) {
        out.times.push_back(static_cast<double>(i + 1)); // first smoothed day is index 1
        out.deltas.push_back(std::log(series.values[i]) - std::log(series.values[i - eta]));
    }
    return out;
}

Trend classify_trend(double delta, double tol) {
    if (tol < 0.0) {
        throw config_error("trend tolerance must be non-negative");
    }
    if (delta > tol) {
        return Trend::Increasing;
    }
    if (delta < -tol) {
        return Trend::Decreasing;
    }
    return Trend::Flat;
}

std::vector<double> reconstruct_cases(std::span<const double> anchor,
                                      std::span<const double> deltas, int lag) {
    if (lag < 1) {
        throw config_error("reconstruction lag must be positive");
    }
    if (anchor.size() < static_cast<std::size_t>(lag)) {
        throw data_error("reconstruction anchor must supply at least lag values");
    }
    for (double v : anchor) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw data_error("reconstruction anchor values must be positive");
        }
    }
    const std::size_t eta = static_cast<std::size_t>(lag);
    // combined holds the last eta anchor values followed by the projections;
    // projection i sits exactly eta steps after combined[i]
    std::vector<double> combined(anchor.end() - static_cast<std::ptrdiff_t>(eta), anchor.end());
    combined.reserve(eta + deltas.size());
    std::vector<double> out;
    out.reserve(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const double projected = combined[i] * std::exp(deltas[i]);
        combined.push_back(projected);
        out.push_back(projected);
    }
    return out;
}

} // namespace epigp
