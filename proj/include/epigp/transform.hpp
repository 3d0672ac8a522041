#pragma once

#include <chrono>
#include <span>
#include <string>
#include <vector>

namespace epigp {

using Date = std::chrono::sys_days;

Date parse_date(const std::string& iso); // "YYYY-MM-DD"
std::string format_date(Date d);

/// Daily observed case rates, strictly positive, consecutive calendar days.
struct CaseSeries {
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const { return dates.size(); }
    void validate() const;
};

/// Trailing w-day rolling average of a CaseSeries; the first w-1 days are
/// dropped, so the value at a kept date averages that date and the w-1
/// preceding ones.
struct SmoothedSeries {
    int window = 1;
    std::vector<Date> dates;
    std::vector<double> values;

    std::size_t size() const { return dates.size(); }
};

/// Lag-eta log-differences of a smoothed series. Day indices follow the
/// smoothed series with its first day as index 1, so deltas start at
/// index eta+1.
struct DeltaSeries {
    int lag = 1;
    std::vector<double> times;  // integer day indices, eta+1 ... smoothed size
    std::vector<double> deltas; // log(I(t)) - log(I(t-eta))
    Date index_origin{};        // calendar date of smoothed day index 1

    std::size_t size() const { return times.size(); }
    Date date_of_index(double index) const;
};

enum class Trend { Increasing, Decreasing, Flat };

SmoothedSeries rolling_average(const CaseSeries& series, int window);

DeltaSeries log_difference(const SmoothedSeries& series, int lag);

/// Sign of a delta against a non-negative tolerance band around zero.
Trend classify_trend(double delta, double tol);

/// Inverts the log-difference: projected(t) = value(t - eta) * exp(delta(t)),
/// chaining recursively past the anchor for horizons longer than eta.
/// `anchor` must supply at least eta smoothed values, the last of which
/// immediately precedes the first forecast time.
std::vector<double> reconstruct_cases(std::span<const double> anchor,
                                      std::span<const double> deltas, int lag);

} // namespace epigp
