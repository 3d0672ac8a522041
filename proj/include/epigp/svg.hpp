#pragma once

#include <span>
#include <string>

#include "epigp/forecast.hpp"

namespace epigp {

/// Self-contained SVG line chart (960x480): the actuals as one path, each
/// window's posterior mean as a path, and one filled band per interval set.
/// An empty record list renders bare axes.
std::string render_forecast_svg(std::span<const ForecastRecord> records,
                                const std::string& title);

} // namespace epigp
