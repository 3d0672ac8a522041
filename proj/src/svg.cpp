#include "epigp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace epigp {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 32.0;
constexpr double kMarginBottom = 40.0;

struct Extent {
    double x_min = 0.0, x_max = 1.0;
    double y_min = -1.0, y_max = 1.0;
    bool has_data = false;

    void include(double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) {
            return;
        }
        if (!has_data) {
            x_min = x_max = x;
            y_min = y_max = y;
            has_data = true;
            return;
        }
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
    }
};

struct Mapper {
    Extent e;

    double x(double v) const {
        const double span = e.x_max > e.x_min ? e.x_max - e.x_min : 1.0;
        return kMarginLeft + (v - e.x_min) / span * (kWidth - kMarginLeft - kMarginRight);
    }
    double y(double v) const {
        const double span = e.y_max > e.y_min ? e.y_max - e.y_min : 1.0;
        return kHeight - kMarginBottom -
               (v - e.y_min) / span * (kHeight - kMarginTop - kMarginBottom);
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string path_data(const Mapper& map, std::span<const double> xs,
                      std::span<const double> ys) {
    std::string d;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        d += (i == 0 ? "M" : " L");
        d += fmt(map.x(xs[i]));
        d += ' ';
        d += fmt(map.y(ys[i]));
    }
    return d;
}

std::string band_data(const Mapper& map, std::span<const double> xs,
                      const std::vector<std::pair<double, double>>& band) {
    std::string d;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        d += (i == 0 ? "M" : " L");
        d += fmt(map.x(xs[i]));
        d += ' ';
        d += fmt(map.y(band[i].second));
    }
    for (std::size_t i = xs.size(); i-- > 0;) {
        d += " L";
        d += fmt(map.x(xs[i]));
        d += ' ';
        d += fmt(map.y(band[i].first));
    }
    d += " Z";
    return d;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

std::string render_forecast_svg(std::span<const ForecastRecord> records,
                                const std::string& title) {
    Extent extent;
    for (const ForecastRecord& rec : records) {
        for (std::size_t i = 0; i < rec.test_times.size(); ++i) {
            extent.include(rec.test_times[i], rec.actuals[i]);
            extent.include(rec.test_times[i], rec.predicted_mean[i]);
            extent.include(rec.test_times[i], rec.observation_interval[i].first);
            extent.include(rec.test_times[i], rec.observation_interval[i].second);
        }
    }
    const Mapper map{extent};

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 480\" "
           "width=\"960\" height=\"480\">\n";
    svg << "  <rect x=\"0\" y=\"0\" width=\"960\" height=\"480\" fill=\"white\"/>\n";
    svg << "  <text x=\"480\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"14\">"
        << escape_xml(title) << "</text>\n";

    // axes
    svg << "  <line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(kMarginTop)
        << "\" x2=\"" << fmt(kMarginLeft) << "\" y2=\"" << fmt(kHeight - kMarginBottom)
        << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(kHeight - kMarginBottom)
        << "\" x2=\"" << fmt(kWidth - kMarginRight) << "\" y2=\""
        << fmt(kHeight - kMarginBottom) << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = extent.x_min + (extent.x_max - extent.x_min) * i / 4.0;
        const double fy = extent.y_min + (extent.y_max - extent.y_min) * i / 4.0;
        svg << "  <text x=\"" << fmt(map.x(fx)) << "\" y=\"" << fmt(kHeight - kMarginBottom + 16)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
            << fmt(fx) << "</text>\n";
        svg << "  <text x=\"" << fmt(kMarginLeft - 6) << "\" y=\"" << fmt(map.y(fy) + 3)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << fmt(fy) << "</text>\n";
    }

    for (const ForecastRecord& rec : records) {
        if (rec.test_times.empty()) {
            continue;
        }
        svg << "  <path d=\"" << band_data(map, rec.test_times, rec.observation_interval)
            << "\" fill=\"#f4c7c3\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";
        svg << "  <path d=\"" << band_data(map, rec.test_times, rec.latent_interval)
            << "\" fill=\"#ea9999\" fill-opacity=\"0.6\" stroke=\"none\"/>\n";
        svg << "  <path d=\"" << path_data(map, rec.test_times, rec.predicted_mean)
            << "\" fill=\"none\" stroke=\"#cc0000\" stroke-width=\"1.5\"/>\n";
    }

    // observed series across all windows, one path
    std::vector<double> xs;
    std::vector<double> ys;
    for (const ForecastRecord& rec : records) {
        xs.insert(xs.end(), rec.test_times.begin(), rec.test_times.end());
        ys.insert(ys.end(), rec.actuals.begin(), rec.actuals.end());
    }
    if (!xs.empty()) {
        svg << "  <path d=\"" << path_data(map, xs, ys)
            << "\" fill=\"none\" stroke=\"#e6b400\" stroke-width=\"1\" "
               "stroke-dasharray=\"3 2\"/>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

} // namespace epigp
