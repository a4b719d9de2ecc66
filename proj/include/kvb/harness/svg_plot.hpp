#pragma once

#include "kvb/harness/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kvb {

struct PlotSeries {
    std::string name;
    std::vector<double> x, y;
};

struct PlotOptions {
    std::string title;
    std::string x_label = "t";
    std::string y_label;
    bool log_y = false;
    bool bars = false;  ///< one bar per point of the first series
    int width = 640;
    int height = 400;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v == 0.0 ? 0.0 : v);
    return buf;
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v == 0.0 ? 0.0 : v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
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

inline const char* palette(std::size_t i) {
    static const char* c[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return c[i % 6];
}

}  // namespace detail

/// Deterministic SVG rendering: same series and options, same bytes.
/// Points that are not finite (or not positive on a log axis) are dropped.
inline std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
    if (series.empty()) throw std::invalid_argument("plot needs at least one series");
    std::size_t points = 0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("series '" + s.name + "' has mismatched x and y");
        points += s.x.size();
    }
    if (points == 0) throw std::invalid_argument("plot series are empty");

    auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };
    auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!opt.log_y || y > 0.0); };

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!(x0 <= x1)) throw std::invalid_argument("plot has no finite points");
    if (opt.bars && !opt.log_y) y0 = std::min(y0, 0.0);
    if (x1 == x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }

    const double ml = 70, mr = 20, mt = 36, mb = 48;
    const double W = opt.width, H = opt.height, pw = W - ml - mr, ph = H - mt - mb;
    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return mt + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

    std::string o;
    o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) + "\" height=\"" +
         std::to_string(opt.height) + "\" viewBox=\"0 0 " + std::to_string(opt.width) + " " +
         std::to_string(opt.height) + "\">\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opt.title.empty())
        o += "<text x=\"" + detail::num(W / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
             detail::xml_escape(opt.title) + "</text>\n";
    o += "<rect x=\"" + detail::num(ml) + "\" y=\"" + detail::num(mt) + "\" width=\"" + detail::num(pw) +
         "\" height=\"" + detail::num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int k = 0; k <= 4; ++k) {
        const double fx = x0 + (x1 - x0) * k / 4.0, fy = y0 + (y1 - y0) * k / 4.0;
        const double X = ml + pw * k / 4.0, Y = mt + ph * (1.0 - k / 4.0);
        o += "<text x=\"" + detail::num(X) + "\" y=\"" + detail::num(H - mb + 16) +
             "\" text-anchor=\"middle\" font-size=\"10\">" + detail::tick(fx) + "</text>\n";
        o += "<text x=\"" + detail::num(ml - 6) + "\" y=\"" + detail::num(Y + 3) +
             "\" text-anchor=\"end\" font-size=\"10\">" + (opt.log_y ? "1e" + detail::tick(fy) : detail::tick(fy)) +
             "</text>\n";
    }
    o += "<text x=\"" + detail::num(ml + pw / 2) + "\" y=\"" + detail::num(H - 8) +
         "\" text-anchor=\"middle\" font-size=\"12\">" + detail::xml_escape(opt.x_label) + "</text>\n";
    o += "<text x=\"14\" y=\"" + detail::num(mt + ph / 2) + "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 " +
         detail::num(mt + ph / 2) + ")\">" + detail::xml_escape(opt.y_label) + "</text>\n";

    if (opt.bars) {
        const auto& s = series.front();
        const double slot = pw / static_cast<double>(std::max<std::size_t>(s.x.size(), 1));
        const double base = opt.log_y ? mt + ph : py(std::max(0.0, y0));
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            const double top = py(s.y[i]);
            const double X = ml + slot * (static_cast<double>(i) + 0.15);
            o += "<rect class=\"bar\" x=\"" + detail::num(X) + "\" y=\"" + detail::num(std::min(top, base)) +
                 "\" width=\"" + detail::num(slot * 0.7) + "\" height=\"" + detail::num(std::abs(base - top)) +
                 "\" fill=\"" + detail::palette(0) + "\"/>\n";
        }
    } else {
        for (std::size_t k = 0; k < series.size(); ++k) {
            const auto& s = series[k];
            std::string pts;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                if (!pts.empty()) pts += ' ';
                pts += detail::num(px(s.x[i])) + "," + detail::num(py(s.y[i]));
            }
            o += "<polyline fill=\"none\" stroke=\"" + std::string(detail::palette(k)) +
                 "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        }
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double Y = mt + 14 + 14.0 * k;
        o += "<text x=\"" + detail::num(ml + pw - 8) + "\" y=\"" + detail::num(Y) +
             "\" text-anchor=\"end\" font-size=\"11\" fill=\"" + detail::palette(k) + "\">" +
             detail::xml_escape(series[k].name) + "</text>\n";
    }
    o += "</svg>\n";
    return o;
}

inline void emit_plot(const std::vector<PlotSeries>& series, const std::string& path, const PlotOptions& opt = {}) {
    write_text(path, render_svg(series, opt));
}

}  // namespace kvb
