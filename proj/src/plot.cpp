#include "opspread/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "opspread/common.hpp"

namespace opspread {

std::string to_string(PlotKind k) {
    switch (k) {
        case PlotKind::FCurve: return "f-curve";
        case PlotKind::VelocityCorrections: return "velocity-corrections";
        case PlotKind::FrontHeat: return "front-heat";
    }
    return "?";
}

namespace {

constexpr double kW = 640, kH = 400, kL = 70, kR = 20, kT = 30, kB = 50;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const std::vector<double>& need(const PlotData& d, const std::string& name) {
    auto it = d.series.find(name);
    if (it == d.series.end() || it->second.empty())
        throw Error(ErrorKind::MissingSeries, "plot needs series '" + name + "'");
    return it->second;
}

struct Range {
    double lo, hi;
    double map(double v, double a, double b) const {
        double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return a + t * (b - a);
    }
};

Range range_of(const std::vector<const std::vector<double>*>& ys) {
    double lo = INFINITY, hi = -INFINITY;
    for (auto* y : ys)
        for (double v : *y)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    if (!std::isfinite(lo)) lo = hi = 0;
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

void header(std::ostringstream& os, const std::string& title) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"14\">"
       << title << "</text>\n";
}

void axes(std::ostringstream& os, const Range& xr, const Range& yr, const std::string& xl,
          const std::string& yl) {
    os << "<g stroke=\"black\" fill=\"none\">\n";
    os << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\"" << kH - kB << "\"/>\n";
    os << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB << "\"/>\n";
    os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 4; ++i) {
        double xv = xr.lo + i * (xr.hi - xr.lo) / 4, yv = yr.lo + i * (yr.hi - yr.lo) / 4;
        double px = xr.map(xv, kL, kW - kR), py = yr.map(yv, kH - kB, kT);
        os << "<text x=\"" << num(px) << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\">" << label(xv) << "</text>\n";
        os << "<text x=\"" << kL - 6 << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << label(yv) << "</text>\n";
    }
    os << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">" << xl << "</text>\n";
    os << "<text x=\"16\" y=\"" << (kT + kH - kB) / 2 << "\" transform=\"rotate(-90 16 " << (kT + kH - kB) / 2
       << ")\" text-anchor=\"middle\">" << yl << "</text>\n</g>\n";
}

void polyline(std::ostringstream& os, const std::vector<double>& x, const std::vector<double>& y,
              const Range& xr, const Range& yr, const std::string& color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    std::size_t n = std::min(x.size(), y.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(y[i])) continue;
        os << num(xr.map(x[i], kL, kW - kR)) << "," << num(yr.map(y[i], kH - kB, kT)) << (i + 1 < n ? " " : "");
    }
    os << "\"/>\n";
}

void legend(std::ostringstream& os, int row, const std::string& text, const std::string& color) {
    double y = kT + 12 + 16 * row;
    os << "<line x1=\"" << kW - 170 << "\" y1=\"" << y - 4 << "\" x2=\"" << kW - 150 << "\" y2=\"" << y - 4
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kW - 145 << "\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"11\">" << text
       << "</text>\n";
}

std::string heat_color(double v, double vmax) {
    double t = vmax > 0 ? std::clamp(v / vmax, 0.0, 1.0) : 0.0;
    int r = int(std::lround(255 * t)), g = int(std::lround(255 * (1 - t) * 0.9 + 20 * t)),
        b = int(std::lround(255 * (1 - t)));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

std::string emit_plot(const PlotData& data, PlotKind kind) {
    std::ostringstream os;
    if (kind == PlotKind::FCurve) {
        const auto& x = need(data, "epsilon");
        const auto& f = need(data, "f_chain");
        Range xr = range_of({&x}), yr = range_of({&f});
        header(os, "overlapping-channel chain sum f");
        axes(os, xr, yr, "epsilon", "f");
        polyline(os, x, f, xr, yr, "#1f4e9e");
    } else if (kind == PlotKind::VelocityCorrections) {
        const auto& x = need(data, "epsilon");
        const auto& vf = need(data, "dv_F");
        const auto& vs = need(data, "dv_S_printed");
        Range xr = range_of({&x}), yr = range_of({&vf, &vs});
        header(os, "velocity corrections");
        axes(os, xr, yr, "epsilon", "delta v");
        polyline(os, x, vf, xr, yr, "#1f4e9e");
        polyline(os, x, vs, xr, yr, "#b2182b");
        legend(os, 0, "dv_F", "#1f4e9e");
        legend(os, 1, "dv_S", "#b2182b");
    } else {
        if (data.grid.empty() || data.grid[0].empty())
            throw Error(ErrorKind::MissingSeries, "plot needs a profile grid");
        std::size_t nt = data.grid.size(), nx = data.grid[0].size();
        double vmax = 0;
        for (const auto& row : data.grid) for (double v : row) vmax = std::max(vmax, v);
        header(os, "density profiles by time");
        Range xr{-0.5, double(nx) - 0.5}, yr{-0.5, double(nt) - 0.5};
        axes(os, xr, yr, "site", "time");
        double cw = (kW - kR - kL) / double(nx), ch = (kH - kB - kT) / double(nt);
        for (std::size_t t = 0; t < nt; ++t)
            for (std::size_t x = 0; x < std::min(nx, data.grid[t].size()); ++x)
                os << "<rect x=\"" << num(kL + x * cw) << "\" y=\"" << num(kH - kB - (t + 1) * ch) << "\" width=\""
                   << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << heat_color(data.grid[t][x], vmax)
                   << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_plot(const std::string& path, const PlotData& data, PlotKind kind) {
    std::string svg = emit_plot(data, kind);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path + "'");
    out << svg;
}

}  // namespace opspread
