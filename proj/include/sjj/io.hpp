#ifndef SJJ_IO_HPP
#define SJJ_IO_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sjj {

// All artifacts go through a temp-file + rename so a crash mid-write never
// leaves a torn CSV behind.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

// Round-trip exact float formatting for CSV cells.
inline std::string cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
inline std::string cell(int v) { return std::to_string(v); }
inline std::string cell(const std::string& v) { return v; }
inline std::string cell(const char* v) { return v; }

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    template <class... T>
    void add_row(const T&... fields) {
        rows.push_back({cell(fields)...});
    }

    std::string to_string() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < header.size(); ++i)
            out << header[i] << (i + 1 < header.size() ? "," : "");
        out << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i)
                out << r[i] << (i + 1 < r.size() ? "," : "");
            out << "\n";
        }
        return out.str();
    }
};

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    atomic_write(path, table.to_string());
}

// ---------------------------------------------------------------------------
// Minimal static SVG line plots, 800x600. CSV is the canonical artifact;
// this is a convenience rendition, so it stays bare-bones: axes, ticks, one
// polyline per series with an optional dash pattern.

struct SvgSeries {
    std::vector<std::pair<double, double>> pts;
    std::string color = "#1f6fb2";
    std::string dash;  // empty = solid; e.g. "8,5" or "8,4,2,4"
};

struct SvgPlot {
    std::string title, xlabel, ylabel;
    std::vector<SvgSeries> series;
};

namespace svg_detail {

constexpr double W = 800, H = 600;
constexpr double ML = 70, MR = 25, MT = 45, MB = 55;

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Round tick spacing to 1/2/5 times a power of ten.
inline double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace svg_detail

inline std::string render_svg(const SvgPlot& plot) {
    using namespace svg_detail;
    if (plot.series.empty()) throw std::invalid_argument("svg plot needs >= 1 series");

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : plot.series)
        for (auto [x, y] : s.pts) {
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            ymin = std::min(ymin, y); ymax = std::max(ymax, y);
        }
    if (!(xmin < xmax)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }
    const double xpad = 0.03 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
    xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

    auto X = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto Y = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n"
        << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n"
        << "<text x=\"400\" y=\"25\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" << plot.title << "</text>\n";

    out << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR
        << "\" height=\"" << H - MT - MB
        << "\" fill=\"none\" stroke=\"#404040\" stroke-width=\"1\"/>\n";

    const double xs = nice_step(xmax - xmin), ys = nice_step(ymax - ymin);
    for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-12 * xs; t += xs) {
        const double px = X(t);
        out << "<line x1=\"" << px << "\" y1=\"" << H - MB << "\" x2=\"" << px
            << "\" y2=\"" << H - MB + 5 << "\" stroke=\"#404040\"/>\n"
            << "<text x=\"" << px << "\" y=\"" << H - MB + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(std::fabs(t) < 1e-12 * xs ? 0.0 : t) << "</text>\n";
    }
    for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-12 * ys; t += ys) {
        const double py = Y(t);
        out << "<line x1=\"" << ML - 5 << "\" y1=\"" << py << "\" x2=\"" << ML
            << "\" y2=\"" << py << "\" stroke=\"#404040\"/>\n"
            << "<text x=\"" << ML - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(std::fabs(t) < 1e-12 * ys ? 0.0 : t) << "</text>\n";
    }
    out << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << plot.xlabel << "</text>\n"
        << "<text x=\"18\" y=\"" << (MT + H - MB) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
           "transform=\"rotate(-90 18 " << (MT + H - MB) / 2 << ")\">"
        << plot.ylabel << "</text>\n";

    for (const auto& s : plot.series) {
        if (s.pts.empty()) continue;
        if (s.pts.size() == 1) {
            out << "<circle cx=\"" << X(s.pts[0].first) << "\" cy=\""
                << Y(s.pts[0].second) << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
            continue;
        }
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.3\"";
        if (!s.dash.empty()) out << " stroke-dasharray=\"" << s.dash << "\"";
        out << " points=\"";
        for (auto [x, y] : s.pts) out << X(x) << "," << Y(y) << " ";
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

inline void write_svg(const std::filesystem::path& path, const SvgPlot& plot) {
    atomic_write(path, render_svg(plot));
}

}  // namespace sjj

#endif
