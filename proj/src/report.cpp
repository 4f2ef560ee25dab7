#include "reglab/report.hpp"

#include "reglab/common.hpp"
#include "reglab/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace reglab {

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {}

void Table::add(std::vector<std::string> row) {
    require(row.size() == header_.size(), "table: row width does not match header");
    rows_.push_back(std::move(row));
}

std::size_t Table::column(const std::string& name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    require(it != header_.end(), "table: no column '" + name + "'");
    return static_cast<std::size_t>(it - header_.begin());
}

std::string Table::csv() const {
    std::string out;
    const auto line = [&out](const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            out += r[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void Table::save(const std::string& path) const { write_text(path, csv()); }

std::string cell(double v) { return format_real(v); }
std::string cell(int v) { return std::to_string(v); }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    require(static_cast<bool>(os), "cannot open '" + path + "' for writing");
    os << text;
    require(static_cast<bool>(os), "write to '" + path + "' failed");
}

std::string svg_loglog(const std::string& title, const std::string& xlabel, const std::vector<Series>& series) {
    constexpr double W = 640, H = 420, L = 70, R = 160, T = 40, B = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const Series& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0.0 && s.y[i] > 0.0) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, std::log10(s.x[i]));
            x1 = std::max(x1, std::log10(s.x[i]));
            y0 = std::min(y0, std::log10(s.y[i]));
            y1 = std::max(y1, std::log10(s.y[i]));
        }
    if (!(x1 > x0)) {
        x0 = std::isfinite(x0) ? x0 - 1 : 0;
        x1 = x0 + 2;
    }
    if (!(y1 > y0)) {
        y0 = std::isfinite(y0) ? y0 - 1 : 0;
        y1 = y0 + 2;
    }
    const auto px = [&](double v) { return L + (std::log10(v) - x0) / (x1 - x0) * (W - L - R); };
    const auto py = [&](double v) { return H - B - (std::log10(v) - y0) / (y1 - y0) * (H - T - B); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::ostringstream os;
    char buf[128];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << L << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n", L,
                  T, W - L - R, H - T - B);
    os << buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\">", L, H - 12);
    os << buf << xlabel << " (log10 " << format_real(x0) << " .. " << format_real(x1) << ")</text>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"4\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\">", T + 12);
    os << buf << "log10 " << format_real(y1) << "</text>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"4\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\">", H - B);
    os << buf << "log10 " << format_real(y0) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % 5];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            const double x = series[s].x[i], y = series[s].y[i];
            if (!(x > 0.0 && y > 0.0) || !std::isfinite(y)) continue;
            std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", first ? "" : " ", px(x), py(y));
            os << buf;
            first = false;
        }
        os << "\"/>\n";
        std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\" fill=\"%s\">",
                      W - R + 10, T + 16 + 18.0 * s, color);
        os << buf << series[s].name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace reglab
