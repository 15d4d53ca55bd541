#include "levlim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace levlim {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string to_csv(const Table& table) {
    std::ostringstream out;
    for (const auto& [k, v] : table.meta) out << "# " << k << " = " << v << "\n";
    for (size_t i = 0; i < table.columns.size(); ++i)
        out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
    return out.str();
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

} // namespace

Table parse_csv(const std::string& text) {
    Table table;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            size_t eq = line.find('=');
            if (eq != std::string::npos)
                table.meta.emplace_back(trim(line.substr(1, eq - 1)), trim(line.substr(eq + 1)));
            continue;
        }
        if (!have_header) {
            for (const auto& c : split(line, ',')) table.columns.push_back(trim(c));
            have_header = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : split(line, ',')) row.push_back(std::stod(cell));
        table.rows.push_back(std::move(row));
    }
    return table;
}

nlohmann::json table_json(const Table& table) {
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [k, v] : table.meta) meta[k] = v;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (size_t i = 0; i < row.size() && i < table.columns.size(); ++i)
            obj[table.columns[i]] = row[i];
        rows.push_back(obj);
    }
    return nlohmann::json{{"meta", meta}, {"rows", rows}};
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

namespace {

struct Range {
    double lo = 0.0, hi = 1.0;
};

Range data_range(const std::vector<Series>& series, bool y_axis) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : series) {
        const auto& v = y_axis ? s.y : s.x;
        for (double d : v) {
            if (!std::isfinite(d)) continue;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
    }
    if (!(lo < hi)) {
        lo = std::isfinite(lo) ? lo - 1.0 : 0.0;
        hi = lo + 2.0;
    }
    double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

double nice_step(double span, int target_ticks) {
    double raw = span / target_ticks;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) return m * mag;
    return 10.0 * mag;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

std::string to_svg(const LinePlot& plot, int width, int height) {
    const double ml = 72, mr = 24, mt = 42, mb = 52;
    const double pw = width - ml - mr, ph = height - mt - mb;
    Range rx = data_range(plot.series, false);
    Range ry = data_range(plot.series, true);
    auto px = [&](double x) { return ml + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto py = [&](double y) { return mt + ph - (y - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    s << "<metadata>";
    for (const auto& [k, v] : plot.meta) s << k << "=" << v << "; ";
    s << "</metadata>\n";
    s << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    s << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << plot.title << "</text>\n";

    // axes + ticks
    s << "<g stroke=\"#444\" stroke-width=\"1\">\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
      << "\" y2=\"" << mt + ph << "\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << mt + ph << "\"/>\n</g>\n";
    s << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    double sx = nice_step(rx.hi - rx.lo, 8);
    for (double t = std::ceil(rx.lo / sx) * sx; t <= rx.hi + 1e-12 * sx; t += sx) {
        s << "<line x1=\"" << px(t) << "\" y1=\"" << mt + ph << "\" x2=\"" << px(t)
          << "\" y2=\"" << mt + ph + 4 << "\" stroke=\"#444\"/>\n";
        s << "<text x=\"" << px(t) << "\" y=\"" << mt + ph + 17
          << "\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    double sy = nice_step(ry.hi - ry.lo, 8);
    for (double t = std::ceil(ry.lo / sy) * sy; t <= ry.hi + 1e-12 * sy; t += sy) {
        s << "<line x1=\"" << ml - 4 << "\" y1=\"" << py(t) << "\" x2=\"" << ml
          << "\" y2=\"" << py(t) << "\" stroke=\"#444\"/>\n";
        s << "<text x=\"" << ml - 7 << "\" y=\"" << py(t) + 4
          << "\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
    }
    s << "</g>\n";
    s << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << plot.xlabel << "</text>\n";
    s << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">" << plot.ylabel << "</text>\n";

    for (const auto& ser : plot.series) {
        s << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"1.6\"";
        if (ser.dashed) s << " stroke-dasharray=\"6,4\"";
        s << " points=\"";
        for (size_t i = 0; i < ser.x.size(); ++i) {
            if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
            s << px(ser.x[i]) << "," << py(ser.y[i]) << " ";
        }
        s << "\"/>\n";
    }

    // legend
    double ly = mt + 8;
    for (const auto& ser : plot.series) {
        s << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw - 120
          << "\" y2=\"" << ly << "\" stroke=\"" << ser.color << "\" stroke-width=\"1.6\""
          << (ser.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n"
          << "<text x=\"" << ml + pw - 114 << "\" y=\"" << ly + 4
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << ser.name << "</text>\n";
        ly += 17;
    }
    s << "</svg>\n";
    return s.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace levlim
