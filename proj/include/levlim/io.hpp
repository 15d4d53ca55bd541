#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace levlim {

inline constexpr const char* kToolName = "levlim";
inline constexpr const char* kToolVersion = "0.1.0";

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric table with provenance metadata.  CSV output round-trips exactly:
/// values are written with 17 significant digits.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, std::string>> meta;
};

/// Shortest exact decimal form (17 significant digits).
std::string format_double(double v);

std::string to_csv(const Table& table);

/// Parse a CSV produced by to_csv (comment lines "# key = value" become
/// metadata).
Table parse_csv(const std::string& text);

nlohmann::json table_json(const Table& table);

// ---------------------------------------------------------------------------
// Self-contained SVG line plots (no external renderer).
// ---------------------------------------------------------------------------

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f6fb2";
    bool dashed = false;
};

struct LinePlot {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
    std::vector<std::pair<std::string, std::string>> meta;
};

std::string to_svg(const LinePlot& plot, int width = 880, int height = 560);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace levlim
