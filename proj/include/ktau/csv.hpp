#pragma once

// Two-column numeric CSV: optional `x,y` header, one observation per row,
// '.' as decimal separator. Blank lines are skipped.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ktau/error.hpp"
#include "ktau/families.hpp"

namespace ktau {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline bool parse_number(std::string_view field, double& out) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    if (field.empty()) return false;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
    return res.ec == std::errc() && res.ptr == field.data() + field.size() && std::isfinite(out);
}

}  // namespace detail

[[nodiscard]] inline std::vector<Point> read_csv(std::istream& in, const std::string& name = "<input>") {
    std::vector<Point> points;
    std::string line;
    std::size_t row = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = line;
        if (row == 1 && sv.starts_with("\xEF\xBB\xBF")) sv.remove_prefix(3);
        if (detail::trim(sv).empty()) continue;
        const auto comma = sv.find(',');
        if (comma == std::string_view::npos || sv.find(',', comma + 1) != std::string_view::npos) {
            const auto fields = comma == std::string_view::npos ? 1 : 3;
            throw Error(ErrorKind::Csv, name + ":" + std::to_string(row) + ": expected 2 columns, found " +
                                            (fields == 1 ? std::string("1") : std::string("more than 2")));
        }
        const auto a = sv.substr(0, comma);
        const auto b = sv.substr(comma + 1);
        if (first_content) {
            first_content = false;
            if (detail::trim(a) == "x" && detail::trim(b) == "y") continue;
        }
        Point p;
        if (!detail::parse_number(a, p.x)) {
            throw Error(ErrorKind::Csv, name + ":" + std::to_string(row) + ": column 1: not a finite number: '" +
                                            std::string(detail::trim(a)) + "'");
        }
        if (!detail::parse_number(b, p.y)) {
            throw Error(ErrorKind::Csv, name + ":" + std::to_string(row) + ": column 2: not a finite number: '" +
                                            std::string(detail::trim(b)) + "'");
        }
        points.push_back(p);
    }
    return points;
}

[[nodiscard]] inline std::vector<Point> read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Csv, "cannot open '" + path + "'");
    return read_csv(in, path);
}

/// Writes the `x,y` header and 17-significant-digit rows, which read back
/// bit-exactly.
inline void write_csv(std::ostream& out, std::span<const Point> points) {
    out << "x,y\n";
    char buf[80];
    for (const auto& p : points) {
        const int len = std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.x, p.y);
        out.write(buf, len);
    }
}

}  // namespace ktau
