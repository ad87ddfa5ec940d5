#pragma once

// Metric spaces, finite paths, running diameters, and the CSV path format.
//
// Two geometries are supported: the real line and euclidean-d.  A path is a
// finite adapted trajectory X_0,...,X_n stored as a flat coordinate buffer;
// time is the index.  All operations are pure and values are immutable after
// construction, so everything here is safe to share across threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace varmart::core {

// ===== Spaces and paths =====

enum class Geometry { RealLine, Euclidean };

struct MetricSpace {
    Geometry geometry = Geometry::RealLine;
    int dim = 1;

    static MetricSpace real_line() { return {Geometry::RealLine, 1}; }
    static MetricSpace euclidean(int d) {
        if (d < 1) throw std::invalid_argument("euclidean dimension must be >= 1");
        return {Geometry::Euclidean, d};
    }

    friend bool operator==(const MetricSpace&, const MetricSpace&) = default;
};

inline double distance(const MetricSpace& space, std::span<const double> a,
                       std::span<const double> b) {
    if (static_cast<int>(a.size()) != space.dim || static_cast<int>(b.size()) != space.dim)
        throw std::invalid_argument("distance: point dimension does not match space");
    if (space.dim == 1) return std::fabs(a[0] - b[0]);
    double s = 0.0;
    for (int i = 0; i < space.dim; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double distance(const MetricSpace& space, double a, double b) {
    return distance(space, std::span<const double>(&a, 1), std::span<const double>(&b, 1));
}

struct Path {
    MetricSpace space;
    std::vector<double> coords;  // length() * space.dim values, point-major

    Path() = default;
    Path(MetricSpace s, std::vector<double> c) : space(s), coords(std::move(c)) {}

    // Real-line path from plain values.
    static Path real(std::vector<double> values) {
        return Path(MetricSpace::real_line(), std::move(values));
    }

    std::size_t length() const { return space.dim > 0 ? coords.size() / space.dim : 0; }

    std::span<const double> point(std::size_t t) const {
        return {coords.data() + t * space.dim, static_cast<std::size_t>(space.dim)};
    }

    double dist(std::size_t s, std::size_t t) const {
        return distance(space, point(s), point(t));
    }
};

struct ValidationReport {
    bool valid = true;
    std::string reason;
};

inline ValidationReport validate_path(const Path& path) {
    if (path.space.dim < 1) return {false, "space dimension < 1"};
    if (path.coords.empty()) return {false, "empty path"};
    if (path.coords.size() % static_cast<std::size_t>(path.space.dim) != 0)
        return {false, "dimension mismatch: coordinate count not a multiple of dim"};
    if (path.space.geometry == Geometry::RealLine && path.space.dim != 1)
        return {false, "real-line path with dim != 1"};
    for (double x : path.coords)
        if (!std::isfinite(x)) return {false, "non-finite coordinate"};
    return {};
}

inline void require_valid(const Path& path) {
    const auto rep = validate_path(path);
    if (!rep.valid) throw std::invalid_argument("invalid path: " + rep.reason);
}

// ===== Running diameter =====

// M_t = max pairwise distance among X_0..X_t.  M_0 = 0, non-decreasing.
using DiameterTrace = std::vector<double>;

inline DiameterTrace running_diameter(const Path& path) {
    require_valid(path);
    const std::size_t n = path.length();
    DiameterTrace m(n, 0.0);
    if (path.space.dim == 1) {
        double lo = path.coords[0], hi = path.coords[0];
        for (std::size_t t = 1; t < n; ++t) {
            lo = std::min(lo, path.coords[t]);
            hi = std::max(hi, path.coords[t]);
            m[t] = hi - lo;
        }
    } else {
        double cur = 0.0;
        for (std::size_t t = 1; t < n; ++t) {
            for (std::size_t s = 0; s < t; ++s) cur = std::max(cur, path.dist(s, t));
            m[t] = cur;
        }
    }
    return m;
}

// ===== CSV path format =====
//
// One row per time index, columns = coordinates.  Values are written with 17
// significant decimal digits so a write/read cycle is bit-identical.

inline std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void write_path_csv(const Path& path, std::ostream& out) {
    const std::size_t n = path.length();
    for (std::size_t t = 0; t < n; ++t) {
        const auto p = path.point(t);
        for (int i = 0; i < path.space.dim; ++i) {
            if (i) out << ',';
            out << format_double(p[i]);
        }
        out << '\n';
    }
}

inline double parse_double_field(const std::string& field) {
    const char* s = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(s, &end);
    while (end && *end == ' ') ++end;
    if (end == s || (end && *end != '\0'))
        throw std::invalid_argument("csv: non-numeric field '" + field + "'");
    return v;
}

// Geometry is inferred from the column count: 1 column is the real line,
// k >= 2 columns is euclidean-k.
inline Path read_path_csv(std::istream& in) {
    std::vector<double> coords;
    std::size_t cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::size_t row_cols = 0;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            std::string field = line.substr(pos, comma == std::string::npos
                                                     ? std::string::npos
                                                     : comma - pos);
            const std::size_t a = field.find_first_not_of(" \t");
            if (a == std::string::npos)
                throw std::invalid_argument("csv: empty field");
            const std::size_t b = field.find_last_not_of(" \t");
            coords.push_back(parse_double_field(field.substr(a, b - a + 1)));
            ++row_cols;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (cols == 0) {
            cols = row_cols;
        } else if (row_cols != cols) {
            throw std::invalid_argument("csv: ragged rows");
        }
    }
    if (cols == 0) throw std::invalid_argument("csv: no rows");
    MetricSpace space = (cols == 1) ? MetricSpace::real_line()
                                    : MetricSpace::euclidean(static_cast<int>(cols));
    Path path(space, std::move(coords));
    require_valid(path);
    return path;
}

}  // namespace varmart::core
