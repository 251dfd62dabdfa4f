#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace robin {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }

    Vec2 normalized() const {
        double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
        return {x / n, y / n};
    }
    // Rotate by -90 degrees: tangent of a CCW loop -> outward normal.
    Vec2 rot_cw() const { return {y, -x}; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * (b - a).cross(c - a);
}

inline double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double l2 = ab.norm2();
    if (l2 == 0.0) return (p - a).norm();
    double t = (p - a).dot(ab) / l2;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

// Proper crossing test for open segments (shared endpoints do not count).
inline bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
        double v = (q - p).cross(r - p);
        double eps = 1e-14 * ((q - p).norm() * (r - p).norm() + 1e-300);
        if (v > eps) return 1;
        if (v < -eps) return -1;
        return 0;
    };
    int o1 = orient(a, b, c), o2 = orient(a, b, d);
    int o3 = orient(c, d, a), o4 = orient(c, d, b);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

inline double polygon_signed_area(const std::vector<Vec2>& pts) {
    double s = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Vec2& p = pts[i];
        const Vec2& q = pts[(i + 1) % pts.size()];
        s += p.cross(q);
    }
    return 0.5 * s;
}

inline bool polygon_is_simple(const std::vector<Vec2>& pts) {
    size_t k = pts.size();
    for (size_t i = 0; i < k; ++i) {
        Vec2 a = pts[i], b = pts[(i + 1) % k];
        for (size_t j = i + 1; j < k; ++j) {
            if (j == i || (j + 1) % k == i || (i + 1) % k == j) continue;
            if (segments_cross(a, b, pts[j], pts[(j + 1) % k])) return false;
        }
    }
    return true;
}

// Crossing-number test; points on the boundary are classified arbitrarily.
inline bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& pts) {
    bool inside = false;
    size_t k = pts.size();
    for (size_t i = 0, j = k - 1; i < k; j = i++) {
        const Vec2& a = pts[i];
        const Vec2& b = pts[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xi = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xi) inside = !inside;
        }
    }
    return inside;
}

inline double distance_to_polygon(const Vec2& p, const std::vector<Vec2>& pts) {
    double d = std::numeric_limits<double>::infinity();
    size_t k = pts.size();
    for (size_t i = 0; i < k; ++i)
        d = std::min(d, segment_distance(p, pts[i], pts[(i + 1) % k]));
    return d;
}

}  // namespace robin
