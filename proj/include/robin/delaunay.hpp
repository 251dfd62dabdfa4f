#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "robin/geometry.hpp"

namespace robin {

// Bowyer-Watson Delaunay triangulation of a 2D point set.
// Intended for well-spaced point clouds (boundary samples plus a jittered
// hex lattice), not for adversarial inputs; the in-circle test uses a
// relative tolerance instead of exact predicates.
inline std::vector<std::array<int, 3>> delaunay_triangulate(const std::vector<Vec2>& points) {
    struct Tri {
        int v[3];
        Vec2 cc;       // circumcenter
        double r2;     // squared circumradius
        bool alive;
    };

    const int n = static_cast<int>(points.size());
    if (n < 3) throw std::invalid_argument("delaunay: need at least 3 points");

    Vec2 lo = points[0], hi = points[0];
    for (const Vec2& p : points) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    Vec2 c = (lo + hi) * 0.5;
    double span = std::max(hi.x - lo.x, hi.y - lo.y);
    if (span == 0.0) throw std::invalid_argument("delaunay: degenerate point set");

    std::vector<Vec2> pts = points;
    pts.push_back(c + Vec2{-20.0 * span, -10.0 * span});
    pts.push_back(c + Vec2{20.0 * span, -10.0 * span});
    pts.push_back(c + Vec2{0.0, 25.0 * span});

    auto circum = [&](Tri& t) {
        const Vec2& a = pts[t.v[0]];
        const Vec2& b = pts[t.v[1]];
        const Vec2& d = pts[t.v[2]];
        Vec2 ab = b - a, ad = d - a;
        double det = 2.0 * ab.cross(ad);
        if (det == 0.0) { t.r2 = -1.0; return; }
        double ab2 = ab.norm2(), ad2 = ad.norm2();
        Vec2 rel{(ad.y * ab2 - ab.y * ad2) / det, (ab.x * ad2 - ad.x * ab2) / det};
        t.cc = a + rel;
        t.r2 = rel.norm2();
    };

    std::vector<Tri> tris;
    tris.push_back({{n, n + 1, n + 2}, {}, 0.0, true});
    circum(tris[0]);

    std::vector<std::array<int, 2>> cavity_edges;
    for (int ip = 0; ip < n; ++ip) {
        const Vec2& p = pts[ip];
        cavity_edges.clear();
        for (Tri& t : tris) {
            if (!t.alive) continue;
            double tol = 1e-12 * (t.r2 + p.norm2());
            if ((p - t.cc).norm2() <= t.r2 + tol) {
                t.alive = false;
                cavity_edges.push_back({t.v[0], t.v[1]});
                cavity_edges.push_back({t.v[1], t.v[2]});
                cavity_edges.push_back({t.v[2], t.v[0]});
            }
        }
        // Boundary of the cavity: edges that appear exactly once.
        for (size_t i = 0; i < cavity_edges.size(); ++i) {
            bool dup = false;
            for (size_t j = 0; j < cavity_edges.size(); ++j) {
                if (i == j) continue;
                if (cavity_edges[i][0] == cavity_edges[j][1] &&
                    cavity_edges[i][1] == cavity_edges[j][0]) { dup = true; break; }
            }
            if (dup) continue;
            Tri t{{cavity_edges[i][0], cavity_edges[i][1], ip}, {}, 0.0, true};
            circum(t);
            if (t.r2 < 0.0) t.alive = false;  // collinear sliver; drop
            tris.push_back(t);
        }
        // Compact occasionally so the scan stays linear in live triangles.
        if (tris.size() > 4 * static_cast<size_t>(n)) {
            std::vector<Tri> live;
            live.reserve(tris.size());
            for (const Tri& t : tris) if (t.alive) live.push_back(t);
            tris.swap(live);
        }
    }

    std::vector<std::array<int, 3>> out;
    for (const Tri& t : tris) {
        if (!t.alive) continue;
        if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
        std::array<int, 3> tv{t.v[0], t.v[1], t.v[2]};
        if (triangle_area(pts[tv[0]], pts[tv[1]], pts[tv[2]]) < 0.0) std::swap(tv[1], tv[2]);
        out.push_back(tv);
    }
    return out;
}

}  // namespace robin
