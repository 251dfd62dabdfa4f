#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "robin/delaunay.hpp"
#include "robin/geometry.hpp"

namespace robin {

enum class Region : std::uint8_t { body = 0, layer = 1 };

struct BoundaryEdge {
    int a = -1;        // oriented: interior lies on the left of a->b
    int b = -1;
    Vec2 normal;       // outward unit normal
};

// 2D conforming triangulation. Boundary edges are derived from the triangle
// connectivity (edges owned by exactly one triangle) and oriented so that
// each closed loop runs counterclockwise around the enclosed region.
struct TriangleMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Region> region;
    std::vector<BoundaryEdge> boundary_edges;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }

    double tri_area(int t) const {
        const auto& tv = triangles[t];
        return triangle_area(vertices[tv[0]], vertices[tv[1]], vertices[tv[2]]);
    }

    double area(Region r) const {
        double a = 0.0;
        for (int t = 0; t < num_triangles(); ++t)
            if (region[t] == r) a += tri_area(t);
        return a;
    }
    double area() const {
        double a = 0.0;
        for (int t = 0; t < num_triangles(); ++t) a += tri_area(t);
        return a;
    }

    double perimeter() const {
        double p = 0.0;
        for (const auto& e : boundary_edges) p += (vertices[e.b] - vertices[e.a]).norm();
        return p;
    }

    double min_angle_deg() const {
        double worst = 180.0;
        for (const auto& tv : triangles) {
            for (int i = 0; i < 3; ++i) {
                Vec2 u = vertices[tv[(i + 1) % 3]] - vertices[tv[i]];
                Vec2 v = vertices[tv[(i + 2) % 3]] - vertices[tv[i]];
                double ang = std::atan2(std::fabs(u.cross(v)), u.dot(v));
                worst = std::min(worst, ang * 180.0 / std::numbers::pi);
            }
        }
        return worst;
    }

    double max_edge_length() const {
        double m = 0.0;
        for (const auto& tv : triangles)
            for (int i = 0; i < 3; ++i)
                m = std::max(m, (vertices[tv[(i + 1) % 3]] - vertices[tv[i]]).norm());
        return m;
    }

    // Derive boundary_edges from the triangles. Keeps the orientation the
    // owning triangle induces, which traverses each loop with the region on
    // the left; the outward normal is the clockwise rotation of the tangent.
    void rebuild_boundary() {
        std::map<std::pair<int, int>, int> count;
        for (const auto& tv : triangles) {
            for (int i = 0; i < 3; ++i) {
                int a = tv[i], b = tv[(i + 1) % 3];
                count[{std::min(a, b), std::max(a, b)}]++;
            }
        }
        boundary_edges.clear();
        for (const auto& tv : triangles) {
            for (int i = 0; i < 3; ++i) {
                int a = tv[i], b = tv[(i + 1) % 3];
                if (count[{std::min(a, b), std::max(a, b)}] == 1) {
                    Vec2 t = (vertices[b] - vertices[a]).normalized();
                    boundary_edges.push_back({a, b, t.rot_cw()});
                }
            }
        }
    }
};

// Ordered walk of the mesh boundary: node ids in loop order plus the
// trapezoidal arc-length weights used by every boundary quadrature.
struct BoundaryMap {
    std::vector<int> node_ids;            // loop order; loops concatenated
    std::vector<double> edge_lengths;     // edge i: node_ids[i] -> next in loop
    std::vector<int> edge_next;           // index into node_ids of edge i's endpoint
    std::vector<double> node_weights;     // half-sum of incident edge lengths
    std::vector<double> arc_position;     // cumulative arc length at each node
    std::vector<int> loop_start;          // offsets of loop beginnings in node_ids

    int size() const { return static_cast<int>(node_ids.size()); }
    double perimeter() const {
        double p = 0.0;
        for (double l : edge_lengths) p += l;
        return p;
    }

    // Uniform closed loop, e.g. an exactly parametrized circle. Used by the
    // oracle paths and tests that do not involve a mesh.
    static BoundaryMap uniform_loop(int k, double total_length) {
        BoundaryMap bm;
        bm.loop_start = {0};
        double l = total_length / k;
        for (int i = 0; i < k; ++i) {
            bm.node_ids.push_back(i);
            bm.edge_lengths.push_back(l);
            bm.edge_next.push_back((i + 1) % k);
            bm.node_weights.push_back(l);
            bm.arc_position.push_back(i * l);
        }
        return bm;
    }

    static BoundaryMap from_mesh(const TriangleMesh& mesh) {
        BoundaryMap bm;
        std::unordered_map<int, const BoundaryEdge*> next_edge;
        for (const auto& e : mesh.boundary_edges) {
            if (next_edge.count(e.a))
                throw std::runtime_error("boundary is not a disjoint union of loops");
            next_edge[e.a] = &e;
        }
        std::unordered_map<int, bool> visited;
        double arc = 0.0;
        for (const auto& e0 : mesh.boundary_edges) {
            if (visited[e0.a]) continue;
            bm.loop_start.push_back(static_cast<int>(bm.node_ids.size()));
            int loop_begin = static_cast<int>(bm.node_ids.size());
            int v = e0.a;
            do {
                visited[v] = true;
                auto it = next_edge.find(v);
                if (it == next_edge.end()) throw std::runtime_error("open boundary loop");
                const BoundaryEdge* e = it->second;
                double len = (mesh.vertices[e->b] - mesh.vertices[e->a]).norm();
                bm.node_ids.push_back(v);
                bm.edge_lengths.push_back(len);
                bm.arc_position.push_back(arc);
                arc += len;
                v = e->b;
            } while (v != e0.a);
            int loop_end = static_cast<int>(bm.node_ids.size());
            for (int i = loop_begin; i < loop_end; ++i)
                bm.edge_next.push_back(i + 1 < loop_end ? i + 1 : loop_begin);
        }
        bm.node_weights.assign(bm.size(), 0.0);
        for (int i = 0; i < bm.size(); ++i) {
            bm.node_weights[i] += 0.5 * bm.edge_lengths[i];
            bm.node_weights[bm.edge_next[i]] += 0.5 * bm.edge_lengths[i];
        }
        return bm;
    }
};

inline void validate_mesh(const TriangleMesh& mesh) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.tri_area(t) <= 0.0)
            throw std::runtime_error("mesh invariant violated: non-positive triangle area");
        for (int v : mesh.triangles[t])
            if (v < 0 || v >= mesh.num_vertices())
                throw std::runtime_error("mesh invariant violated: vertex index out of range");
    }
    if (mesh.region.size() != mesh.triangles.size())
        throw std::runtime_error("mesh invariant violated: region tag count");
    for (const auto& e : mesh.boundary_edges) {
        double n = e.normal.norm();
        if (std::fabs(n - 1.0) > 1e-12)
            throw std::runtime_error("mesh invariant violated: normal not unit length");
    }
    // Loops must close: BoundaryMap construction throws otherwise, and the
    // integral of the outward normal over each loop must vanish.
    BoundaryMap bm = BoundaryMap::from_mesh(mesh);
    double per = bm.perimeter();
    for (size_t li = 0; li < bm.loop_start.size(); ++li) {
        int begin = bm.loop_start[li];
        int end = (li + 1 < bm.loop_start.size()) ? bm.loop_start[li + 1] : bm.size();
        Vec2 total{0.0, 0.0};
        for (const auto& e : mesh.boundary_edges) {
            bool in_loop = false;
            for (int i = begin; i < end; ++i)
                if (bm.node_ids[i] == e.a) { in_loop = true; break; }
            if (in_loop) total += e.normal * (mesh.vertices[e.b] - mesh.vertices[e.a]).norm();
        }
        if (total.norm() > 1e-10 * per)
            throw std::runtime_error("mesh invariant violated: boundary normal integral nonzero");
    }
}

namespace detail {

// Bridge two concentric uniformly spaced vertex rings by merging them in
// angular order. Produces inner.size() + outer.size() triangles.
inline void bridge_rings(const std::vector<int>& inner, const std::vector<int>& outer,
                         std::vector<std::array<int, 3>>& tris) {
    size_t ni = inner.size(), no = outer.size();
    size_t ai = 0, bo = 0;
    while (ai < ni || bo < no) {
        bool advance_outer;
        if (ai == ni) advance_outer = true;
        else if (bo == no) advance_outer = false;
        else advance_outer = (bo + 1) * ni <= (ai + 1) * no;  // compare next angles
        if (advance_outer) {
            tris.push_back({outer[bo % no], outer[(bo + 1) % no], inner[ai % ni]});
            ++bo;
        } else {
            tris.push_back({inner[(ai + 1) % ni], inner[ai % ni], outer[bo % no]});
            ++ai;
        }
    }
}

}  // namespace detail

// Quasi-uniform disk triangulation from concentric rings: ring i of N holds
// 6i vertices at radius iR/N. Boundary vertices lie exactly on the circle and
// the maximum edge length halves per refinement level.
inline TriangleMesh make_disk_mesh(double radius, int refinement_level) {
    if (radius <= 0.0) throw std::invalid_argument("make_disk_mesh: radius must be positive");
    if (refinement_level < 0) throw std::invalid_argument("make_disk_mesh: negative refinement");
    const int rings = 4 << refinement_level;

    TriangleMesh mesh;
    mesh.vertices.push_back({0.0, 0.0});
    std::vector<std::vector<int>> ring_ids(rings + 1);
    ring_ids[0] = {0};
    for (int i = 1; i <= rings; ++i) {
        double r = radius * i / rings;
        int k = 6 * i;
        for (int j = 0; j < k; ++j) {
            double th = 2.0 * std::numbers::pi * j / k;
            ring_ids[i].push_back(mesh.num_vertices());
            mesh.vertices.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    for (int j = 0; j < 6; ++j)
        mesh.triangles.push_back({0, ring_ids[1][j], ring_ids[1][(j + 1) % 6]});
    for (int i = 2; i <= rings; ++i)
        detail::bridge_rings(ring_ids[i - 1], ring_ids[i], mesh.triangles);
    for (auto& tv : mesh.triangles) {
        if (triangle_area(mesh.vertices[tv[0]], mesh.vertices[tv[1]], mesh.vertices[tv[2]]) < 0.0)
            std::swap(tv[1], tv[2]);
    }
    mesh.region.assign(mesh.triangles.size(), Region::body);
    mesh.rebuild_boundary();
    return mesh;
}

// Triangulate a simple CCW polygon: boundary subdivision at the target edge
// length, interior points on a hex lattice, Delaunay triangulation with a few
// Laplacian smoothing passes. Elements below the quality floor are refused.
inline constexpr double kMinTriangleAngleDeg = 20.0;

inline TriangleMesh make_polygon_mesh(const std::vector<Vec2>& polygon,
                                      double target_edge_length) {
    if (polygon.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    if (target_edge_length <= 0.0) throw std::invalid_argument("target edge length must be positive");
    if (!polygon_is_simple(polygon))
        throw std::invalid_argument("self-intersecting boundary");
    double signed_area = polygon_signed_area(polygon);
    if (std::fabs(signed_area) < 1e-14)
        throw std::invalid_argument("degenerate polygon boundary");
    if (signed_area < 0.0)
        throw std::invalid_argument("polygon must be counterclockwise");

    // Boundary samples, exact on the polygon edges.
    std::vector<Vec2> points;
    size_t k = polygon.size();
    for (size_t i = 0; i < k; ++i) {
        Vec2 a = polygon[i], b = polygon[(i + 1) % k];
        double len = (b - a).norm();
        int segs = std::max(1, static_cast<int>(std::ceil(len / target_edge_length)));
        for (int j = 0; j < segs; ++j) points.push_back(a + (b - a) * (double(j) / segs));
    }
    const int n_boundary = static_cast<int>(points.size());

    // Hex lattice interior candidates, clear of the boundary.
    Vec2 lo = polygon[0], hi = polygon[0];
    for (const Vec2& p : polygon) {
        lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y);
    }
    double s = target_edge_length;
    double row_h = s * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double y = lo.y + 0.5 * row_h; y < hi.y; y += row_h, ++row) {
        double x0 = lo.x + ((row % 2) ? 0.75 * s : 0.25 * s);
        for (double x = x0; x < hi.x; x += s) {
            Vec2 p{x, y};
            if (!point_in_polygon(p, polygon)) continue;
            if (distance_to_polygon(p, polygon) < 0.6 * s) continue;
            points.push_back(p);
        }
    }

    auto triangulate_inside = [&](const std::vector<Vec2>& pts) {
        auto tris = delaunay_triangulate(pts);
        std::vector<std::array<int, 3>> kept;
        for (const auto& tv : tris) {
            Vec2 cen = (pts[tv[0]] + pts[tv[1]] + pts[tv[2]]) / 3.0;
            if (point_in_polygon(cen, polygon)) kept.push_back(tv);
        }
        return kept;
    };

    auto tris = triangulate_inside(points);
    // Laplacian smoothing of interior points with re-triangulation.
    for (int pass = 0; pass < 4; ++pass) {
        std::vector<Vec2> acc(points.size(), {0.0, 0.0});
        std::vector<int> deg(points.size(), 0);
        for (const auto& tv : tris) {
            for (int i = 0; i < 3; ++i) {
                int a = tv[i], b = tv[(i + 1) % 3];
                acc[a] += points[b]; acc[b] += points[a];
                deg[a]++; deg[b]++;
            }
        }
        for (size_t i = n_boundary; i < points.size(); ++i) {
            if (deg[i] == 0) continue;
            Vec2 cand = acc[i] / double(deg[i]);
            if (distance_to_polygon(cand, polygon) >= 0.5 * s && point_in_polygon(cand, polygon))
                points[i] = cand;
        }
        tris = triangulate_inside(points);
    }

    TriangleMesh mesh;
    mesh.vertices = points;
    mesh.triangles = tris;
    mesh.region.assign(mesh.triangles.size(), Region::body);
    mesh.rebuild_boundary();

    if (std::fabs(mesh.area() - signed_area) > 1e-9 * signed_area)
        throw std::runtime_error("polygon meshing failed to cover the domain");
    if (mesh.min_angle_deg() < kMinTriangleAngleDeg)
        throw std::runtime_error("polygon meshing produced elements below the quality floor");
    return mesh;
}

// Thickness field per boundary-map node (length units), i.e. eps*h evaluated
// nodewise. Extrudes the boundary outward into a structured layer of graded
// sublayers; body triangles are copied verbatim.
inline TriangleMesh extrude_layer(const TriangleMesh& mesh, const BoundaryMap& bmap,
                                  const std::vector<double>& h, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("extrude_layer: eps must be positive");
    if (static_cast<int>(h.size()) != bmap.size())
        throw std::invalid_argument("extrude_layer: h size mismatch");
    for (double v : h)
        if (v < 0.0) throw std::invalid_argument("extrude_layer: negative insulation");

    const int nb = bmap.size();
    // Vertex normals: length-weighted average of the two incident edge normals.
    std::vector<Vec2> normals(nb);
    std::vector<int> prev_edge(nb, -1);
    for (int i = 0; i < nb; ++i) prev_edge[bmap.edge_next[i]] = i;
    for (int i = 0; i < nb; ++i) {
        int a = bmap.node_ids[i];
        int bnext = bmap.node_ids[bmap.edge_next[i]];
        int bprev = bmap.node_ids[prev_edge[i]];
        Vec2 tn = (mesh.vertices[bnext] - mesh.vertices[a]);
        Vec2 tp = (mesh.vertices[a] - mesh.vertices[bprev]);
        normals[i] = (tn.rot_cw().normalized() * tn.norm() +
                      tp.rot_cw().normalized() * tp.norm()).normalized();
    }

    const int sublayers = std::max(1, static_cast<int>(std::ceil(2.0 / std::sqrt(eps))));
    // Geometric grading, thinnest sublayer at the body interface.
    const double ratio = 1.3;
    std::vector<double> frac(sublayers + 1, 0.0);
    {
        double total = (std::pow(ratio, sublayers) - 1.0) / (ratio - 1.0);
        double acc = 0.0;
        for (int j = 1; j <= sublayers; ++j) {
            acc += std::pow(ratio, j - 1);
            frac[j] = acc / total;
        }
    }

    TriangleMesh out;
    out.vertices = mesh.vertices;
    out.triangles = mesh.triangles;
    out.region = mesh.region;

    const double scale = std::sqrt(mesh.area());
    const double thick_tol = 1e-14 * scale;
    // column[i][j]: vertex at sigma_i + frac[j] * eps*h_i * nu_i; column[i][0]
    // is the original boundary vertex.
    std::vector<std::vector<int>> column(nb);
    std::vector<double> thickness(nb);
    for (int i = 0; i < nb; ++i) {
        thickness[i] = eps * h[i];
        column[i].push_back(bmap.node_ids[i]);
        if (thickness[i] <= thick_tol) { thickness[i] = 0.0; continue; }
        for (int j = 1; j <= sublayers; ++j) {
            column[i].push_back(out.num_vertices());
            out.vertices.push_back(mesh.vertices[bmap.node_ids[i]] +
                                   normals[i] * (frac[j] * thickness[i]));
        }
    }

    size_t first_layer_tri = out.triangles.size();
    for (int i = 0; i < nb; ++i) {
        int kn = bmap.edge_next[i];
        bool ti = thickness[i] > 0.0, tk = thickness[kn] > 0.0;
        if (ti && tk) {
            for (int j = 0; j < sublayers; ++j) {
                int a0 = column[i][j], b0 = column[kn][j];
                int a1 = column[i][j + 1], b1 = column[kn][j + 1];
                out.triangles.push_back({b0, a0, a1});
                out.triangles.push_back({b0, a1, b1});
            }
        } else if (ti && !tk) {
            int apex = column[kn][0];
            for (int j = 0; j < sublayers; ++j)
                out.triangles.push_back({apex, column[i][j], column[i][j + 1]});
        } else if (!ti && tk) {
            int apex = column[i][0];
            for (int j = 0; j < sublayers; ++j)
                out.triangles.push_back({apex, column[kn][j + 1], column[kn][j]});
        }
    }
    out.region.resize(out.triangles.size(), Region::layer);

    for (size_t t = first_layer_tri; t < out.triangles.size(); ++t) {
        if (out.tri_area(static_cast<int>(t)) <= 0.0)
            throw std::runtime_error("layer fold-over; reduce eps");
    }
    out.rebuild_boundary();
    // Distant-lobe collisions do not invert elements locally; catch them by
    // checking the new outer boundary for crossings.
    {
        const auto& be = out.boundary_edges;
        for (size_t i = 0; i < be.size(); ++i)
            for (size_t j = i + 1; j < be.size(); ++j)
                if (segments_cross(out.vertices[be[i].a], out.vertices[be[i].b],
                                   out.vertices[be[j].a], out.vertices[be[j].b]))
                    throw std::runtime_error("layer fold-over; reduce eps");
    }
    return out;
}

// Plain-text mesh format:
//   line 1:  V T E
//   V lines: x y
//   T lines: i j k tag        (tag: 0 body, 1 layer)
//   E lines: a b nx ny        (oriented boundary edge with outward normal)
inline void save_mesh(const TriangleMesh& mesh, std::ostream& os) {
    os.precision(17);
    os << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' '
       << mesh.boundary_edges.size() << '\n';
    for (const Vec2& v : mesh.vertices) os << v.x << ' ' << v.y << '\n';
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tv = mesh.triangles[t];
        os << tv[0] << ' ' << tv[1] << ' ' << tv[2] << ' '
           << (mesh.region[t] == Region::body ? 0 : 1) << '\n';
    }
    for (const auto& e : mesh.boundary_edges)
        os << e.a << ' ' << e.b << ' ' << e.normal.x << ' ' << e.normal.y << '\n';
}

inline void save_mesh(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open mesh file for writing: " + path);
    save_mesh(mesh, os);
}

inline TriangleMesh load_mesh(std::istream& is) {
    TriangleMesh mesh;
    int nv = 0, nt = 0, ne = 0;
    if (!(is >> nv >> nt >> ne)) throw std::runtime_error("mesh file: bad header");
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices)
        if (!(is >> v.x >> v.y)) throw std::runtime_error("mesh file: bad vertex line");
    mesh.triangles.resize(nt);
    mesh.region.resize(nt);
    for (int t = 0; t < nt; ++t) {
        int tag = 0;
        if (!(is >> mesh.triangles[t][0] >> mesh.triangles[t][1] >> mesh.triangles[t][2] >> tag))
            throw std::runtime_error("mesh file: bad triangle line");
        mesh.region[t] = tag == 0 ? Region::body : Region::layer;
    }
    mesh.boundary_edges.resize(ne);
    for (auto& e : mesh.boundary_edges)
        if (!(is >> e.a >> e.b >> e.normal.x >> e.normal.y))
            throw std::runtime_error("mesh file: bad boundary edge line");
    validate_mesh(mesh);
    return mesh;
}

inline TriangleMesh load_mesh(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open mesh file: " + path);
    return load_mesh(is);
}

}  // namespace robin
