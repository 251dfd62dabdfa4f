#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "robin/mesh.hpp"

namespace robin {

struct ProblemParams {
    double beta = 1.0;   // convection coefficient, > 0
    double mass = 1.0;   // total insulation mass, > 0
    int dim = 2;         // only the radial oracle and bounds use n != 2

    void check() const {
        if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
        if (mass <= 0.0) throw std::invalid_argument("mass must be positive");
        if (dim < 2) throw std::invalid_argument("dimension must be at least 2");
    }
};

using ScalarField = std::vector<double>;  // nodal values, one per mesh vertex

// Heat source density f >= 0: a constant or nodal values on body vertices.
struct SourceField {
    bool constant = true;
    double value = 0.0;
    std::vector<double> nodal;

    static SourceField uniform(double v) {
        if (v < 0.0) throw std::invalid_argument("source must be non-negative");
        SourceField f;
        f.value = v;
        return f;
    }
    static SourceField from_nodal(std::vector<double> values) {
        for (double v : values)
            if (v < 0.0) throw std::invalid_argument("source must be non-negative");
        SourceField f;
        f.constant = false;
        f.nodal = std::move(values);
        return f;
    }
    double at(int vertex) const { return constant ? value : nodal.at(vertex); }
};

// Symmetric sparse matrix in compressed row layout.
struct SparseMatrix {
    int n = 0;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    static SparseMatrix from_triplets(int n, std::vector<std::array<int, 2>> idx,
                                      std::vector<double> v) {
        // Sort by (row, col) and merge duplicates.
        std::vector<int> order(idx.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return idx[a] < idx[b];
        });
        SparseMatrix m;
        m.n = n;
        m.row_ptr.assign(n + 1, 0);
        int last_r = -1, last_c = -1;
        for (int o : order) {
            int r = idx[o][0], c = idx[o][1];
            if (r == last_r && c == last_c) {
                m.val.back() += v[o];
            } else {
                m.col.push_back(c);
                m.val.push_back(v[o]);
                m.row_ptr[r + 1]++;
                last_r = r; last_c = c;
            }
        }
        for (int r = 0; r < n; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
        return m;
    }

    void multiply(const std::vector<double>& x, std::vector<double>& y) const {
        for (int r = 0; r < n; ++r) {
            double s = 0.0;
            for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
            y[r] = s;
        }
    }

    double entry(int r, int c) const {
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (col[k] == c) return val[k];
        return 0.0;
    }

    double max_asymmetry() const {
        double worst = 0.0;
        for (int r = 0; r < n; ++r)
            for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
                worst = std::max(worst, std::fabs(val[k] - entry(col[k], r)));
        return worst;
    }
};

struct LinearSystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
};

namespace detail {

// P1 gradients: grad(lambda_i) for the three nodal basis functions.
inline std::array<Vec2, 3> p1_gradients(const Vec2& a, const Vec2& b, const Vec2& c,
                                        double area) {
    double inv = 1.0 / (2.0 * area);
    return {Vec2{(b.y - c.y) * inv, (c.x - b.x) * inv},
            Vec2{(c.y - a.y) * inv, (a.x - c.x) * inv},
            Vec2{(a.y - b.y) * inv, (b.x - a.x) * inv}};
}

struct Assembler {
    std::vector<std::array<int, 2>> idx;
    std::vector<double> val;
    std::vector<double> rhs;
    int n;

    explicit Assembler(int n_) : n(n_) { rhs.assign(n, 0.0); }

    void add(int r, int c, double v) {
        idx.push_back({r, c});
        val.push_back(v);
    }

    // Stiffness kappa * grad u . grad v over one triangle.
    void add_stiffness(const TriangleMesh& mesh, int t, double kappa) {
        const auto& tv = mesh.triangles[t];
        double area = mesh.tri_area(t);
        auto g = p1_gradients(mesh.vertices[tv[0]], mesh.vertices[tv[1]],
                              mesh.vertices[tv[2]], area);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                add(tv[i], tv[j], kappa * area * g[i].dot(g[j]));
    }

    // Load integral f * v over one triangle with the consistent P1 mass.
    void add_load(const TriangleMesh& mesh, int t, const SourceField& f) {
        const auto& tv = mesh.triangles[t];
        double area = mesh.tri_area(t);
        if (f.constant) {
            for (int i = 0; i < 3; ++i) rhs[tv[i]] += f.value * area / 3.0;
        } else {
            for (int i = 0; i < 3; ++i) {
                double s = 0.0;
                for (int j = 0; j < 3; ++j) s += (i == j ? 2.0 : 1.0) * f.at(tv[j]);
                rhs[tv[i]] += area / 12.0 * s;
            }
        }
    }

    LinearSystem finish() {
        return {SparseMatrix::from_triplets(n, std::move(idx), std::move(val)),
                std::move(rhs)};
    }
};

}  // namespace detail

// Discrete limit energy F(v,h): stiffness over the body, lumped trapezoidal
// boundary mass with weight beta/(1+beta h) per boundary node, load from f.
// h is indexed by boundary-map node order.
inline LinearSystem assemble_limit_energy(const TriangleMesh& mesh, const BoundaryMap& bmap,
                                          const std::vector<double>& h,
                                          const ProblemParams& params, const SourceField& f) {
    params.check();
    if (static_cast<int>(h.size()) != bmap.size())
        throw std::invalid_argument("h must be defined on all boundary nodes");
    for (double v : h)
        if (v < 0.0) throw std::invalid_argument("negative insulation");
    for (Region r : mesh.region)
        if (r != Region::body)
            throw std::invalid_argument("limit energy is assembled on a body-only mesh");

    detail::Assembler asmbl(mesh.num_vertices());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        asmbl.add_stiffness(mesh, t, 1.0);
        asmbl.add_load(mesh, t, f);
    }
    for (int i = 0; i < bmap.size(); ++i) {
        double w = params.beta / (1.0 + params.beta * h[i]);
        asmbl.add(bmap.node_ids[i], bmap.node_ids[i], bmap.node_weights[i] * w);
    }
    return asmbl.finish();
}

// Reinforcement energy with boundary weight 1/h (the beta -> infinity limit
// of the Robin weight); needs h > 0 everywhere.
inline LinearSystem assemble_reinforcement_energy(const TriangleMesh& mesh,
                                                  const BoundaryMap& bmap,
                                                  const std::vector<double>& h,
                                                  const SourceField& f) {
    if (static_cast<int>(h.size()) != bmap.size())
        throw std::invalid_argument("h must be defined on all boundary nodes");
    for (double v : h)
        if (v <= 0.0) throw std::invalid_argument("Dirichlet limit requires h > 0");
    for (Region r : mesh.region)
        if (r != Region::body)
            throw std::invalid_argument("reinforcement energy is assembled on a body-only mesh");

    detail::Assembler asmbl(mesh.num_vertices());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        asmbl.add_stiffness(mesh, t, 1.0);
        asmbl.add_load(mesh, t, f);
    }
    for (int i = 0; i < bmap.size(); ++i)
        asmbl.add(bmap.node_ids[i], bmap.node_ids[i], bmap.node_weights[i] / h[i]);
    return asmbl.finish();
}

// Discrete layer energy F_eps(v): unit conductivity on body triangles,
// conductivity eps on layer triangles, Robin mass beta on the outer boundary,
// source supported on the body. The transmission condition at the body-layer
// interface is implicit in the weak form.
inline LinearSystem assemble_layer_energy(const TriangleMesh& mesh_eps, double eps,
                                          const ProblemParams& params, const SourceField& f) {
    params.check();
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    if (mesh_eps.boundary_edges.empty())
        throw std::invalid_argument("missing outer boundary");

    detail::Assembler asmbl(mesh_eps.num_vertices());
    for (int t = 0; t < mesh_eps.num_triangles(); ++t) {
        bool body = mesh_eps.region[t] == Region::body;
        asmbl.add_stiffness(mesh_eps, t, body ? 1.0 : eps);
        if (body) asmbl.add_load(mesh_eps, t, f);
    }
    BoundaryMap outer = BoundaryMap::from_mesh(mesh_eps);
    for (int i = 0; i < outer.size(); ++i)
        asmbl.add(outer.node_ids[i], outer.node_ids[i],
                  outer.node_weights[i] * params.beta);
    return asmbl.finish();
}

// Jacobi-preconditioned conjugate gradient. Deterministic for fixed inputs.
inline ScalarField solve(const LinearSystem& system, double tol = 1e-10,
                         int max_iter = 100000) {
    if (tol <= 0.0 || tol >= 1.0) throw std::invalid_argument("tol must be in (0,1)");
    const SparseMatrix& A = system.matrix;
    const std::vector<double>& b = system.rhs;
    const int n = A.n;

    double bnorm = 0.0;
    for (double v : b) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    ScalarField x(n, 0.0);
    if (bnorm == 0.0) return x;

    std::vector<double> diag(n, 1.0);
    for (int r = 0; r < n; ++r) {
        double d = A.entry(r, r);
        if (d > 0.0) diag[r] = 1.0 / d;
    }

    std::vector<double> res = b, z(n), p(n), Ap(n);
    for (int i = 0; i < n; ++i) z[i] = diag[i] * res[i];
    p = z;
    double rz = 0.0;
    for (int i = 0; i < n; ++i) rz += res[i] * z[i];

    double resnorm = bnorm;
    for (int it = 0; it < max_iter; ++it) {
        if (resnorm <= tol * bnorm) return x;
        A.multiply(p, Ap);
        double pAp = 0.0;
        for (int i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        if (pAp <= 0.0) break;  // lost positive definiteness
        double alpha = rz / pAp;
        for (int i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            res[i] -= alpha * Ap[i];
        }
        double rz_new = 0.0;
        resnorm = 0.0;
        for (int i = 0; i < n; ++i) {
            z[i] = diag[i] * res[i];
            rz_new += res[i] * z[i];
            resnorm += res[i] * res[i];
        }
        resnorm = std::sqrt(resnorm);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    if (resnorm <= tol * bnorm) return x;
    throw std::runtime_error("conjugate gradient did not converge; relative residual " +
                             std::to_string(resnorm / bnorm));
}

// 1/2 x^T A x - b^T x, the discrete energy of an assembled quadratic form.
inline double quadratic_energy(const LinearSystem& system, const ScalarField& x) {
    if (static_cast<int>(x.size()) != system.matrix.n)
        throw std::invalid_argument("field size does not match system");
    std::vector<double> Ax(x.size());
    system.matrix.multiply(x, Ax);
    double e = 0.0;
    for (size_t i = 0; i < x.size(); ++i) e += 0.5 * x[i] * Ax[i] - system.rhs[i] * x[i];
    return e;
}

namespace detail {

inline void check_field(const TriangleMesh& mesh, const ScalarField& v) {
    if (static_cast<int>(v.size()) != mesh.num_vertices())
        throw std::invalid_argument("field does not match mesh");
}

inline double dirichlet_part(const TriangleMesh& mesh, const ScalarField& v,
                             double body_kappa, double layer_kappa) {
    double e = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tv = mesh.triangles[t];
        double area = mesh.tri_area(t);
        auto g = p1_gradients(mesh.vertices[tv[0]], mesh.vertices[tv[1]],
                              mesh.vertices[tv[2]], area);
        Vec2 grad{0.0, 0.0};
        for (int i = 0; i < 3; ++i) grad += g[i] * v[tv[i]];
        double kappa = mesh.region[t] == Region::body ? body_kappa : layer_kappa;
        e += 0.5 * kappa * grad.norm2() * area;
    }
    return e;
}

inline double load_part(const TriangleMesh& mesh, const ScalarField& v,
                        const SourceField& f) {
    double e = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.region[t] != Region::body) continue;
        const auto& tv = mesh.triangles[t];
        double area = mesh.tri_area(t);
        if (f.constant) {
            e += f.value * area / 3.0 * (v[tv[0]] + v[tv[1]] + v[tv[2]]);
        } else {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    e += area / 12.0 * (i == j ? 2.0 : 1.0) * f.at(tv[i]) * v[tv[j]];
        }
    }
    return e;
}

}  // namespace detail

// F(v,h) evaluated directly from the field, matching the assembled quadratic
// form term by term (same quadratures), so it agrees with quadratic_energy at
// any field to rounding.
inline double limit_energy_value(const TriangleMesh& mesh, const BoundaryMap& bmap,
                                 const std::vector<double>& h, const ProblemParams& params,
                                 const SourceField& f, const ScalarField& v) {
    detail::check_field(mesh, v);
    if (static_cast<int>(h.size()) != bmap.size())
        throw std::invalid_argument("h must be defined on all boundary nodes");
    double e = detail::dirichlet_part(mesh, v, 1.0, 1.0) - detail::load_part(mesh, v, f);
    for (int i = 0; i < bmap.size(); ++i) {
        double vi = v[bmap.node_ids[i]];
        e += 0.5 * bmap.node_weights[i] * params.beta / (1.0 + params.beta * h[i]) * vi * vi;
    }
    return e;
}

inline double layer_energy_value(const TriangleMesh& mesh_eps, double eps,
                                 const ProblemParams& params, const SourceField& f,
                                 const ScalarField& v) {
    detail::check_field(mesh_eps, v);
    double e = detail::dirichlet_part(mesh_eps, v, 1.0, eps) - detail::load_part(mesh_eps, v, f);
    BoundaryMap outer = BoundaryMap::from_mesh(mesh_eps);
    for (int i = 0; i < outer.size(); ++i) {
        double vi = v[outer.node_ids[i]];
        e += 0.5 * outer.node_weights[i] * params.beta * vi * vi;
    }
    return e;
}

// Integral of v over the body triangles, exact for P1 fields.
inline double heat_content(const TriangleMesh& mesh, const ScalarField& v) {
    detail::check_field(mesh, v);
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.region[t] != Region::body) continue;
        const auto& tv = mesh.triangles[t];
        s += mesh.tri_area(t) / 3.0 * (v[tv[0]] + v[tv[1]] + v[tv[2]]);
    }
    return s;
}

// L2 norm over the body, consistent P1 mass quadrature.
inline double l2_norm(const TriangleMesh& mesh, const ScalarField& v) {
    detail::check_field(mesh, v);
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        if (mesh.region[t] != Region::body) continue;
        const auto& tv = mesh.triangles[t];
        double area = mesh.tri_area(t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                s += area / 12.0 * (i == j ? 2.0 : 1.0) * v[tv[i]] * v[tv[j]];
    }
    return std::sqrt(s);
}

inline double h1_norm(const TriangleMesh& mesh, const ScalarField& v) {
    double grad2 = 2.0 * detail::dirichlet_part(mesh, v, 1.0, 0.0);
    double l2 = l2_norm(mesh, v);
    return std::sqrt(grad2 + l2 * l2);
}

// Restriction of a nodal field to the boundary, in boundary-map order.
inline std::vector<double> boundary_trace(const BoundaryMap& bmap, const ScalarField& v) {
    std::vector<double> tr(bmap.size());
    for (int i = 0; i < bmap.size(); ++i) tr[i] = v.at(bmap.node_ids[i]);
    return tr;
}

// CSV export: vertex_id,x,y,value
inline void save_field_csv(const TriangleMesh& mesh, const ScalarField& v,
                           std::ostream& os) {
    detail::check_field(mesh, v);
    os.precision(17);
    os << "vertex_id,x,y,value\n";
    for (int i = 0; i < mesh.num_vertices(); ++i)
        os << i << ',' << mesh.vertices[i].x << ',' << mesh.vertices[i].y << ',' << v[i] << '\n';
}

}  // namespace robin
