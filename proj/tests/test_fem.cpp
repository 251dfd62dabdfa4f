#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "robin/fem.hpp"
#include "robin/mesh.hpp"
#include "robin/radial.hpp"

using namespace robin;
using std::numbers::pi;

namespace {

struct LimitSetup {
    TriangleMesh mesh;
    BoundaryMap bmap;
    std::vector<double> h;
};

LimitSetup disk_setup(int level, double h_const) {
    LimitSetup s;
    s.mesh = make_disk_mesh(1.0, level);
    s.bmap = BoundaryMap::from_mesh(s.mesh);
    s.h.assign(s.bmap.size(), h_const);
    return s;
}

// Test-only oracle: a plain Robin assembly (boundary weight beta) written
// independently of the library path, for the h = 0 cross-check.
LinearSystem assemble_plain_robin(const TriangleMesh& mesh, double beta, double f_const) {
    int n = mesh.num_vertices();
    std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
    std::vector<double> rhs(n, 0.0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tv = mesh.triangles[t];
        Vec2 a = mesh.vertices[tv[0]], b = mesh.vertices[tv[1]], c = mesh.vertices[tv[2]];
        double area = triangle_area(a, b, c);
        Vec2 g[3] = {{(b.y - c.y) / (2 * area), (c.x - b.x) / (2 * area)},
                     {(c.y - a.y) / (2 * area), (a.x - c.x) / (2 * area)},
                     {(a.y - b.y) / (2 * area), (b.x - a.x) / (2 * area)}};
        for (int i = 0; i < 3; ++i) {
            rhs[tv[i]] += f_const * area / 3.0;
            for (int j = 0; j < 3; ++j) dense[tv[i]][tv[j]] += area * g[i].dot(g[j]);
        }
    }
    for (const auto& e : mesh.boundary_edges) {
        double len = (mesh.vertices[e.b] - mesh.vertices[e.a]).norm();
        dense[e.a][e.a] += beta * len / 2.0;
        dense[e.b][e.b] += beta * len / 2.0;
    }
    std::vector<std::array<int, 2>> idx;
    std::vector<double> val;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (dense[r][c] != 0.0) { idx.push_back({r, c}); val.push_back(dense[r][c]); }
    return {SparseMatrix::from_triplets(n, idx, val), rhs};
}

}  // namespace

TEST_CASE("zero source: zero rhs, zero minimizer, zero energy") {
    LimitSetup s = disk_setup(2, 0.5);
    ProblemParams p{1.0, 1.0, 2};
    LinearSystem sys = assemble_limit_energy(s.mesh, s.bmap, s.h, p, SourceField::uniform(0.0));
    for (double b : sys.rhs) CHECK(b == 0.0);
    ScalarField u = solve(sys, 1e-10);
    for (double v : u) CHECK(v == 0.0);
    CHECK(limit_energy_value(s.mesh, s.bmap, s.h, p, SourceField::uniform(0.0), u) == 0.0);
}

TEST_CASE("assembled matrices are exactly symmetric") {
    LimitSetup s = disk_setup(2, 0.3);
    ProblemParams p{2.0, 1.0, 2};
    LinearSystem sys = assemble_limit_energy(s.mesh, s.bmap, s.h, p, SourceField::uniform(1.0));
    CHECK(sys.matrix.max_asymmetry() == 0.0);

    TriangleMesh me = extrude_layer(s.mesh, s.bmap, s.h, 0.1);
    LinearSystem sys2 = assemble_layer_energy(me, 0.1, p, SourceField::uniform(1.0));
    CHECK(sys2.matrix.max_asymmetry() == 0.0);
}

TEST_CASE("negative insulation rejected at assembly") {
    LimitSetup s = disk_setup(1, 0.5);
    s.h[3] = -1e-6;
    ProblemParams p{1.0, 1.0, 2};
    CHECK_THROWS_WITH(assemble_limit_energy(s.mesh, s.bmap, s.h, p, SourceField::uniform(1.0)),
                      "negative insulation");
}

TEST_CASE("disk limit problem reproduces the radial boundary value") {
    double m = 1.7;
    double h_const = m / (2 * pi);
    LimitSetup s = disk_setup(4, h_const);
    ProblemParams p{1.0, m, 2};
    LinearSystem sys = assemble_limit_energy(s.mesh, s.bmap, s.h, p, SourceField::uniform(1.0));
    ScalarField u = solve(sys, 1e-10);
    double expected = (1.0 + h_const) / 2.0;  // R(1+beta h)/(n beta)
    for (int id : s.bmap.node_ids)
        CHECK(u[id] == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("square with h = 0 agrees with an independent plain Robin assembly") {
    TriangleMesh mesh = make_polygon_mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0.1);
    BoundaryMap bmap = BoundaryMap::from_mesh(mesh);
    std::vector<double> h(bmap.size(), 0.0);
    ProblemParams p{1.0, 1.0, 2};
    LinearSystem sys = assemble_limit_energy(mesh, bmap, h, p, SourceField::uniform(1.0));
    LinearSystem oracle = assemble_plain_robin(mesh, 1.0, 1.0);
    ScalarField u = solve(sys, 1e-12);
    ScalarField v = solve(oracle, 1e-12);
    for (size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(v[i]).epsilon(1e-9));
}

TEST_CASE("layer assembly with eps = 1 degenerates to one material") {
    LimitSetup s = disk_setup(2, 0.5);
    ProblemParams p{1.0, 1.0, 2};
    TriangleMesh me = extrude_layer(s.mesh, s.bmap, s.h, 1.0);
    LinearSystem sys = assemble_layer_energy(me, 1.0, p, SourceField::uniform(0.0));

    // same mesh, all triangles re-tagged body, assembled as a limit problem
    TriangleMesh single = me;
    single.region.assign(single.triangles.size(), Region::body);
    BoundaryMap outer = BoundaryMap::from_mesh(single);
    std::vector<double> h0(outer.size(), 0.0);
    LinearSystem ref = assemble_limit_energy(single, outer, h0, p, SourceField::uniform(0.0));
    REQUIRE(sys.matrix.val.size() == ref.matrix.val.size());
    for (size_t k = 0; k < sys.matrix.val.size(); ++k)
        CHECK(sys.matrix.val[k] == doctest::Approx(ref.matrix.val[k]).epsilon(1e-14));
}

TEST_CASE("layer problem approaches the radial eps-oracle") {
    double h_const = 0.5, eps = 0.05;
    LimitSetup s = disk_setup(4, h_const);
    ProblemParams p{1.0, 1.0, 2};
    TriangleMesh me = extrude_layer(s.mesh, s.bmap, s.h, eps);
    LinearSystem sys = assemble_layer_energy(me, eps, p, SourceField::uniform(1.0));
    ScalarField u = solve(sys, 1e-10);
    RadialSolution oracle = layer_ball_solution(1.0, 2, 1.0, h_const, eps);
    // O(eps) + O(mesh) agreement at the body boundary
    for (int id : s.bmap.node_ids)
        CHECK(std::fabs(u[id] - oracle.boundary_value) < 0.05 * oracle.boundary_value);
}

TEST_CASE("layer problem: zero source gives zero energy") {
    LimitSetup s = disk_setup(2, 0.5);
    ProblemParams p{1.0, 1.0, 2};
    TriangleMesh me = extrude_layer(s.mesh, s.bmap, s.h, 0.1);
    LinearSystem sys = assemble_layer_energy(me, 0.1, p, SourceField::uniform(0.0));
    ScalarField u = solve(sys, 1e-10);
    CHECK(layer_energy_value(me, 0.1, p, SourceField::uniform(0.0), u) == 0.0);
}

TEST_CASE("solver: identity system converges in one iteration") {
    std::vector<std::array<int, 2>> idx{{0, 0}, {1, 1}, {2, 2}};
    std::vector<double> val{1.0, 1.0, 1.0};
    LinearSystem sys{SparseMatrix::from_triplets(3, idx, val), {3.0, -1.0, 2.0}};
    ScalarField x = solve(sys, 1e-12, 2);
    CHECK(x[0] == doctest::Approx(3.0));
    CHECK(x[1] == doctest::Approx(-1.0));
    CHECK(x[2] == doctest::Approx(2.0));
}

TEST_CASE("solver: deterministic energy across max_iter settings") {
    LimitSetup s = disk_setup(3, 0.5);
    ProblemParams p{1.0, 1.0, 2};
    SourceField f = SourceField::uniform(1.0);
    LinearSystem sys = assemble_limit_energy(s.mesh, s.bmap, s.h, p, f);
    ScalarField u1 = solve(sys, 1e-11, 50000);
    ScalarField u2 = solve(sys, 1e-11, 90000);
    double e1 = quadratic_energy(sys, u1), e2 = quadratic_energy(sys, u2);
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-10));
    // residual contract
    std::vector<double> Ax(u1.size());
    sys.matrix.multiply(u1, Ax);
    double rn = 0.0, bn = 0.0;
    for (size_t i = 0; i < u1.size(); ++i) {
        rn += (Ax[i] - sys.rhs[i]) * (Ax[i] - sys.rhs[i]);
        bn += sys.rhs[i] * sys.rhs[i];
    }
    CHECK(std::sqrt(rn) <= 1e-11 * std::sqrt(bn));
}

TEST_CASE("solver: singular pure-Neumann system fails to converge") {
    // stiffness-only matrix (beta = 0 mock) with an incompatible rhs
    TriangleMesh mesh = make_disk_mesh(1.0, 1);
    detail::Assembler asmbl(mesh.num_vertices());
    for (int t = 0; t < mesh.num_triangles(); ++t) asmbl.add_stiffness(mesh, t, 1.0);
    LinearSystem sys = asmbl.finish();
    sys.rhs.assign(mesh.num_vertices(), 1.0);  // not orthogonal to constants
    CHECK_THROWS_AS(solve(sys, 1e-12, 50), std::runtime_error);
}

TEST_CASE("energy_value agrees with the quadratic form at arbitrary fields") {
    LimitSetup s = disk_setup(3, 0.7);
    ProblemParams p{1.3, 1.0, 2};
    SourceField f = SourceField::uniform(2.0);
    LinearSystem sys = assemble_limit_energy(s.mesh, s.bmap, s.h, p, f);

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        ScalarField v(s.mesh.num_vertices());
        for (double& x : v) x = dist(rng);
        double direct = limit_energy_value(s.mesh, s.bmap, s.h, p, f, v);
        double quad = quadratic_energy(sys, v);
        CHECK(direct == doctest::Approx(quad).epsilon(1e-12));
    }

    TriangleMesh me = extrude_layer(s.mesh, s.bmap, s.h, 0.1);
    LinearSystem lsys = assemble_layer_energy(me, 0.1, p, f);
    ScalarField v(me.num_vertices());
    for (double& x : v) x = dist(rng);
    CHECK(layer_energy_value(me, 0.1, p, f, v) ==
          doctest::Approx(quadratic_energy(lsys, v)).epsilon(1e-12));
}

TEST_CASE("energy at the minimizer equals minus half the heat content (f = 1)") {
    LimitSetup s = disk_setup(4, 1.0);
    ProblemParams p{1.0, 2 * pi, 2};
    SourceField f = SourceField::uniform(1.0);
    LinearSystem sys = assemble_limit_energy(s.mesh, s.bmap, s.h, p, f);
    ScalarField u = solve(sys, 1e-12);
    double F = limit_energy_value(s.mesh, s.bmap, s.h, p, f, u);
    double Q = heat_content(s.mesh, u);
    CHECK(F == doctest::Approx(-0.5 * Q).epsilon(1e-8));
}

TEST_CASE("scaling the minimizer strictly increases the energy") {
    LimitSetup s = disk_setup(2, 1.0);
    ProblemParams p{1.0, 1.0, 2};
    SourceField f = SourceField::uniform(1.0);
    LinearSystem sys = assemble_limit_energy(s.mesh, s.bmap, s.h, p, f);
    ScalarField u = solve(sys, 1e-12);
    ScalarField u2 = u;
    for (double& x : u2) x *= 2.0;
    CHECK(limit_energy_value(s.mesh, s.bmap, s.h, p, f, u2) >
          limit_energy_value(s.mesh, s.bmap, s.h, p, f, u));
}

TEST_CASE("energy at the minimizer is below 100 random perturbations") {
    LimitSetup s = disk_setup(2, 0.5);
    ProblemParams p{1.0, 1.0, 2};
    SourceField f = SourceField::uniform(1.0);
    LinearSystem sys = assemble_limit_energy(s.mesh, s.bmap, s.h, p, f);
    ScalarField u = solve(sys, 1e-12);
    double Fu = limit_energy_value(s.mesh, s.bmap, s.h, p, f, u);
    std::mt19937 rng(7);
    std::normal_distribution<double> dist(0.0, 0.01);
    for (int trial = 0; trial < 100; ++trial) {
        ScalarField v = u;
        for (double& x : v) x += dist(rng);
        CHECK(limit_energy_value(s.mesh, s.bmap, s.h, p, f, v) >= Fu);
    }
}

TEST_CASE("discrete maximum principle surrogate") {
    LimitSetup s = disk_setup(3, 1.0);
    ProblemParams p{1.0, 2 * pi, 2};
    LinearSystem sys = assemble_limit_energy(s.mesh, s.bmap, s.h, p, SourceField::uniform(1.0));
    ScalarField u = solve(sys, 1e-10);
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::fabs(v));
    double umin = *std::min_element(u.begin(), u.end());
    CHECK(umin >= -1e-10 * umax);
    // f = 1 on the disk stays above the bare-Robin barrier K = R/(n beta)
    double K = limit_ball_solution(1.0, 2, 1.0, 0.0).boundary_value;
    CHECK(umin >= K * (1.0 - 1e-3));
}

TEST_CASE("mesh refinement convergence of energy vs the radial oracle") {
    ProblemParams p{1.0, 2 * pi, 2};
    SourceField f = SourceField::uniform(1.0);
    RadialSolution oracle = limit_ball_solution(1.0, 2, 1.0, 1.0);
    double exact_energy = -0.5 * oracle.heat_content;
    std::vector<double> errs, hs;
    for (int lvl : {2, 3, 4}) {
        LimitSetup s = disk_setup(lvl, 1.0);
        LinearSystem sys = assemble_limit_energy(s.mesh, s.bmap, s.h, p, f);
        ScalarField u = solve(sys, 1e-12);
        errs.push_back(std::fabs(quadratic_energy(sys, u) - exact_energy));
        hs.push_back(s.mesh.max_edge_length());
    }
    for (size_t i = 1; i < errs.size(); ++i) {
        double order = std::log(errs[i - 1] / errs[i]) / std::log(hs[i - 1] / hs[i]);
        CHECK(order >= 1.8);
    }
}

TEST_CASE("heat content quadrature") {
    TriangleMesh mesh = make_disk_mesh(1.0, 3);
    ScalarField zero(mesh.num_vertices(), 0.0);
    CHECK(heat_content(mesh, zero) == 0.0);
    ScalarField one(mesh.num_vertices(), 1.0);
    CHECK(heat_content(mesh, one) == doctest::Approx(mesh.area()).epsilon(1e-14));

    BoundaryMap bmap = BoundaryMap::from_mesh(mesh);
    std::vector<double> h(bmap.size(), 1.0);
    ProblemParams p{1.0, 2 * pi, 2};
    LinearSystem sys = assemble_limit_energy(mesh, bmap, h, p, SourceField::uniform(1.0));
    ScalarField u = solve(sys, 1e-11);
    RadialSolution oracle = limit_ball_solution(1.0, 2, 1.0, 1.0);
    CHECK(heat_content(mesh, u) == doctest::Approx(oracle.heat_content).epsilon(1e-3));
}

TEST_CASE("field/mesh mismatch rejected") {
    TriangleMesh mesh = make_disk_mesh(1.0, 1);
    ScalarField wrong(mesh.num_vertices() + 1, 0.0);
    CHECK_THROWS(heat_content(mesh, wrong));
    BoundaryMap bmap = BoundaryMap::from_mesh(mesh);
    std::vector<double> h(bmap.size(), 0.0);
    ProblemParams p{1.0, 1.0, 2};
    CHECK_THROWS(limit_energy_value(mesh, bmap, h, p, SourceField::uniform(1.0), wrong));
}

TEST_CASE("nodal source field agrees with the uniform one when constant") {
    LimitSetup s = disk_setup(2, 0.5);
    ProblemParams p{1.0, 1.0, 2};
    SourceField fu = SourceField::uniform(2.5);
    SourceField fn = SourceField::from_nodal(std::vector<double>(s.mesh.num_vertices(), 2.5));
    LinearSystem a = assemble_limit_energy(s.mesh, s.bmap, s.h, p, fu);
    LinearSystem b = assemble_limit_energy(s.mesh, s.bmap, s.h, p, fn);
    for (size_t i = 0; i < a.rhs.size(); ++i)
        CHECK(a.rhs[i] == doctest::Approx(b.rhs[i]).epsilon(1e-14));
    CHECK_THROWS(SourceField::from_nodal({1.0, -0.5}));
}
