#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include "robin/fem.hpp"
#include "robin/radial.hpp"

namespace robin {

// Sharp upper bound for the heat content of the optimally insulated body:
//   (1/(omega_n^{2/n} n^2)) * ( n|Omega|^{1+2/n}/(n+2) + |Omega|^{2/n}(Per/beta + m) )
// Equality holds for balls with uniform insulation.
inline double isoperimetric_bound(double area, double perimeter, const ProblemParams& params) {
    params.check();
    if (area <= 0.0 || perimeter <= 0.0)
        throw std::invalid_argument("area and perimeter must be positive");
    const int n = params.dim;
    double wn = unit_ball_volume(n);
    double a2n = std::pow(area, 2.0 / n);
    return (n * a2n * area / (n + 2) + a2n * (perimeter / params.beta + params.mass)) /
           (std::pow(wn, 2.0 / n) * n * n);
}

// beta -> infinity variant (the reinforcement problem): the convective term
// Per/beta drops out.
inline double isoperimetric_bound_dirichlet(double area, double mass, int n) {
    double wn = unit_ball_volume(n);
    double a2n = std::pow(area, 2.0 / n);
    return (n * a2n * area / (n + 2) + a2n * mass) / (std::pow(wn, 2.0 / n) * n * n);
}

struct LevelSetProfile {
    std::vector<double> t;                  // sampled thresholds
    std::vector<double> mu;                 // |{u > t}|
    std::vector<double> per;                // Per({u > t})
    std::vector<double> boundary_integral;  // int over boundary cap of (1+bh)/(bu)
    std::vector<double> neg_mu_prime;       // -mu'(t), coarea formula
    std::vector<double> lhs_psquare, rhs_psquare;
    std::vector<double> lhs_master, rhs_master;
    double worst_violation_psquare = 0.0;   // max relative signed violation
    double worst_violation_master = 0.0;
};

namespace detail {

// Area of {linear field > t} within one triangle.
inline double superlevel_area(double area, double v0, double v1, double v2, double t) {
    int above = (v0 > t) + (v1 > t) + (v2 > t);
    if (above == 0) return 0.0;
    if (above == 3) return area;
    double v[3] = {v0, v1, v2};
    if (above == 1) {
        for (int i = 0; i < 3; ++i) {
            if (v[i] > t) {
                double d1 = v[i] - v[(i + 1) % 3], d2 = v[i] - v[(i + 2) % 3];
                return area * (v[i] - t) * (v[i] - t) / (d1 * d2);
            }
        }
    }
    for (int i = 0; i < 3; ++i) {
        if (v[i] <= t) {
            double d1 = v[(i + 1) % 3] - v[i], d2 = v[(i + 2) % 3] - v[i];
            if (d1 <= 0.0 || d2 <= 0.0) return area;  // grazing level set
            return area * (1.0 - (t - v[i]) * (t - v[i]) / (d1 * d2));
        }
    }
    return area;
}

// Length of the isoline {linear field = t} within one triangle.
inline double isoline_length(const Vec2& p0, const Vec2& p1, const Vec2& p2,
                             double v0, double v1, double v2, double t) {
    const Vec2* p[3] = {&p0, &p1, &p2};
    double v[3] = {v0, v1, v2};
    Vec2 cross_pts[2];
    int found = 0;
    for (int i = 0; i < 3 && found < 2; ++i) {
        double a = v[i], b = v[(i + 1) % 3];
        if ((a - t) * (b - t) < 0.0) {
            double s = (t - a) / (b - a);
            cross_pts[found++] = *p[i] + (*p[(i + 1) % 3] - *p[i]) * s;
        }
    }
    return found == 2 ? (cross_pts[1] - cross_pts[0]).norm() : 0.0;
}

// Gradient magnitude of a linear field on a CCW triangle.
inline double gradient_norm(const Vec2& p0, const Vec2& p1, const Vec2& p2,
                            double v0, double v1, double v2, double area) {
    Vec2 g = ((p1 - p2).rot_cw() * v0 + (p2 - p0).rot_cw() * v1 + (p0 - p1).rot_cw() * v2) *
             (1.0 / (2.0 * area));
    return g.norm();
}

}  // namespace detail

// Sampled superlevel-set profile of u and the two level-set inequalities the
// heat-content bound rests on, evaluated discretely (marching triangles for
// the isolines, the coarea formula for -mu'). The coarea sum
// sum_T |{u = t} cap T| / |grad u|_T is the exact derivative of the
// piecewise-linear mu for a.e. t; finite differences on the sampled mu would
// smear the kink where the superlevel set detaches from the boundary.
inline LevelSetProfile level_set_diagnostic(const TriangleMesh& mesh, const BoundaryMap& bmap,
                                            const ScalarField& u, const std::vector<double>& h,
                                            const ProblemParams& params, int num_thresholds = 64) {
    detail::check_field(mesh, u);
    if (static_cast<int>(h.size()) != bmap.size())
        throw std::invalid_argument("h must be defined on all boundary nodes");

    double umax = 0.0, umin = 0.0;
    for (double v : u) { umax = std::max(umax, v); umin = std::min(umin, v); }
    if (umax <= 0.0 || umin < -1e-8 * umax)
        throw std::invalid_argument("level-set diagnostic needs a converged non-negative field");

    LevelSetProfile prof;
    const double dt = umax / (num_thresholds + 1);
    for (int k = 1; k <= num_thresholds; ++k) prof.t.push_back(k * dt);

    const int n = params.dim;
    const double wn = unit_ball_volume(n);
    const double total_area = mesh.area(Region::body);

    for (double t : prof.t) {
        double mu = 0.0, iso = 0.0, nmp = 0.0;
        for (int tr = 0; tr < mesh.num_triangles(); ++tr) {
            if (mesh.region[tr] != Region::body) continue;
            const auto& tv = mesh.triangles[tr];
            double area = mesh.tri_area(tr);
            mu += detail::superlevel_area(area, u[tv[0]], u[tv[1]], u[tv[2]], t);
            double len = detail::isoline_length(mesh.vertices[tv[0]], mesh.vertices[tv[1]],
                                                mesh.vertices[tv[2]], u[tv[0]], u[tv[1]],
                                                u[tv[2]], t);
            iso += len;
            if (len > 0.0) {
                double g = detail::gradient_norm(mesh.vertices[tv[0]], mesh.vertices[tv[1]],
                                                 mesh.vertices[tv[2]], u[tv[0]], u[tv[1]],
                                                 u[tv[2]], area);
                if (g > 0.0) nmp += len / g;
            }
        }
        // Boundary contributions: active length enters the perimeter, and the
        // integrand (1+beta h)/(beta u) is integrated by 4-point Gauss on the
        // active portion of each boundary edge.
        static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                     0.3399810435848563, 0.8611363115940526};
        static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                     0.6521451548625461, 0.3478548451374538};
        double blen = 0.0, bint = 0.0;
        for (int i = 0; i < bmap.size(); ++i) {
            double a = u[bmap.node_ids[i]];
            double b = u[bmap.node_ids[bmap.edge_next[i]]];
            double ha = h[i], hb = h[bmap.edge_next[i]];
            double l = bmap.edge_lengths[i];
            double s0, s1;  // active sub-interval in edge parameter
            if (a > t && b > t) { s0 = 0.0; s1 = 1.0; }
            else if (a <= t && b <= t) continue;
            else if (a > t) { s0 = 0.0; s1 = (t - a) / (b - a); }
            else { s0 = (t - a) / (b - a); s1 = 1.0; }
            blen += l * (s1 - s0);
            for (int q = 0; q < 4; ++q) {
                double s = 0.5 * (s0 + s1) + 0.5 * (s1 - s0) * gx[q];
                double us = a + (b - a) * s;
                double hs = ha + (hb - ha) * s;
                bint += 0.5 * (s1 - s0) * l * gw[q] * (1.0 + params.beta * hs) /
                        (params.beta * us);
            }
        }
        prof.mu.push_back(mu);
        prof.per.push_back(iso + blen);
        prof.boundary_integral.push_back(bint);
        prof.neg_mu_prime.push_back(nmp);
    }

    const int K = static_cast<int>(prof.t.size());
    for (int k = 0; k < K; ++k) {
        double lhs_p = prof.per[k] * prof.per[k];
        double rhs_p = prof.mu[k] * (prof.neg_mu_prime[k] + prof.boundary_integral[k]);
        prof.lhs_psquare.push_back(lhs_p);
        prof.rhs_psquare.push_back(rhs_p);
        double scale_p = std::max(lhs_p, 1e-12 * total_area * total_area);
        prof.worst_violation_psquare =
            std::max(prof.worst_violation_psquare, (lhs_p - rhs_p) / scale_p);

        double lhs_m = prof.mu[k];
        double rhs_m = (prof.neg_mu_prime[k] * std::pow(prof.mu[k], 2.0 / n) +
                        std::pow(total_area, 2.0 / n) * prof.boundary_integral[k]) /
                       (std::pow(wn, 2.0 / n) * n * n);
        prof.lhs_master.push_back(lhs_m);
        prof.rhs_master.push_back(rhs_m);
        double scale_m = std::max(lhs_m, 1e-12 * total_area);
        prof.worst_violation_master =
            std::max(prof.worst_violation_master, (lhs_m - rhs_m) / scale_m);
    }
    return prof;
}

inline void save_level_set_csv(const LevelSetProfile& prof, std::ostream& os) {
    os.precision(17);
    os << "t,mu,per,lhs_psquare,rhs_psquare,lhs_master,rhs_master\n";
    for (size_t k = 0; k < prof.t.size(); ++k)
        os << prof.t[k] << ',' << prof.mu[k] << ',' << prof.per[k] << ','
           << prof.lhs_psquare[k] << ',' << prof.rhs_psquare[k] << ','
           << prof.lhs_master[k] << ',' << prof.rhs_master[k] << '\n';
}

struct DirichletLimitReport {
    std::vector<double> betas;
    std::vector<double> l2_gaps;        // ||u_beta - v||_L2
    std::vector<double> orders;         // empirical orders in 1/beta
    double reinforcement_heat = 0.0;    // integral of v
};

// Convergence of the Robin solutions u_beta to the reinforcement solution v
// (boundary weight 1/h) as beta grows. Needs h > 0 everywhere.
inline DirichletLimitReport dirichlet_limit_check(const TriangleMesh& mesh,
                                                  const BoundaryMap& bmap,
                                                  const std::vector<double>& h,
                                                  const SourceField& f,
                                                  const std::vector<double>& beta_schedule,
                                                  double mass) {
    for (double v : h)
        if (v <= 0.0) throw std::invalid_argument("Dirichlet limit requires h > 0");
    for (size_t i = 1; i < beta_schedule.size(); ++i)
        if (beta_schedule[i] <= beta_schedule[i - 1])
            throw std::invalid_argument("beta schedule must be increasing");

    LinearSystem ref_sys = assemble_reinforcement_energy(mesh, bmap, h, f);
    ScalarField v = solve(ref_sys, 1e-12);

    DirichletLimitReport rep;
    rep.reinforcement_heat = heat_content(mesh, v);
    for (double beta : beta_schedule) {
        ProblemParams p{beta, mass, 2};
        LinearSystem sys = assemble_limit_energy(mesh, bmap, h, p, f);
        ScalarField u = solve(sys, 1e-12);
        ScalarField diff(u.size());
        for (size_t i = 0; i < u.size(); ++i) diff[i] = u[i] - v[i];
        rep.betas.push_back(beta);
        rep.l2_gaps.push_back(l2_norm(mesh, diff));
    }
    for (size_t i = 1; i < rep.l2_gaps.size(); ++i)
        rep.orders.push_back(std::log(rep.l2_gaps[i - 1] / rep.l2_gaps[i]) /
                             std::log(rep.betas[i] / rep.betas[i - 1]));
    return rep;
}

}  // namespace robin
