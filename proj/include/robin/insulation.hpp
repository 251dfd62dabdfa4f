#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "robin/fem.hpp"

namespace robin {

// Nonnegative boundary density of insulating material with fixed total mass.
// Values are nodal, boundary-map order, interpreted as piecewise linear along
// the boundary.
struct InsulationDistribution {
    std::vector<double> values;
    double renormalization = 1.0;  // factor applied to meet the mass constraint

    static InsulationDistribution uniform(const BoundaryMap& bmap, double mass) {
        InsulationDistribution d;
        d.values.assign(bmap.size(), mass / bmap.perimeter());
        return d;
    }
};

inline double boundary_mass(const BoundaryMap& bmap, const std::vector<double>& h) {
    double m = 0.0;
    for (int i = 0; i < bmap.size(); ++i) m += bmap.node_weights[i] * h[i];
    return m;
}

struct FixedPointResult {
    double c = 0.0;                  // threshold constant
    double active_set_measure = 0.0; // length of {|v| >= c}
    int iterations = 0;
    double residual = 0.0;           // |g1(c) - m*beta*c|
};

namespace detail {

// g1(c) = sum_i w_i max(|v_i| - c, 0): the trapezoidal discretization of
// the integral of (|v|-c)^+ over the boundary. Piecewise linear in c.
inline double g1_value(const BoundaryMap& bmap, const std::vector<double>& absv, double c) {
    double s = 0.0;
    for (int i = 0; i < bmap.size(); ++i) s += bmap.node_weights[i] * std::max(absv[i] - c, 0.0);
    return s;
}

// Boundary length of {|v| >= c} with linear interpolation within edges.
inline double active_length(const BoundaryMap& bmap, const std::vector<double>& absv, double c) {
    double len = 0.0;
    for (int i = 0; i < bmap.size(); ++i) {
        double a = absv[i], b = absv[bmap.edge_next[i]];
        double l = bmap.edge_lengths[i];
        if (a >= c && b >= c) len += l;
        else if (a > c || b > c) {
            double hi = std::max(a, b), lo = std::min(a, b);
            len += l * (hi - c) / (hi - lo);
        }
    }
    return len;
}

}  // namespace detail

// The unique c >= 0 with g1(c) = m*beta*c. Since g1 is piecewise linear and
// decreasing in c with breakpoints at the nodal values of |v|, the root is
// found exactly by a sorted scan: on each linear piece g1(c) = S1 - c*S0 with
// S0, S1 the weight and weighted-value sums of the active nodes, giving the
// candidate c = S1 / (S0 + m*beta).
inline FixedPointResult threshold_constant(const BoundaryMap& bmap,
                                           const std::vector<double>& trace,
                                           const ProblemParams& params) {
    params.check();
    if (static_cast<int>(trace.size()) != bmap.size())
        throw std::invalid_argument("trace must be defined on all boundary nodes");

    const int n = bmap.size();
    std::vector<double> absv(n);
    for (int i = 0; i < n; ++i) absv[i] = std::fabs(trace[i]);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return absv[a] > absv[b]; });

    const double mb = params.mass * params.beta;
    FixedPointResult res;
    double s0 = 0.0, s1 = 0.0;
    for (int k = 0; k < n; ++k) {
        int i = order[k];
        s0 += bmap.node_weights[i];
        s1 += bmap.node_weights[i] * absv[i];
        res.iterations = k + 1;
        double c = s1 / (s0 + mb);
        double next = (k + 1 < n) ? absv[order[k + 1]] : 0.0;
        if (c >= next) {
            res.c = c;
            break;
        }
    }
    res.residual = std::fabs(detail::g1_value(bmap, absv, res.c) - mb * res.c);
    res.active_set_measure = res.c > 0.0 ? detail::active_length(bmap, absv, res.c)
                                         : bmap.perimeter();
    return res;
}

// Closed-form optimal density for a given trace: h = (|v|/c - 1)/beta on the
// active set {|v| >= c}, zero elsewhere. The nodal closed form already
// integrates to m under the trapezoidal rule; the recorded renormalization
// factor only sweeps up rounding.
inline InsulationDistribution optimal_h(const BoundaryMap& bmap,
                                        const std::vector<double>& trace,
                                        const ProblemParams& params,
                                        FixedPointResult* fp_out = nullptr) {
    FixedPointResult fp = threshold_constant(bmap, trace, params);
    if (fp_out) *fp_out = fp;
    if (fp.c <= 0.0)
        throw std::invalid_argument("optimal h undefined for zero trace");

    InsulationDistribution dist;
    dist.values.resize(bmap.size());
    for (int i = 0; i < bmap.size(); ++i)
        dist.values[i] = std::max(std::fabs(trace[i]) - fp.c, 0.0) / (fp.c * params.beta);
    double m = boundary_mass(bmap, dist.values);
    dist.renormalization = params.mass / m;
    for (double& v : dist.values) v *= dist.renormalization;
    return dist;
}

struct RobinValueReport {
    double max_active_deviation = 0.0;   // | |v|/(1+beta h) - c | on {|v| >= c}
    double max_inactive_excess = 0.0;    // (|v| - c)^+ off the active set
    double max_deviation = 0.0;
};

// Optimality-structure diagnostic: at the minimizing couple the ratio
// |v|/(1+beta h) equals c wherever insulation is placed, and |v| <= c bare.
inline RobinValueReport robin_value_check(const BoundaryMap& bmap,
                                          const std::vector<double>& h,
                                          const std::vector<double>& trace, double c,
                                          const ProblemParams& params) {
    if (h.size() != trace.size() || static_cast<int>(h.size()) != bmap.size())
        throw std::invalid_argument("robin_value_check: size mismatch");
    RobinValueReport rep;
    for (int i = 0; i < bmap.size(); ++i) {
        double av = std::fabs(trace[i]);
        if (av >= c) {
            double ratio = av / (1.0 + params.beta * h[i]);
            rep.max_active_deviation = std::max(rep.max_active_deviation, std::fabs(ratio - c));
        } else {
            rep.max_inactive_excess = std::max(rep.max_inactive_excess, av - c > 0.0 ? av - c : 0.0);
        }
    }
    rep.max_deviation = std::max(rep.max_active_deviation, rep.max_inactive_excess);
    return rep;
}

struct EnergyTraceEntry {
    int iteration = 0;
    char half_step = 'u';  // 'u': temperature solve, 'h': insulation update
    double energy = 0.0;
};

struct AlternatingReport {
    ScalarField u;
    InsulationDistribution h;
    double c = 0.0;
    double final_energy = 0.0;
    double heat = 0.0;
    int iterations = 0;
    std::string termination;
    std::vector<EnergyTraceEntry> energy_trace;
    std::vector<double> h_diff_l1;  // iterate differences, diagnostic only
    std::vector<double> h_diff_l2;
};

struct AlternatingError : std::runtime_error {
    std::vector<EnergyTraceEntry> energy_trace;
    AlternatingError(const std::string& msg, std::vector<EnergyTraceEntry> trace)
        : std::runtime_error(msg), energy_trace(std::move(trace)) {}
};

// Alternating minimization of F(v,h): exact minimization in v (linear solve)
// and in h (closed form) per half-step, so the energy trace is non-increasing.
inline AlternatingReport alternating_minimize(const TriangleMesh& mesh, const BoundaryMap& bmap,
                                              const ProblemParams& params, const SourceField& f,
                                              double tol_energy = 1e-10, int max_outer = 200,
                                              std::optional<InsulationDistribution> h0 = {},
                                              double solver_tol = 1e-12) {
    params.check();
    AlternatingReport rep;
    rep.h = h0 ? *h0 : InsulationDistribution::uniform(bmap, params.mass);
    if (static_cast<int>(rep.h.values.size()) != bmap.size())
        throw std::invalid_argument("initial h size mismatch");

    double prev_energy = std::numeric_limits<double>::infinity();
    for (int n = 0; n < max_outer; ++n) {
        LinearSystem sys = assemble_limit_energy(mesh, bmap, rep.h.values, params, f);
        rep.u = solve(sys, solver_tol);
        double e_u = quadratic_energy(sys, rep.u);
        rep.energy_trace.push_back({n, 'u', e_u});

        if (std::fabs(prev_energy - e_u) <= tol_energy * (1.0 + std::fabs(e_u))) {
            rep.c = threshold_constant(bmap, boundary_trace(bmap, rep.u), params).c;
            rep.final_energy = e_u;
            rep.heat = heat_content(mesh, rep.u);
            rep.iterations = n;
            rep.termination = "energy_converged";
            return rep;
        }
        prev_energy = e_u;

        FixedPointResult fp;
        InsulationDistribution h_next =
            optimal_h(bmap, boundary_trace(bmap, rep.u), params, &fp);
        rep.c = fp.c;
        double e_h = limit_energy_value(mesh, bmap, h_next.values, params, f, rep.u);
        rep.energy_trace.push_back({n, 'h', e_h});

        double d1 = 0.0, d2 = 0.0;
        for (int i = 0; i < bmap.size(); ++i) {
            double d = h_next.values[i] - rep.h.values[i];
            d1 += bmap.node_weights[i] * std::fabs(d);
            d2 += bmap.node_weights[i] * d * d;
        }
        rep.h_diff_l1.push_back(d1);
        rep.h_diff_l2.push_back(std::sqrt(d2));
        rep.h = std::move(h_next);
    }
    throw AlternatingError("alternating minimization: max_outer exceeded", rep.energy_trace);
}

// CSV export: boundary_node_id,arc_position,h_value
inline void save_insulation_csv(const BoundaryMap& bmap, const std::vector<double>& h,
                                std::ostream& os) {
    os.precision(17);
    os << "boundary_node_id,arc_position,h_value\n";
    for (int i = 0; i < bmap.size(); ++i)
        os << bmap.node_ids[i] << ',' << bmap.arc_position[i] << ',' << h[i] << '\n';
}

inline void save_energy_trace_csv(const std::vector<EnergyTraceEntry>& trace, std::ostream& os) {
    os.precision(17);
    os << "iteration,half_step,energy\n";
    for (const auto& e : trace) os << e.iteration << ',' << e.half_step << ',' << e.energy << '\n';
}

}  // namespace robin
