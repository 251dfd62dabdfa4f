#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace robin {

// Measure of the unit ball in R^n: omega_n = pi^{n/2} / Gamma(n/2 + 1),
// with Gamma at half-integers built up from Gamma(1/2) = sqrt(pi).
inline double unit_ball_volume(int n) {
    if (n < 1) throw std::invalid_argument("dimension must be positive");
    double gamma;  // Gamma(n/2 + 1)
    if (n % 2 == 0) {
        gamma = 1.0;  // Gamma(1)
        for (int k = 1; k <= n / 2; ++k) gamma *= k;
    } else {
        gamma = std::sqrt(std::numbers::pi);  // Gamma(1/2)
        for (double a = 0.5; a <= n / 2.0 + 0.5; a += 1.0) gamma *= a;
    }
    return std::pow(std::numbers::pi, n / 2.0) / gamma;
}

// Closed-form solution on the ball of radius R with f = 1 and constant h.
// The profile is A - r^2/(2n) in the body; in the eps-layer it is the radial
// harmonic B*log(r) + C for n = 2 and B*r^{2-n} + C for n >= 3.
struct RadialSolution {
    double R = 1.0;
    int n = 2;
    double beta = 1.0;
    double h = 1.0;
    double eps = 0.0;            // 0: limit problem
    double body_const = 0.0;     // A
    double body_quad = 0.0;      // coefficient of r^2; equals -1/(2n)
    double layer_B = 0.0;        // layer profile coefficient (layer case only)
    double layer_C = 0.0;
    double boundary_value = 0.0; // u(R)
    double outer_value = 0.0;    // u(R + eps*h) (layer case only)
    double heat_content = 0.0;   // integral of u over the body ball

    double body_value(double r) const { return body_const + body_quad * r * r; }
    double layer_value(double r) const {
        return n == 2 ? layer_B * std::log(r) + layer_C
                      : layer_B * std::pow(r, 2.0 - n) + layer_C;
    }
    double layer_derivative(double r) const {
        return n == 2 ? layer_B / r : layer_B * (2.0 - n) * std::pow(r, 1.0 - n);
    }
};

namespace detail {
inline void check_radial_args(double R, int n, double beta, double h) {
    if (R <= 0.0) throw std::invalid_argument("radius must be positive");
    if (n < 2) throw std::invalid_argument("dimension must be at least 2");
    if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
    if (h < 0.0) throw std::invalid_argument("h must be non-negative");
}

inline double ball_heat_content(double R, int n, double A) {
    // integral over the ball of A - r^2/(2n)
    double wn = unit_ball_volume(n);
    return wn * std::pow(R, n) * A - wn * std::pow(R, n + 2) / (2.0 * (n + 2));
}
}  // namespace detail

// u(r) = (R^2 - r^2)/(2n) + R(1 + beta h)/(n beta), solving -Delta u = 1 with
// (1 + beta h) u' + beta u = 0 at r = R.
inline RadialSolution limit_ball_solution(double R, int n, double beta, double h) {
    detail::check_radial_args(R, n, beta, h);
    RadialSolution s;
    s.R = R; s.n = n; s.beta = beta; s.h = h;
    s.body_quad = -1.0 / (2.0 * n);
    s.boundary_value = R * (1.0 + beta * h) / (n * beta);
    s.body_const = R * R / (2.0 * n) + s.boundary_value;
    s.heat_content = detail::ball_heat_content(R, n, s.body_const);
    return s;
}

// Piecewise solution of the eps-layer problem with constant h: unit
// conductivity in the body, eps in the layer, flux transmission
// u'(R-) = eps u'(R+) at r = R and eps u' + beta u = 0 at r = R + eps h.
inline RadialSolution layer_ball_solution(double R, int n, double beta, double h,
                                          double eps) {
    detail::check_radial_args(R, n, beta, h);
    if (h <= 0.0) throw std::invalid_argument("layer solution requires h > 0");
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    RadialSolution s;
    s.R = R; s.n = n; s.beta = beta; s.h = h; s.eps = eps;
    s.body_quad = -1.0 / (2.0 * n);

    const double Re = R + eps * h;
    // Transmission: body flux u'(R-) = -R/n equals eps * layer flux.
    if (n == 2) {
        s.layer_B = -R * R / (2.0 * eps);
        // Outer Robin: eps u'(Re) + beta u(Re) = 0.
        double uprime = s.layer_B / Re;
        double u_outer = -eps * uprime / beta;
        s.layer_C = u_outer - s.layer_B * std::log(Re);
    } else {
        s.layer_B = -std::pow(R, n) / (n * eps * (2.0 - n));
        double uprime = s.layer_B * (2.0 - n) * std::pow(Re, 1.0 - n);
        double u_outer = -eps * uprime / beta;
        s.layer_C = u_outer - s.layer_B * std::pow(Re, 2.0 - n);
    }
    s.outer_value = s.layer_value(Re);
    s.boundary_value = s.layer_value(R);
    s.body_const = s.boundary_value + R * R / (2.0 * n);
    s.heat_content = detail::ball_heat_content(R, n, s.body_const);
    return s;
}

// Radial solution of the reinforcement problem (the beta -> infinity limit):
// -Delta u = 1 in the ball, h u' + u = 0 at r = R, h > 0 constant.
inline RadialSolution reinforcement_ball_solution(double R, int n, double h) {
    detail::check_radial_args(R, n, 1.0, h);
    if (h <= 0.0) throw std::invalid_argument("Dirichlet limit requires h > 0");
    RadialSolution s;
    s.R = R; s.n = n; s.h = h; s.beta = std::numeric_limits<double>::infinity();
    s.body_quad = -1.0 / (2.0 * n);
    s.boundary_value = h * R / n;
    s.body_const = R * R / (2.0 * n) + s.boundary_value;
    s.heat_content = detail::ball_heat_content(R, n, s.body_const);
    return s;
}

}  // namespace robin
