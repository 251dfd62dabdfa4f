#include <doctest.h>

#include <cmath>
#include <numbers>

#include "robin/bounds.hpp"
#include "robin/radial.hpp"

using namespace robin;
using std::numbers::pi;

TEST_CASE("unit ball volumes") {
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(unit_ball_volume(2) == doctest::Approx(pi).epsilon(1e-15));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-15));
    CHECK(unit_ball_volume(4) == doctest::Approx(pi * pi / 2.0).epsilon(1e-15));
    CHECK(unit_ball_volume(5) == doctest::Approx(8.0 * pi * pi / 15.0).epsilon(1e-14));
}

TEST_CASE("limit ball solution: reference values at R=1, n=2, beta=1, h=1") {
    RadialSolution s = limit_ball_solution(1.0, 2, 1.0, 1.0);
    CHECK(s.boundary_value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.heat_content == doctest::Approx(pi / 8 + pi).epsilon(1e-15));
    // -Delta u = 1 as a coefficient identity: Delta(q r^2) = 4q in 2D
    CHECK(2 * s.n * s.body_quad == doctest::Approx(-1.0).epsilon(1e-15));
    // Robin condition (1 + beta h) u'(R) + beta u(R) = 0
    double uprime = 2 * s.body_quad * s.R;
    CHECK((1 + s.beta * s.h) * uprime + s.beta * s.boundary_value ==
          doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("limit ball solution: h -> 0 gives the bare Robin ball") {
    for (int n : {2, 3, 4}) {
        for (double R : {0.5, 1.0, 2.0}) {
            RadialSolution s = limit_ball_solution(R, n, 2.0, 0.0);
            CHECK(s.boundary_value == doctest::Approx(R / (n * 2.0)).epsilon(1e-14));
        }
    }
}

TEST_CASE("limit ball heat content matches the sharp bound exactly (equality case)") {
    for (int n : {2, 3, 5}) {
        for (double R : {0.5, 1.0, 3.0}) {
            for (double beta : {0.5, 1.0, 10.0}) {
                for (double h : {0.1, 1.0, 2.5}) {
                    RadialSolution s = limit_ball_solution(R, n, beta, h);
                    double wn = unit_ball_volume(n);
                    double per = n * wn * std::pow(R, n - 1);
                    ProblemParams p{beta, h * per, n};
                    double bound = isoperimetric_bound(wn * std::pow(R, n), per, p);
                    CHECK(s.heat_content == doctest::Approx(bound).epsilon(1e-13));
                }
            }
        }
    }
}

TEST_CASE("layer ball solution: matching conditions hold exactly") {
    for (int n : {2, 3, 4}) {
        double R = 1.3, beta = 0.7, h = 0.8, eps = 0.05;
        RadialSolution s = layer_ball_solution(R, n, beta, h, eps);
        double Re = R + eps * h;
        // continuity at r = R
        CHECK(s.body_value(R) == doctest::Approx(s.layer_value(R)).epsilon(1e-13));
        // flux transmission u'(R-) = eps u'(R+)
        double inner_flux = 2 * s.body_quad * R;
        CHECK(inner_flux == doctest::Approx(eps * s.layer_derivative(R)).epsilon(1e-13));
        // outer Robin in variational form: eps u' + beta u = 0 at R_eps
        CHECK(eps * s.layer_derivative(Re) + beta * s.layer_value(Re) ==
              doctest::Approx(0.0).epsilon(1e-13));
    }
}

TEST_CASE("layer ball solution: log-profile gap formula, n = 2") {
    double R = 1.0, beta = 1.0, h = 1.0;
    for (double eps : {0.2, 0.1, 0.05}) {
        RadialSolution s = layer_ball_solution(R, 2, beta, h, eps);
        double B = -R * R / (2 * eps);
        CHECK(s.outer_value - s.boundary_value ==
              doctest::Approx(B * std::log(1 + eps * h / R)).epsilon(1e-12));
    }
    // the gap tends to -h R / 2 = -1/2
    RadialSolution s = layer_ball_solution(R, 2, beta, h, 1e-7);
    CHECK(s.outer_value - s.boundary_value == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("layer ball solution: converges to the limit problem at order 1 in eps") {
    for (int n : {2, 3}) {
        double R = 1.0, beta = 1.0, h = 1.0;
        RadialSolution lim = limit_ball_solution(R, n, beta, h);
        std::vector<double> gaps;
        for (double eps : {0.1, 0.05, 0.025}) {
            RadialSolution s = layer_ball_solution(R, n, beta, h, eps);
            gaps.push_back(std::fabs(s.boundary_value - lim.boundary_value));
        }
        for (size_t i = 1; i < gaps.size(); ++i) {
            double order = std::log2(gaps[i - 1] / gaps[i]);
            CHECK(order == doctest::Approx(1.0).epsilon(0.15));
        }
    }
}

TEST_CASE("layer ball solution: eps = 1 outer condition matches single-material Robin") {
    // with eps = 1 the outer condition reduces to u' + beta u = 0 at R + h
    double R = 1.0, beta = 2.0, h = 0.5;
    RadialSolution s = layer_ball_solution(R, 2, beta, h, 1.0);
    double Re = R + h;
    CHECK(s.layer_derivative(Re) + beta * s.layer_value(Re) ==
          doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("reinforcement ball solution is the beta -> infinity limit") {
    double R = 1.0, h = 1.0;
    for (int n : {2, 3}) {
        RadialSolution v = reinforcement_ball_solution(R, n, h);
        CHECK(v.boundary_value == doctest::Approx(h * R / n).epsilon(1e-15));
        RadialSolution u = limit_ball_solution(R, n, 1e9, h);
        CHECK(u.boundary_value == doctest::Approx(v.boundary_value).epsilon(1e-8));
    }
}

TEST_CASE("radial argument validation") {
    CHECK_THROWS(limit_ball_solution(-1.0, 2, 1.0, 1.0));
    CHECK_THROWS(limit_ball_solution(1.0, 1, 1.0, 1.0));
    CHECK_THROWS(layer_ball_solution(1.0, 2, 1.0, 0.0, 0.1));
    CHECK_THROWS(layer_ball_solution(1.0, 2, 1.0, 1.0, 0.0));
    CHECK_THROWS(reinforcement_ball_solution(1.0, 2, 0.0));
}
