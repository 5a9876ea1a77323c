#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sweep/examples.hpp"

#include <random>

using namespace sweep;
namespace ex = sweep::examples;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec v1(double a) {
    Vec v(1);
    v << a;
    return v;
}

ProblemSpec quartic_problem() {
    ProblemSpec p;
    p.name = "quartic";
    p.state_dim = 1;
    p.control_dim = 1;
    p.f = [](double, const Vec&, const Vec& u) { return DynamicsEval{u, Mat::Zero(1, 1)}; };
    p.U = ControlSet::box(v1(-1), v1(1));
    p.constraint = ConstraintFn([](double, const Vec& x) {
        ConstraintEval e;
        const double s = x[0];
        e.value = s * s * s * s - s * s;
        e.grad = v1(4 * s * s * s - 2 * s);
        e.hess = Mat::Constant(1, 1, 12 * s * s - 2);
        e.dt = 0.0;
        e.dt_grad = Vec::Zero(1);
        return e;
    });
    p.C0 = SimpleSet::point(v1(0));
    p.CT = SimpleSet::ball(v1(0), 0.5);
    p.phi = [](const Vec& x) { return CostEval{x[0], {v1(1)}}; };
    p.T = 1.0;
    p.bound_radius = 1.0;
    return p;
}

}  // namespace

TEST_CASE("constraint derivatives agree with finite differences") {
    const auto p = ex::example1_problem();
    const auto chk = check_constraint_derivatives(p.constraint, 2, p.T, 1.5, 200, 7);
    CHECK(chk.max() <= 1e-4);
    const auto p2 = ex::example2_problem();
    CHECK(check_dynamics_jacobian(p2, 200, 11) <= 1e-4);
}

TEST_CASE("finite-difference check flags a wrong gradient") {
    ConstraintFn bad([](double t, const Vec& x) {
        ConstraintEval e;
        e.value = x.squaredNorm() - 1 + t;
        e.grad = 3.0 * x;  // should be 2x
        e.hess = 2.0 * Mat::Identity(2, 2);
        e.dt = 1.0;
        e.dt_grad = Vec::Zero(2);
        return e;
    });
    CHECK(check_constraint_derivatives(bad, 2, 1.0, 1.0, 100, 3).grad > 1e-2);
}

TEST_CASE("example 1 assumptions and measured constants") {
    const auto p = ex::example1_problem();
    const auto rep = validate_assumptions(p);
    CHECK(rep.ok());
    CHECK(rep.M == doctest::Approx(1.0));
    const double eta_ref = oracle::band_gradient_min(p.T, 0.01);
    CHECK(eta_ref == doctest::Approx(2 * std::sqrt(1.0 / 16 - 0.01)).epsilon(1e-9));
    // the probe grid misses the minimizing instant t = 1/2
    CHECK(rep.eta >= eta_ref);
    CHECK(rep.eta <= eta_ref * (1 + 1e-3));
    CHECK(rep.eta == doctest::Approx(oracle::band_gradient_min(p.T, 0.01, rep.grid.time_samples))
                         .epsilon(1e-9));
    CHECK(std::isfinite(rep.mu));
    CHECK(rep.mu > 1.0);
    // deterministic
    const auto again = validate_assumptions(p);
    CHECK(again.mu == rep.mu);
    CHECK(again.xi_bound() == rep.xi_bound());
}

TEST_CASE("static disc passes with M = 1 and eta = 2 sqrt(1 - beta)") {
    const auto p = ex::static_disc_problem();
    const auto rep = validate_assumptions(p);
    CHECK(rep.ok());
    CHECK(rep.M == doctest::Approx(1.0));
    CHECK(rep.eta == doctest::Approx(2 * std::sqrt(1 - 0.01)).epsilon(1e-9));
}

TEST_CASE("interior critical point inside the band fails the band gradient check") {
    ProbeGrid g;
    g.beta = 0.3;
    const auto rep = validate_assumptions(quartic_problem(), g);
    REQUIRE(rep.find("band_gradient") != nullptr);
    CHECK_FALSE(rep.find("band_gradient")->passed);
    CHECK_FALSE(rep.ok());
    CHECK(rep.eta == 0.0);
    CHECK_THROWS_AS(require_assumptions(rep), ProblemError);
}

TEST_CASE("assumption validation preconditions") {
    auto p = ex::example1_problem();
    ProbeGrid g;
    g.state_samples = 9;
    CHECK_THROWS_AS(validate_assumptions(p, g), ProblemError);
    p.U = ControlSet::samples({});
    CHECK_THROWS_AS(validate_assumptions(p), ProblemError);
}

TEST_CASE("finite control list passes the convexity check unverified") {
    auto p = ex::example1_problem();
    p.U = ControlSet::samples({v1(-0.05), v1(1.0)});
    const auto rep = validate_assumptions(p);
    CHECK(rep.find("convex_velocities")->passed);
    CHECK(rep.find("convex_velocities")->detail.find("not verified") != std::string::npos);
}

TEST_CASE("boundary multiplier") {
    const auto p = ex::example1_problem();
    SUBCASE("first contact") {
        CHECK(boundary_multiplier(p, 0.25, v2(0.25, std::sqrt(3.0) / 4), v1(1.0)) ==
              doctest::Approx(2.5).epsilon(1e-12));
    }
    SUBCASE("interior") {
        CHECK(boundary_multiplier(p, 0.0, ex::example1_x0(), v1(1.0)) == 0.0);
    }
    SUBCASE("inward velocity on a growing disc clips to zero") {
        const double t = 0.55, r = ex::rho(t);
        CHECK(boundary_multiplier(p, t, v2(-r, 0.0), v1(1.0)) == 0.0);
    }
    SUBCASE("outside the set") {
        CHECK_THROWS_AS(boundary_multiplier(p, 0.0, v2(2.0, 0.0), v1(1.0)), ProblemError);
    }
}

TEST_CASE("boundary multiplier stays below mu/eta^2") {
    const auto p = ex::example1_problem();
    const auto rep = validate_assumptions(p);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ut(0.0, p.T), ua(0.0, 2 * std::numbers::pi),
        uu(-0.05, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double t = ut(rng), a = ua(rng), r = ex::rho(t);
        const double xi = boundary_multiplier(p, t, v2(r * std::cos(a), r * std::sin(a)), v1(uu(rng)));
        CHECK(xi >= 0.0);
        CHECK(xi <= rep.xi_bound() + 1e-9);
    }
}

TEST_CASE("simple set normal cones") {
    const auto pt = SimpleSet::point(v2(0, 1));
    CHECK(pt.normal_cone_distance(v2(0, 1), v2(3, -4), 1e-8) == 0.0);

    const auto ball = SimpleSet::ball(v2(0, 0), 2.0);
    CHECK(ball.normal_cone_distance(v2(0.5, 0), v2(3, 4), 1e-8) == doctest::Approx(5.0));
    CHECK(ball.normal_cone_distance(v2(2, 0), v2(3, 0), 1e-8) == doctest::Approx(0.0));
    CHECK(ball.normal_cone_distance(v2(2, 0), v2(3, 4), 1e-8) == doctest::Approx(4.0));
    CHECK(ball.normal_cone_distance(v2(2, 0), v2(-3, 0), 1e-8) == doctest::Approx(3.0));
    CHECK_THROWS_AS(SimpleSet::ball(v2(0, 0), 0.0), ProblemError);

    const auto box = SimpleSet::box(v2(0, 0), v2(1, 1));
    CHECK(box.normal_cone_distance(v2(0, 0.5), v2(-2, 0), 1e-8) == doctest::Approx(0.0));
    CHECK(box.normal_cone_distance(v2(0, 0.5), v2(2, 0), 1e-8) == doctest::Approx(2.0));
    CHECK(box.normal_cone_distance(v2(1, 1), v2(2, 3), 1e-8) == doctest::Approx(0.0));
    CHECK_THROWS_AS(SimpleSet::box(v2(1, 0), v2(0, 1)), ProblemError);
}

TEST_CASE("control set") {
    const auto U = ControlSet::box(v1(-0.05), v1(1.0));
    CHECK(U.contains(v1(0.5)));
    CHECK_FALSE(U.contains(v1(1.1)));
    const auto ext = U.extreme_points();
    REQUIRE(ext.size() == 2);
    CHECK(U.probe(16).size() == 16);
    CHECK_THROWS_AS(ControlSet::box(v1(1), v1(0)), ProblemError);
}
