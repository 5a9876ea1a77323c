#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sweep/examples.hpp"

using namespace sweep;
namespace ex = sweep::examples;

TEST_CASE("moving radius") {
    CHECK(ex::rho(0.0) == 1.25);
    CHECK(ex::rho(0.25) == 0.5);
    CHECK(ex::rho_dot(0.5) == 0.0);
    CHECK(ex::rho(0.5) == 0.25);
    CHECK(ex::rho(0.3L) == doctest::Approx(0.41L));
}

TEST_CASE("polar form") {
    const auto [r1, p1] = ex::polar_rhs(0.5, std::numbers::pi / 3, 1.0, 0.0);
    CHECK(r1 == doctest::Approx(0.5));
    CHECK(p1 == doctest::Approx(-std::sqrt(3.0)));
    const auto [r2, p2] = ex::polar_rhs(0.7, 1.0, 0.0, 0.0);
    CHECK(r2 == 0.0);
    CHECK(p2 == 0.0);
    // lambda = 2 xi with xi from the multiplier at first contact
    const auto [r3, p3] = ex::polar_rhs(0.5, std::numbers::pi / 3, 1.0, 5.0);
    CHECK(r3 == doctest::Approx(ex::rho_dot(0.25)));
    CHECK_THROWS_AS(ex::polar_rhs(0.0, 1.0, 1.0, 0.0), ProblemError);
}

TEST_CASE("boundary angle closed form") {
    CHECK(ex::phi_boundary(0.25) == doctest::Approx(std::numbers::pi / 3).epsilon(1e-15));
    CHECK(ex::phi_boundary(0.5) ==
          doctest::Approx(2 * std::atan(std::exp(-std::numbers::pi / 4) / std::sqrt(3.0))));
    CHECK(ex::phi_boundary(0.5) == doctest::Approx(0.5148).epsilon(1e-4));
    const double h = 1e-5, t = 0.3;
    const double d = (ex::phi_boundary(t + h) - ex::phi_boundary(t - h)) / (2 * h);
    CHECK(std::abs(d + std::sin(ex::phi_boundary(t)) / ex::rho(t)) <= 1e-6);
    // agrees with a direct RK4 solve of the angle equation
    for (double s : {0.3, 0.4, 0.5, 0.6}) {
        CHECK(ex::phi_boundary(s) == doctest::Approx(oracle::angle_rk4(s)).epsilon(1e-10));
    }
    CHECK(ex::phi_boundary(0.4L) == doctest::Approx(ex::phi_boundary(0.4)).epsilon(1e-15));
}

TEST_CASE("tangency instant") {
    const auto s = ex::solve_tstar();
    CHECK(s.residual_speed < 1e-12);
    CHECK(s.residual_angle < 1e-12);
    CHECK(s.tstar > 0.5);
    CHECK(s.tstar < 0.625);
    CHECK(s.tstar == doctest::Approx(0.618).epsilon(1e-3 / 0.618));
    CHECK(s.tau == doctest::Approx(0.169).epsilon(1e-3 / 0.169));
    const auto o = oracle::tangency();
    CHECK(std::abs(s.tstar - o.t) <= 1e-9);
    CHECK(std::abs(s.tau - std::tan(o.phi / 2)) <= 1e-9);
}

TEST_CASE("example 1 parameters") {
    const auto ep = ex::example1_params(0.05);
    CHECK(ep.theta == doctest::Approx((ep.tstar - 0.5) / 2));
    CHECK(ep.t2 == doctest::Approx(0.5 + ep.theta));
    CHECK(ep.T == doctest::Approx((1 + 3 * ep.theta) / 2));
    CHECK(ex::rho(ep.T) == doctest::Approx(9 * ep.theta * ep.theta + 0.25).epsilon(1e-14));
    CHECK(ex::rho(ep.t2) == doctest::Approx(4 * ep.theta * ep.theta + 0.25).epsilon(1e-14));
    CHECK(ep.rho_T > ep.r_t2);
    CHECK(ep.r_t2 > ep.rT);
    CHECK(ep.rT > ep.r_t2 * std::sin(ep.phi_t2));
    CHECK(ep.Delta > 0.0);
    // x(T) from t2 under -mu for theta/2 lands on the terminal circle
    const double xT = ep.x_t2 - 0.05 * (ep.T - ep.t2);
    CHECK(std::hypot(xT, ep.y_t2) == doctest::Approx(ep.rT).epsilon(1e-14));
    CHECK(ep.rT == doctest::Approx(0.2625796555490205).epsilon(1e-12));
    CHECK(ep.Delta == doctest::Approx(0.2715).epsilon(1e-3));
}

TEST_CASE("terminal radius limits and validation") {
    const auto ep = ex::example1_params(0.05);
    CHECK(std::abs(ex::terminal_radius(1e-12) - ep.r_t2) <= 1e-12);
    CHECK_THROWS_AS(ex::example1_params(0.0), ProblemError);
    CHECK_THROWS_AS(ex::example1_params(20.0), ProblemError);
}

TEST_CASE("optimal control shape") {
    const auto ep = ex::example1_params(0.05);
    const auto u = ex::example1_optimal_control(ep);
    CHECK(u.at(0.0)[0] == 1.0);
    CHECK(u.at(ep.t2 - 1e-9)[0] == 1.0);
    CHECK(u.at(ep.t2)[0] == -0.05);
    CHECK(u.at(ep.T)[0] == -0.05);
    CHECK(u.switch_times().size() == 1);
}

TEST_CASE("optimal trajectory ends on the terminal circle") {
    const auto ep = ex::example1_params();
    const auto p = ex::example1_problem();
    const auto tr = catchup_simulate(p, ex::example1_optimal_control(ep), ex::example1_x0(), 20000);
    CHECK(std::abs(tr.x.back().squaredNorm() - ep.rT * ep.rT) <= 2e-3);
    // y decreases only while on the boundary
    for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
        if (tr.x[i + 1][1] < tr.x[i][1] - 1e-15) CHECK(tr.psi[i + 1] >= -1e-10);
        if (tr.psi[i + 1] < -1e-6) CHECK(tr.x[i + 1][1] >= tr.x[i][1] - 1e-15);
    }
}

TEST_CASE("builtin registry") {
    CHECK(ex::builtin_ids().size() == 3);
    const auto b = ex::make_builtin("example2", {{"sigma_drift", 0.01}});
    CHECK(b.parameters.at("sigma_drift") == 0.01);
    CHECK(b.spec.name == "example2");
    CHECK_THROWS_AS(ex::make_builtin("nope"), ConfigError);
    CHECK_THROWS_AS(ex::make_builtin("example1", {{"radius", 1.0}}), ConfigError);
    CHECK_THROWS_AS(ex::make_builtin("example1", {{"mu_ctrl", 20.0}}), ConfigError);
    CHECK(ex::make_builtin("static-disc", {{"radius", 2.0}}).spec.bound_radius == 2.0);
}

TEST_CASE("small drift recovers the example 1 switch") {
    const auto ep = ex::example1_params();
    const auto p = ex::example2_problem(0.05, 1e-4);
    ex::SwitchSearchOptions o;
    o.adversaries = 0;
    const auto res = ex::example2_search(p, 0.05, o);
    const double spacing = p.T / (o.switch_points - 1);
    CHECK(std::abs(res.best_switch - ep.t2) <= spacing);
    CHECK(res.lower_control_contact > 0.25);
}

TEST_CASE("switch search preconditions") {
    const auto p = ex::example2_problem();
    ex::SwitchSearchOptions o;
    o.switch_points = 50;
    CHECK_THROWS_AS(ex::example2_search(p, 0.05, o), ProblemError);
}
