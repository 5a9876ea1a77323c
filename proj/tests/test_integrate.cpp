#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sweep/examples.hpp"

using namespace sweep;
namespace ex = sweep::examples;

namespace {

Vec v1(double a) {
    Vec v(1);
    v << a;
    return v;
}

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

struct Setup {
    ProblemSpec p = ex::example1_problem();
    AssumptionReport rep = validate_assumptions(p);
    PenaltySchedule sched = make_schedule(rep.mu, rep.eta);
};

const Setup& setup() {
    static const Setup s;
    return s;
}

}  // namespace

TEST_CASE("penalty solution follows x = (t, y0) before contact") {
    const auto& s = setup();
    const double sigma = std::ldexp(1.0, -8);
    const auto tr = integrate_forward(s.p, ControlSignal::constant(s.p.T, v1(1)), 800.0, sigma,
                                      ex::example1_x0());
    for (double t = 0.0; t <= 0.24; t += 0.01) {
        const Vec x = tr.state_at(t);
        CHECK(std::abs(x[0] - t) <= 1e-3);
        CHECK(std::abs(x[1] - std::sqrt(3.0) / 4) <= 1e-3);
    }
}

TEST_CASE("zero dynamics on a fixed set stay put") {
    auto p = ex::static_disc_problem();
    p.U = ControlSet::box(v1(0), v1(0));
    const Vec x0 = v2(0.3, -0.2);
    const auto tr = integrate_forward(p, ControlSignal::constant(p.T, v1(0)), 500.0, 0.01, x0);
    for (const auto& x : tr.x) CHECK((x - x0).norm() <= 1e-8);
}

TEST_CASE("polar angle tracks the boundary closed form") {
    const auto& s = setup();
    ProblemSpec p = s.p;
    const auto ts = ex::solve_tstar();
    p.T = ts.tstar + 0.01;
    const int K = s.sched.size();
    const auto tr = integrate_forward(p, ControlSignal::constant(p.T, v1(1)),
                                      s.sched.gammas[K - 1], s.sched.sigmas[K - 1],
                                      ex::example1_x0());
    double worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double t = 0.26 + (ts.tstar - 0.01 - 0.26) * i / 400;
        const Vec x = tr.state_at(t);
        worst = std::max(worst, std::abs(std::atan2(x[1], x[0]) - ex::phi_boundary(t)));
    }
    CHECK(worst <= 5e-3);
}

TEST_CASE("trajectory invariants along the schedule") {
    const auto& s = setup();
    const auto u = ex::example1_optimal_control(ex::example1_params());
    double max_grad = 2 * ex::rho(0.0);
    for (int k = 0; k < 5; ++k) {
        const double g = s.sched.gammas[k], sg = s.sched.sigmas[k];
        const auto tr = integrate_forward(s.p, u, g, sg, ex::example1_x0(), {}, s.sched.mus[k]);
        // breakpoints on the grid
        CHECK(std::find(tr.t.begin(), tr.t.end(), u.grid()[1]) != tr.t.end());
        for (std::size_t i = 0; i < tr.size(); ++i) {
            CHECK(tr.xi[i] <= s.rep.xi_bound() + 1e-6);
            CHECK(tr.psi[i] - sg <= s.sched.mus[k] + 1e-6);
            if (i + 1 < tr.size()) {
                const double speed_bound = s.rep.M + s.rep.xi_bound() * max_grad;
                CHECK((tr.x[i + 1] - tr.x[i]).norm() <= speed_bound * (tr.t[i + 1] - tr.t[i]));
            }
        }
    }
}

TEST_CASE("integration is deterministic") {
    const auto& s = setup();
    const auto u = ex::example1_optimal_control(ex::example1_params());
    const auto a = integrate_forward(s.p, u, s.sched.gammas[3], s.sched.sigmas[3], ex::example1_x0());
    const auto b = integrate_forward(s.p, u, s.sched.gammas[3], s.sched.sigmas[3], ex::example1_x0());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.t[i] == b.t[i]);
        CHECK(a.x[i] == b.x[i]);
    }
}

TEST_CASE("integrate_forward preconditions and failures") {
    const auto& s = setup();
    const auto u = ControlSignal::constant(s.p.T, v1(1));
    IntegratorOptions o;
    o.tol = 0.0;
    CHECK_THROWS_AS(integrate_forward(s.p, u, 100.0, 0.1, ex::example1_x0(), o), ProblemError);
    CHECK_THROWS_AS(integrate_forward(s.p, u, 100.0, 0.1, v2(2.0, 0.0), {}, -0.01), ProblemError);
    CHECK_THROWS_AS(integrate_forward(s.p, u, -1.0, 0.1, ex::example1_x0()), ProblemError);
    o = {};
    o.h_min = 1e-2;
    o.h_initial = 1e-2;
    try {
        integrate_forward(s.p, u, s.sched.gammas.back(), s.sched.sigmas.back(), ex::example1_x0(), o);
        FAIL("expected an integration failure");
    } catch (const IntegrationError& e) {
        CHECK(e.time() > 0.2);
        CHECK(e.time() < s.p.T);
    }
}

TEST_CASE("family on a problem that stays inside matches the oracle") {
    auto p = ex::static_disc_problem(1.0, 0.8);
    const auto rep = validate_assumptions(p);
    const auto sched = make_schedule(rep.mu, rep.eta);
    FamilyOptions fo;
    fo.members = 3;
    const auto fam = run_family(p, ControlSignal::constant(p.T, v1(1)), sched, Vec::Zero(2), fo);
    for (const auto& m : fam.members) {
        REQUIRE(m.error.empty());
        CHECK(m.gap <= 10 * fo.integrator.tol);
    }
}

TEST_CASE("static disc: penalty and catch-up agree before contact") {
    auto p = ex::static_disc_problem(1.0, 2.0);
    const auto rep = validate_assumptions(p);
    const auto sched = make_schedule(rep.mu, rep.eta);
    const auto u = ControlSignal::constant(p.T, v1(1));
    const auto pen = integrate_forward(p, u, sched.gammas.back(), sched.sigmas.back(), Vec::Zero(2));
    const auto cu = catchup_simulate(p, u, Vec::Zero(2), 20000);
    for (int i = 0; i <= 190; ++i) {
        const double t = 0.005 * i;
        CHECK((pen.state_at(t) - cu.state_at(t)).norm() <= 1e-3);
        CHECK(std::abs(pen.state_at(t)[0] - t) <= 1e-3);
    }
}

TEST_CASE("family reports failures per member") {
    const auto& s = setup();
    FamilyOptions fo;
    fo.members = 2;
    fo.integrator.max_steps = 5;
    const auto fam = run_family(s.p, ControlSignal::constant(s.p.T, v1(1)), s.sched,
                                ex::example1_x0(), fo);
    REQUIRE(fam.members.size() == 2);
    CHECK_FALSE(fam.members[0].error.empty());
    CHECK_FALSE(fam.members[1].error.empty());
    CHECK_FALSE(fam.gaps_monotone);
}

TEST_CASE("nearby starts stay together") {
    const auto& s = setup();
    const auto u = ex::example1_optimal_control(ex::example1_params());
    Vec d(2);
    d << 1e-6, 0.0;
    const auto c = measure_contraction(s.p, u, s.sched.gammas[4], s.sched.sigmas[4],
                                       ex::example1_x0(), d);
    const double C = 2 * (s.rep.M + s.rep.xi_bound() * s.rep.max_hess);
    CHECK(c.growth_rate <= C);
    CHECK(c.max_ratio <= std::exp(C * s.p.T));
}
