#include "sweep/examples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace sweep::examples {

namespace {

double speed_gap(double t) {
    const double tau = boundary_tan_half(t);
    return (1.0 - tau * tau) / (1.0 + tau * tau) - rho_dot(t);
}

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec vec1(double a) {
    Vec v(1);
    v << a;
    return v;
}

CostFn minus_first_coordinate() {
    return [](const Vec& x) {
        CostEval c;
        c.value = -x[0];
        Vec g = Vec::Zero(x.size());
        g[0] = -1.0;
        c.subgradients.push_back(g);
        return c;
    };
}

ProblemSpec disc_problem(const std::string& name, double mu_ctrl, double sigma_drift) {
    const Example1Params ep = example1_params(mu_ctrl);
    ProblemSpec p;
    p.name = name;
    p.state_dim = 2;
    p.control_dim = 1;
    p.f = [sigma_drift](double, const Vec& x, const Vec& u) {
        DynamicsEval d;
        d.velocity = vec2(u[0], -sigma_drift * x[0]);
        d.jac_x = Mat::Zero(2, 2);
        d.jac_x(1, 0) = -sigma_drift;
        return d;
    };
    p.U = ControlSet::box(vec1(-mu_ctrl), vec1(1.0));
    p.constraint = ConstraintFn::centered_disc([](double t) { return rho(t); },
                                               [](double t) { return rho_dot(t); });
    p.C0 = SimpleSet::point(example1_x0());
    p.CT = SimpleSet::ball(Vec::Zero(2), ep.rT);
    p.phi = minus_first_coordinate();
    p.T = ep.T;
    p.bound_radius = rho(0.0);
    return p;
}

double first_contact(const Trajectory& tr, double tol = 1e-9) {
    for (std::size_t i = 0; i < tr.size(); ++i) {
        if (tr.psi[i] >= -tol) return tr.t[i];
    }
    return tr.t.back();
}

}  // namespace

TStar solve_tstar() {
    double lo = 0.5, hi = 0.625;
    if (!(speed_gap(lo) > 0.0) || !(speed_gap(hi) < 0.0)) {
        throw Error("solve_tstar: bracket (1/2, 5/8) does not change sign");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (speed_gap(mid) > 0.0 ? lo : hi) = mid;
    }
    TStar s;
    s.tstar = std::abs(speed_gap(lo)) <= std::abs(speed_gap(hi)) ? lo : hi;
    s.tau = boundary_tan_half(s.tstar);
    s.residual_speed = std::abs((1.0 - s.tau * s.tau) / (1.0 + s.tau * s.tau) - rho_dot(s.tstar));
    s.residual_angle = std::abs(s.tau - std::tan(0.5 * phi_boundary(s.tstar)));
    if (!(s.tstar > 0.5)) throw Error("solve_tstar: root does not exceed 1/2");
    return s;
}

double terminal_radius(double mu_ctrl) {
    const TStar ts = solve_tstar();
    const double theta = 0.5 * (ts.tstar - 0.5);
    const double t2 = 0.5 + theta;
    const double r = rho(t2), phi = phi_boundary(t2);
    const double x = r * std::cos(phi) - 0.5 * mu_ctrl * theta;
    const double y = r * std::sin(phi);
    return std::sqrt(x * x + y * y);
}

Example1Params example1_params(double mu_ctrl) {
    if (!(mu_ctrl > 0.0)) throw ProblemError("example1_params: mu_ctrl must be positive");
    const TStar ts = solve_tstar();
    Example1Params ep;
    ep.mu_ctrl = mu_ctrl;
    ep.tstar = ts.tstar;
    ep.tau = ts.tau;
    ep.theta = 0.5 * (ts.tstar - 0.5);
    ep.t2 = 0.5 + ep.theta;
    ep.T = 0.5 * (1.0 + 3.0 * ep.theta);
    ep.rho_T = rho(ep.T);
    ep.r_t2 = rho(ep.t2);
    ep.phi_t2 = phi_boundary(ep.t2);
    ep.x_t2 = ep.r_t2 * std::cos(ep.phi_t2);
    ep.y_t2 = ep.r_t2 * std::sin(ep.phi_t2);
    // boundary arc with u = 1: x' = rho' cos(phi) + sin(phi)^2
    ep.xdot_t2 = rho_dot(ep.t2) * std::cos(ep.phi_t2) + std::sin(ep.phi_t2) * std::sin(ep.phi_t2);
    ep.rT = terminal_radius(mu_ctrl);
    const double mu = mu_ctrl, th = ep.theta;
    ep.Delta = 2.0 * ep.r_t2 * rho_dot(ep.t2) - mu * th * ep.xdot_t2 + 2.0 * mu * ep.x_t2 -
               mu * mu * th;

    std::ostringstream why;
    if (!(ep.rho_T > ep.r_t2)) why << " rho(T) > r(t2)";
    if (!(ep.r_t2 > ep.rT)) why << " r(t2) > r_T";
    if (!(ep.rT > ep.r_t2 * std::sin(ep.phi_t2))) why << " r_T > r(t2) sin phi(t2)";
    if (!(ep.Delta > 0.0)) why << " Delta > 0";
    if (!why.str().empty()) {
        std::ostringstream os;
        os << "example1_params: mu_ctrl = " << mu_ctrl << " too large, failed:" << why.str();
        throw ProblemError(os.str());
    }
    return ep;
}

ControlSignal example1_optimal_control(const Example1Params& ep) {
    return ControlSignal::bang_bang(ep.T, ep.t2, vec1(1.0), vec1(-ep.mu_ctrl));
}

Vec example1_x0() { return vec2(0.0, std::sqrt(3.0) / 4.0); }

ProblemSpec example1_problem(double mu_ctrl) { return disc_problem("example1", mu_ctrl, 0.0); }

ProblemSpec example2_problem(double mu_ctrl, double sigma_drift) {
    if (!(sigma_drift > 0.0)) throw ProblemError("example2_problem: sigma_drift must be positive");
    return disc_problem("example2", mu_ctrl, sigma_drift);
}

ProblemSpec static_disc_problem(double radius, double T) {
    if (!(radius > 0.0)) throw ProblemError("static_disc_problem: radius must be positive");
    if (!(T > 0.0)) throw ProblemError("static_disc_problem: T must be positive");
    ProblemSpec p;
    p.name = "static-disc";
    p.state_dim = 2;
    p.control_dim = 1;
    p.f = [](double, const Vec&, const Vec& u) {
        return DynamicsEval{vec2(u[0], 0.0), Mat::Zero(2, 2)};
    };
    p.U = ControlSet::box(vec1(-1.0), vec1(1.0));
    p.constraint = ConstraintFn::centered_disc([radius](double) { return radius; },
                                               [](double) { return 0.0; });
    p.C0 = SimpleSet::point(Vec::Zero(2));
    p.CT = SimpleSet::ball(Vec::Zero(2), radius);
    p.phi = minus_first_coordinate();
    p.T = T;
    p.bound_radius = radius;
    return p;
}

std::vector<std::string> builtin_ids() { return {"example1", "example2", "static-disc"}; }

BuiltinProblem make_builtin(const std::string& id, const std::map<std::string, double>& overrides) {
    BuiltinProblem b;
    b.id = id;
    if (id == "example1") {
        b.parameters = {{"mu_ctrl", 0.05}};
    } else if (id == "example2") {
        b.parameters = {{"mu_ctrl", 0.05}, {"sigma_drift", 0.05}};
    } else if (id == "static-disc") {
        b.parameters = {{"radius", 1.0}, {"T", 2.0}};
    } else {
        throw ConfigError("unknown problem '" + id + "' (expected example1, example2, static-disc)");
    }
    for (const auto& [key, value] : overrides) {
        auto it = b.parameters.find(key);
        if (it == b.parameters.end()) {
            throw ConfigError("problem '" + id + "' has no parameter '" + key + "'");
        }
        it->second = value;
    }
    try {
        if (id == "static-disc") {
            b.spec = static_disc_problem(b.parameters["radius"], b.parameters["T"]);
            b.x0 = Vec::Zero(2);
            b.nominal_control = ControlSignal::constant(b.spec.T, vec1(1.0));
        } else {
            const double mu = b.parameters["mu_ctrl"];
            b.spec = id == "example1" ? example1_problem(mu)
                                      : example2_problem(mu, b.parameters["sigma_drift"]);
            b.x0 = example1_x0();
            b.nominal_control = example1_optimal_control(example1_params(mu));
        }
    } catch (const ProblemError& e) {
        throw ConfigError(e.what());
    }
    return b;
}

SwitchSearchResult example2_search(const ProblemSpec& spec, double mu_ctrl,
                                   const SwitchSearchOptions& opts) {
    if (opts.switch_points < 100) {
        throw ProblemError("example2_search: need at least 100 switch points");
    }
    if (opts.adversaries < 0 || opts.adversary_pieces < 2) {
        throw ProblemError("example2_search: invalid adversary settings");
    }
    const Vec x0 = example1_x0();
    const Vec hi = vec1(1.0), lo = vec1(-mu_ctrl);
    const double T = spec.T;

    auto evaluate = [&](const ControlSignal& u, SwitchSample& s) {
        Trajectory tr = catchup_simulate(spec, u, x0, opts.catchup_steps);
        const Vec& xT = tr.x.back();
        s.cost = spec.phi(xT).value;
        s.admissible = spec.CT.contains(xT, 0.0);
        s.terminal_excess = spec.CT.kind() == SimpleSet::Kind::Ball
                                ? (xT - spec.CT.center()).squaredNorm() -
                                      spec.CT.radius() * spec.CT.radius()
                                : 0.0;
        return tr;
    };

    SwitchSearchResult res;
    res.best_cost = std::numeric_limits<double>::infinity();
    int best_index = -1;
    for (int j = 0; j < opts.switch_points; ++j) {
        SwitchSample s;
        s.switch_time = T * j / (opts.switch_points - 1);
        Trajectory tr = evaluate(ControlSignal::bang_bang(T, s.switch_time, hi, lo), s);
        if (s.admissible && s.cost < res.best_cost) {
            res.best_cost = s.cost;
            res.best_switch = s.switch_time;
            res.best_trajectory = std::move(tr);
            best_index = j;
        }
        res.cost_curve.push_back(s);
    }
    if (best_index < 0) throw ProblemError("example2_search: no admissible switch time on the grid");

    // bisection on the admissibility frontier next to the grid optimum
    for (int nb : {best_index - 1, best_index + 1}) {
        if (nb < 0 || nb >= opts.switch_points || res.cost_curve[nb].admissible) continue;
        double a = res.cost_curve[best_index].switch_time, b = res.cost_curve[nb].switch_time;
        for (int it = 0; it < opts.refine_iterations; ++it) {
            const double m = 0.5 * (a + b);
            SwitchSample s;
            evaluate(ControlSignal::bang_bang(T, m, hi, lo), s);
            (s.admissible ? a : b) = m;
        }
        SwitchSample s;
        s.switch_time = a;
        Trajectory tr = evaluate(ControlSignal::bang_bang(T, a, hi, lo), s);
        if (s.admissible && s.cost < res.best_cost) {
            res.best_cost = s.cost;
            res.best_switch = a;
            res.best_trajectory = std::move(tr);
        }
    }
    res.best_control = ControlSignal::bang_bang(T, res.best_switch, hi, lo);

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> uniform(-mu_ctrl, 1.0);
    std::normal_distribution<double> noise(0.0, 0.25 * (1.0 + mu_ctrl));
    int attempts = 0;
    for (int a = 0; a < opts.adversaries; ++a) {
        const bool perturbed = a >= opts.adversaries / 2;
        while (true) {
            if (++attempts > opts.max_attempts) {
                throw ProblemError("example2_search: adversary sampling exceeded max_attempts");
            }
            std::vector<Vec> values;
            for (int k = 0; k < opts.adversary_pieces; ++k) {
                double v = uniform(rng);
                if (perturbed) {
                    const double mid = T * (k + 0.5) / opts.adversary_pieces;
                    v = std::clamp(res.best_control.at(mid)[0] + noise(rng), -mu_ctrl, 1.0);
                }
                values.push_back(vec1(v));
            }
            ControlSignal u = ControlSignal::uniform_pieces(T, std::move(values));
            SwitchSample s;
            evaluate(u, s);
            if (!s.admissible) {
                ++res.rejected_draws;
                continue;
            }
            res.adversaries.push_back({std::move(u), s.cost, perturbed ? "perturbed" : "random"});
            break;
        }
    }
    for (const auto& adv : res.adversaries) {
        if (adv.cost < res.best_cost) res.beats_adversaries = false;
    }

    const Trajectory low = catchup_simulate(spec, ControlSignal::constant(T, lo), x0,
                                            opts.catchup_steps);
    res.lower_control_contact = first_contact(low);
    return res;
}

AdjointArc vanishing_first_component_arc(const Trajectory& traj, double qT, double lambda) {
    AdjointArc arc;
    arc.t = traj.t;
    arc.p.assign(traj.size(), vec2(0.0, qT));
    arc.xi.assign(traj.size(), 0.0);
    arc.deta.assign(traj.size() - 1, 0.0);
    arc.lambda = lambda;
    arc.normalization = lambda + std::abs(qT);
    return arc;
}

AdjointArc degenerate_certificate(const Trajectory& traj) {
    const Vec& xT = traj.x.back();
    if (!(std::abs(xT[0]) > 0.0)) throw ProblemError("degenerate_certificate: x(T) has x1 = 0");
    return vanishing_first_component_arc(traj, -xT[1] / xT[0], 1.0);
}

}  // namespace sweep::examples
