#include "sweep/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sweep::cli {

namespace {

double positive(const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(name) + " must be a positive number");
    }
    return v;
}

std::vector<double> parse_list(const std::string& text, const char* name) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string(name) + ": cannot parse '" + item + "'");
        }
    }
    return out;
}

template <typename T>
T get(const io::Json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

void require_object(const io::Json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError("config '" + where + "' must be an object");
}

}  // namespace

void RunConfig::check() const {
    schedule.check();
    positive("integrator.tol", integrator.tol);
    positive("integrator.h_initial", integrator.h_initial);
    positive("integrator.h_min", integrator.h_min);
    if (integrator.h_max < 0.0) throw ConfigError("integrator.h_max must be >= 0");
    positive("integrator.stiffness_factor", integrator.stiffness_factor);
    if (integrator.max_steps < 1) throw ConfigError("integrator.max_steps must be positive");
    positive("beta", probe.beta);
    if (probe.time_samples < 10 || probe.state_samples < 10 || probe.control_samples < 10) {
        throw ConfigError("probe grids need at least 10 samples per axis");
    }
    positive("tolerances.nontriviality", tolerances.nontriviality);
    positive("tolerances.maximization_rel", tolerances.maximization_rel);
    positive("tolerances.transversality_rel", tolerances.transversality_rel);
    positive("tolerances.adjoint_rel", tolerances.adjoint_rel);
    positive("tolerances.active_set", tolerances.active_set);
    positive("tolerances.membership", tolerances.membership);
    positive("tolerances.interior", tolerances.interior);
    if (!(tolerances.alpha >= 0.0)) throw ConfigError("tolerances.alpha must be >= 0");
    positive("ib_tolerance", ib_tolerance);
    if (method != "penalty" && method != "catchup") {
        throw ConfigError("method must be 'penalty' or 'catchup'");
    }
    if (costate != "constant" && costate != "penalty") {
        throw ConfigError("costate must be 'constant' or 'penalty'");
    }
    if (k < 0 || k > schedule.K) throw ConfigError("k must lie in 0..K");
    if (gamma) positive("gamma", *gamma);
    if (sigma) positive("sigma", *sigma);
    if (gamma.has_value() != sigma.has_value()) {
        throw ConfigError("gamma and sigma must be given together");
    }
    if (steps < 100) throw ConfigError("steps must be at least 100");
    if (members < 1) throw ConfigError("members must be positive");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    if (search.switch_points < 100) throw ConfigError("switch_points must be at least 100");
    if (search.adversaries < 0) throw ConfigError("adversaries must be >= 0");
    if (search.catchup_steps < 100) throw ConfigError("search_steps must be at least 100");
}

void apply_json(RunConfig& cfg, const io::Json& j) {
    require_object(j, "<root>");
    for (const auto& [key, v] : j.items()) {
        if (key == "problem") cfg.problem = get<std::string>(v, key);
        else if (key == "params") {
            require_object(v, key);
            for (const auto& [pk, pv] : v.items()) cfg.params[pk] = get<double>(pv, "params." + pk);
        } else if (key == "mu_ctrl" || key == "sigma_drift") cfg.params[key] = get<double>(v, key);
        else if (key == "output") cfg.output = get<std::string>(v, key);
        else if (key == "method") cfg.method = get<std::string>(v, key);
        else if (key == "k") cfg.k = get<int>(v, key);
        else if (key == "gamma") cfg.gamma = get<double>(v, key);
        else if (key == "sigma") cfg.sigma = get<double>(v, key);
        else if (key == "steps") cfg.steps = get<int>(v, key);
        else if (key == "control") cfg.control = get<std::string>(v, key);
        else if (key == "lambda") cfg.lambda = get<double>(v, key);
        else if (key == "pT") cfg.pT = get<std::vector<double>>(v, key);
        else if (key == "costate") cfg.costate = get<std::string>(v, key);
        else if (key == "members") cfg.members = get<int>(v, key);
        else if (key == "ib_tolerance") cfg.ib_tolerance = get<double>(v, key);
        else if (key == "seed") cfg.search.seed = get<std::uint64_t>(v, key);
        else if (key == "switch_points") cfg.search.switch_points = get<int>(v, key);
        else if (key == "adversaries") cfg.search.adversaries = get<int>(v, key);
        else if (key == "search_steps") cfg.search.catchup_steps = get<int>(v, key);
        else if (key == "beta") cfg.probe.beta = get<double>(v, key);
        else if (key == "probe") {
            require_object(v, key);
            for (const auto& [pk, pv] : v.items()) {
                if (pk == "time_samples") cfg.probe.time_samples = get<int>(pv, pk);
                else if (pk == "state_samples") cfg.probe.state_samples = get<int>(pv, pk);
                else if (pk == "control_samples") cfg.probe.control_samples = get<int>(pv, pk);
                else if (pk == "beta") cfg.probe.beta = get<double>(pv, pk);
                else throw ConfigError("unknown config key 'probe." + pk + "'");
            }
        } else if (key == "schedule") {
            require_object(v, key);
            for (const auto& [sk, sv] : v.items()) {
                if (sk == "K") cfg.schedule.K = get<int>(sv, sk);
                else if (sk == "sigma_first") cfg.schedule.sigma_first = get<double>(sv, sk);
                else if (sk == "sigma_ratio") cfg.schedule.sigma_ratio = get<double>(sv, sk);
                else if (sk == "margin") cfg.schedule.margin = get<double>(sv, sk);
                else if (sk == "gamma_growth") cfg.schedule.gamma_growth = get<double>(sv, sk);
                else throw ConfigError("unknown config key 'schedule." + sk + "'");
            }
        } else if (key == "integrator") {
            require_object(v, key);
            auto& o = cfg.integrator;
            for (const auto& [ik, iv] : v.items()) {
                if (ik == "tol") o.tol = get<double>(iv, ik);
                else if (ik == "h_initial") o.h_initial = get<double>(iv, ik);
                else if (ik == "h_min") o.h_min = get<double>(iv, ik);
                else if (ik == "h_max") o.h_max = get<double>(iv, ik);
                else if (ik == "stiffness_factor") o.stiffness_factor = get<double>(iv, ik);
                else if (ik == "max_steps") o.max_steps = get<long>(iv, ik);
                else throw ConfigError("unknown config key 'integrator." + ik + "'");
            }
        } else if (key == "tolerances") {
            require_object(v, key);
            auto& t = cfg.tolerances;
            for (const auto& [tk, tv] : v.items()) {
                if (tk == "nontriviality") t.nontriviality = get<double>(tv, tk);
                else if (tk == "maximization_rel") t.maximization_rel = get<double>(tv, tk);
                else if (tk == "transversality_rel") t.transversality_rel = get<double>(tv, tk);
                else if (tk == "adjoint_rel") t.adjoint_rel = get<double>(tv, tk);
                else if (tk == "active_set") t.active_set = get<double>(tv, tk);
                else if (tk == "membership") t.membership = get<double>(tv, tk);
                else if (tk == "interior") t.interior = get<double>(tv, tk);
                else if (tk == "alpha") t.alpha = get<double>(tv, tk);
                else throw ConfigError("unknown config key 'tolerances." + tk + "'");
            }
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

ControlSignal parse_control(const std::string& text, const examples::BuiltinProblem& b) {
    const double T = b.spec.T;
    auto one = [](double v) {
        Vec u(1);
        u << v;
        return u;
    };
    ControlSignal u;
    if (text == "nominal") {
        u = b.nominal_control;
    } else if (text.rfind("constant:", 0) == 0) {
        const auto v = parse_list(text.substr(9), "control");
        if (v.size() != 1) throw ConfigError("control constant:V takes one value");
        u = ControlSignal::constant(T, one(v[0]));
    } else if (text.rfind("bang-bang:", 0) == 0) {
        std::string rest = text.substr(10);
        for (char& c : rest) c = c == ':' ? ',' : c;
        const auto v = parse_list(rest, "control");
        if (v.size() != 3) throw ConfigError("control bang-bang:TS:A:B takes three values");
        u = ControlSignal::bang_bang(T, v[0], one(v[1]), one(v[2]));
    } else {
        throw ConfigError("control must be nominal, constant:V or bang-bang:TS:A:B");
    }
    if (u.dim() != b.spec.control_dim) throw ConfigError("control dimension mismatch");
    try {
        u.validate(b.spec.U, T);
    } catch (const ProblemError& e) {
        throw ConfigError(std::string("control: ") + e.what());
    }
    return u;
}

namespace {

/// Flag values; unset flags leave the config untouched.
struct Flags {
    std::optional<std::string> config, output, problem, method, control, costate, pT;
    std::vector<std::string> params;
    std::optional<double> mu_ctrl, sigma_drift, gamma, sigma, lambda, beta, tol, sigma_first,
        sigma_ratio, margin, gamma_growth, active_tol, membership_tol, interior_tol, alpha,
        ib_tol;
    std::optional<int> k, steps, members, switch_points, adversaries, K, search_steps;
    std::optional<std::uint64_t> seed;
};

template <typename T, typename U>
void set_if(const std::optional<T>& src, U& dst) {
    if (src) dst = *src;
}

void apply_flags(RunConfig& cfg, const Flags& f) {
    set_if(f.output, cfg.output);
    set_if(f.problem, cfg.problem);
    set_if(f.method, cfg.method);
    set_if(f.control, cfg.control);
    set_if(f.costate, cfg.costate);
    if (f.pT) cfg.pT = parse_list(*f.pT, "--pT");
    for (const auto& kv : f.params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--param expects key=value, got " + kv);
        const auto v = parse_list(kv.substr(eq + 1), "--param");
        if (v.size() != 1) throw ConfigError("--param expects one value, got " + kv);
        cfg.params[kv.substr(0, eq)] = v[0];
    }
    if (f.mu_ctrl) cfg.params["mu_ctrl"] = *f.mu_ctrl;
    if (f.sigma_drift) cfg.params["sigma_drift"] = *f.sigma_drift;
    if (f.gamma) cfg.gamma = f.gamma;
    if (f.sigma) cfg.sigma = f.sigma;
    set_if(f.lambda, cfg.lambda);
    set_if(f.beta, cfg.probe.beta);
    set_if(f.tol, cfg.integrator.tol);
    set_if(f.sigma_first, cfg.schedule.sigma_first);
    set_if(f.sigma_ratio, cfg.schedule.sigma_ratio);
    set_if(f.margin, cfg.schedule.margin);
    set_if(f.gamma_growth, cfg.schedule.gamma_growth);
    set_if(f.K, cfg.schedule.K);
    set_if(f.active_tol, cfg.tolerances.active_set);
    set_if(f.membership_tol, cfg.tolerances.membership);
    set_if(f.interior_tol, cfg.tolerances.interior);
    set_if(f.alpha, cfg.tolerances.alpha);
    set_if(f.ib_tol, cfg.ib_tolerance);
    set_if(f.k, cfg.k);
    set_if(f.steps, cfg.steps);
    set_if(f.members, cfg.members);
    set_if(f.switch_points, cfg.search.switch_points);
    set_if(f.adversaries, cfg.search.adversaries);
    set_if(f.search_steps, cfg.search.catchup_steps);
    set_if(f.seed, cfg.search.seed);
}

void add_common(CLI::App* a, Flags& f) {
    a->add_option("--config", f.config, "JSON run configuration; flags override its values");
    a->add_option("-o,--output", f.output, "Output directory (default: current directory)");
    a->add_option("--problem", f.problem, "Problem id: example1, example2, static-disc");
    a->add_option("--param", f.params, "Problem parameter override key=value (repeatable)");
    a->add_option("--mu-ctrl", f.mu_ctrl, "Shortcut for --param mu_ctrl=V");
    a->add_option("--sigma-drift", f.sigma_drift, "Shortcut for --param sigma_drift=V");
    a->add_option("--beta", f.beta, "Band width for the gradient bound eta (default 0.01)");
}

void add_schedule(CLI::App* a, Flags& f) {
    a->add_option("--K", f.K, "Number of schedule members (default 8)");
    a->add_option("--sigma-first", f.sigma_first, "First sigma (default 0.125)");
    a->add_option("--sigma-ratio", f.sigma_ratio, "Ratio between sigmas (default 0.5)");
    a->add_option("--margin", f.margin, "Require mu(gamma) > -margin*sigma (default 0.5)");
    a->add_option("--gamma-growth", f.gamma_growth, "Minimum gamma growth factor (default 2)");
    a->add_option("--tol", f.tol, "Integrator local error tolerance (default 1e-8)");
}

void add_run(CLI::App* a, Flags& f) {
    a->add_option("--method", f.method, "penalty or catchup (default penalty)");
    a->add_option("--k", f.k, "Schedule member for penalty runs, 0 = last (default 0)");
    a->add_option("--gamma", f.gamma, "Explicit penalty gamma (with --sigma)");
    a->add_option("--sigma", f.sigma, "Explicit penalty sigma (with --gamma)");
    a->add_option("--steps", f.steps, "Catch-up steps (default 20000)");
    a->add_option("--control", f.control, "nominal | constant:V | bang-bang:TS:A:B");
}

void add_multipliers(CLI::App* a, Flags& f) {
    a->add_option("--lambda", f.lambda, "Cost multiplier lambda >= 0 (default 1)");
    a->add_option("--pT", f.pT, "Terminal costate, comma separated");
    a->add_option("--ib-tol", f.ib_tol, "Interior threshold for multiplier profiles (1e-3)");
}

void add_tolerances(CLI::App* a, Flags& f) {
    a->add_option("--costate", f.costate, "constant (p = pT, xi = eta = 0) or penalty");
    a->add_option("--active-tol", f.active_tol, "End-set boundary activity tolerance (1e-8)");
    a->add_option("--membership-tol", f.membership_tol, "End-set membership tolerance (1e-8)");
    a->add_option("--interior-tol", f.interior_tol, "psi threshold for I_b (1e-8)");
    a->add_option("--alpha", f.alpha, "Weight of the alpha |u - u_hat| term (default 0)");
}

struct Context {
    RunConfig cfg;
    examples::BuiltinProblem b;
    std::ostream& out;
};

AssumptionReport checked_assumptions(const Context& c) {
    AssumptionReport rep = validate_assumptions(c.b.spec, c.cfg.probe);
    require_assumptions(rep);
    return rep;
}

struct PenaltyRun {
    double gamma = 0.0, sigma = 0.0, xi_bound = 0.0;
    Trajectory tr;
};

PenaltyRun penalty_run(const Context& c, const ControlSignal& u) {
    const auto rep = checked_assumptions(c);
    PenaltyRun r;
    r.xi_bound = rep.xi_bound();
    if (c.cfg.gamma) {
        r.gamma = *c.cfg.gamma;
        r.sigma = *c.cfg.sigma;
    } else {
        const auto s = make_schedule(rep.mu, rep.eta, c.cfg.schedule);
        const int k = c.cfg.k == 0 ? s.size() : c.cfg.k;
        r.gamma = s.gammas[k - 1];
        r.sigma = s.sigmas[k - 1];
    }
    r.tr = integrate_forward(c.b.spec, u, r.gamma, r.sigma, c.b.x0, c.cfg.integrator,
                             mu_gamma(r.gamma, rep.mu, rep.eta));
    return r;
}

Vec terminal_costate(const RunConfig& cfg, int dim) {
    if (cfg.pT.empty()) return Vec::Zero(dim);
    if (static_cast<int>(cfg.pT.size()) != dim) {
        throw ConfigError("pT must have " + std::to_string(dim) + " entries");
    }
    return Eigen::Map<const Vec>(cfg.pT.data(), dim);
}

std::string csv(const Trajectory& tr) {
    std::ostringstream os;
    io::write_trajectory_csv(os, tr);
    return os.str();
}

int cmd_validate(Context& c) {
    const auto rep = validate_assumptions(c.b.spec, c.cfg.probe);
    io::write_file(c.cfg.output, "assumptions.json", io::to_json(rep).dump(2) + "\n");
    for (const auto& chk : rep.checks) {
        c.out << chk.name << (chk.passed ? " pass  " : " FAIL  ") << chk.detail << "\n";
    }
    c.out << "M=" << io::number(rep.M) << " eta=" << io::number(rep.eta)
          << " mu=" << io::number(rep.mu) << "\n";
    return rep.ok() ? 0 : 1;
}

int cmd_simulate(Context& c) {
    const ControlSignal u = parse_control(c.cfg.control, c.b);
    io::Json summary{{"problem", c.b.id}, {"method", c.cfg.method}};
    Trajectory tr;
    if (c.cfg.method == "catchup") {
        tr = catchup_simulate(c.b.spec, u, c.b.x0, c.cfg.steps);
        summary["steps"] = c.cfg.steps;
    } else {
        PenaltyRun r = penalty_run(c, u);
        summary["gamma"] = r.gamma;
        summary["sigma"] = r.sigma;
        summary["xi_bound"] = r.xi_bound;
        tr = std::move(r.tr);
    }
    summary["nodes"] = tr.size();
    summary["x_T"] = std::vector<double>(tr.x.back().data(), tr.x.back().data() + tr.x.back().size());
    summary["cost"] = c.b.spec.phi(tr.x.back()).value;
    summary["max_xi"] = *std::max_element(tr.xi.begin(), tr.xi.end());
    io::write_file(c.cfg.output, "trajectory.csv", csv(tr));
    io::write_file(c.cfg.output, "summary.json", summary.dump(2) + "\n");
    c.out << summary.dump(2) << "\n";
    return 0;
}

int cmd_converge(Context& c) {
    const auto rep = checked_assumptions(c);
    const auto sched = make_schedule(rep.mu, rep.eta, c.cfg.schedule);
    FamilyOptions fo;
    fo.integrator = c.cfg.integrator;
    fo.reference_steps = c.cfg.steps;
    fo.members = c.cfg.members;
    const ControlSignal u = parse_control(c.cfg.control, c.b);
    const auto fam = run_family(c.b.spec, u, sched, c.b.x0, fo);
    io::Json j{{"problem", c.b.id}, {"schedule", io::to_json(sched)}, {"family", io::to_json(fam)}};
    io::write_file(c.cfg.output, "family.json", j.dump(2) + "\n");
    io::write_file(c.cfg.output, "reference.csv", csv(fam.reference));
    bool ok = fam.gaps_monotone;
    for (const auto& m : fam.members) {
        if (m.trajectory) {
            io::write_file(c.cfg.output, "member_" + std::to_string(m.k) + ".csv",
                           csv(*m.trajectory));
            c.out << "k=" << m.k << " gamma=" << io::number(m.gamma) << " gap=" << io::number(m.gap)
                  << " eps=" << io::number(m.epsilon) << "\n";
            ok = ok && m.max_xi <= fam.xi_bound + 1e-6;
        } else {
            c.out << "k=" << m.k << " failed: " << m.error << "\n";
            ok = false;
        }
    }
    c.out << (fam.gaps_monotone ? "gaps decreasing\n" : "gaps NOT decreasing\n");
    return ok ? 0 : 1;
}

int cmd_adjoint(Context& c) {
    const ControlSignal u = parse_control(c.cfg.control, c.b);
    const PenaltyRun r = penalty_run(c, u);
    const Vec pT = terminal_costate(c.cfg, c.b.spec.state_dim);
    const auto arc = integrate_adjoint_backward(c.b.spec, r.tr, pT, c.cfg.lambda, r.gamma, r.sigma,
                                                c.cfg.integrator);
    const auto prof = multiplier_profile(arc, r.tr, c.cfg.ib_tolerance);
    std::ostringstream os;
    io::write_adjoint_csv(os, arc);
    io::write_file(c.cfg.output, "adjoint.csv", os.str());
    io::write_file(c.cfg.output, "trajectory.csv", csv(r.tr));
    io::Json j{{"problem", c.b.id},
               {"gamma", r.gamma},
               {"sigma", r.sigma},
               {"arc", io::to_json(arc)},
               {"profile", io::to_json(prof)}};
    io::write_file(c.cfg.output, "adjoint.json", j.dump(2) + "\n");
    c.out << j.dump(2) << "\n";
    return arc.growth_ratio <= 1.01 && prof.interior_ok ? 0 : 1;
}

int cmd_check_mp(Context& c) {
    const ControlSignal u = parse_control(c.cfg.control, c.b);
    const Vec pT = terminal_costate(c.cfg, c.b.spec.state_dim);
    Trajectory tr;
    AdjointArc arc;
    MPTolerances tol = c.cfg.tolerances;
    if (c.cfg.costate == "penalty") {
        if (c.cfg.method != "penalty") throw ConfigError("costate=penalty needs method=penalty");
        PenaltyRun r = penalty_run(c, u);
        tol.xi_bound = r.xi_bound;
        arc = integrate_adjoint_backward(c.b.spec, r.tr, pT, c.cfg.lambda, r.gamma, r.sigma,
                                         c.cfg.integrator);
        tr = std::move(r.tr);
    } else {
        if (c.cfg.method == "catchup") {
            tr = catchup_simulate(c.b.spec, u, c.b.x0, c.cfg.steps);
        } else {
            tr = penalty_run(c, u).tr;
        }
        arc.t = tr.t;
        arc.p.assign(tr.size(), pT);
        arc.xi.assign(tr.size(), 0.0);
        arc.deta.assign(tr.size() - 1, 0.0);
        arc.lambda = c.cfg.lambda;
        arc.normalization = c.cfg.lambda + pT.norm();
    }
    const MPReport rep = assemble_report(c.b.spec, tr, arc, tol);
    const auto j = io::to_json(rep);
    io::write_file(c.cfg.output, "mp_report.json", j.dump(2) + "\n");
    for (const auto& v : rep.verdicts) {
        c.out << v.name << (v.passed ? " pass " : " FAIL ") << io::number(v.residual) << " <= "
              << io::number(v.tolerance) << (v.note.empty() ? "" : "  (" + v.note + ")") << "\n";
    }
    return rep.passed() ? 0 : 1;
}

int cmd_example1(Context& c) {
    const double mu = c.b.parameters.at("mu_ctrl");
    const auto ep = examples::example1_params(mu);
    const auto tr =
        catchup_simulate(c.b.spec, examples::example1_optimal_control(ep), c.b.x0, c.cfg.steps);
    const Vec& xT = tr.x.back();
    const double excess = xT.squaredNorm() - ep.rT * ep.rT;

    MPTolerances tol = c.cfg.tolerances;
    tol.active_set = std::max(tol.active_set, 2e-3);
    tol.membership = std::max(tol.membership, 2e-3);
    const MPReport rep = assemble_report(c.b.spec, tr, examples::degenerate_certificate(tr), tol);

    io::Json params = io::to_json(ep);
    params["terminal_excess"] = excess;
    io::write_file(c.cfg.output, "params.json", params.dump(2) + "\n");
    io::write_file(c.cfg.output, "trajectory.csv", csv(tr));
    io::write_file(c.cfg.output, "mp_report.json", io::to_json(rep).dump(2) + "\n");

    for (const char* key : {"t1", "t2", "tstar", "tau", "theta", "T", "rT", "Delta"}) {
        c.out << key << "\t" << io::number(params[key].get<double>()) << "\n";
    }
    c.out << "|x(T)|^2 - rT^2\t" << io::number(excess) << "\n";
    c.out << "certificate " << (rep.passed() ? "passes" : "FAILS") << " all four conditions\n";
    return rep.passed() && std::abs(excess) <= 2e-3 ? 0 : 1;
}

int cmd_example2(Context& c) {
    if (c.b.id != "example2") throw ConfigError("example2 needs problem example2");
    const double mu = c.b.parameters.at("mu_ctrl");
    const auto res = examples::example2_search(c.b.spec, mu, c.cfg.search);

    MPTolerances tol = c.cfg.tolerances;
    tol.active_set = std::max(tol.active_set, 2e-3);
    tol.membership = std::max(tol.membership, 2e-3);
    io::Json cands = io::Json::array();
    bool all_rejected = true;
    for (double lambda : {0.0, 0.5, 1.0}) {
        for (double q : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
            const auto arc = examples::vanishing_first_component_arc(res.best_trajectory, q, lambda);
            const auto rep = assemble_report(c.b.spec, res.best_trajectory, arc, tol);
            all_rejected = all_rejected && !rep.passed();
            io::Json e{{"lambda", lambda}, {"q", q}, {"report", io::to_json(rep)}};
            cands.push_back(e);
        }
    }

    io::Json j = io::to_json(res);
    j["vanishing_costate_candidates_rejected"] = all_rejected;
    io::write_file(c.cfg.output, "search.json", j.dump(2) + "\n");
    io::write_file(c.cfg.output, "candidates.json", cands.dump(2) + "\n");
    io::write_file(c.cfg.output, "trajectory.csv", csv(res.best_trajectory));
    std::ostringstream curve;
    curve << "switch_time,cost,admissible,terminal_excess\n";
    for (const auto& s : res.cost_curve) {
        curve << io::number(s.switch_time) << ',' << io::number(s.cost) << ','
              << (s.admissible ? 1 : 0) << ',' << io::number(s.terminal_excess) << '\n';
    }
    io::write_file(c.cfg.output, "cost_curve.csv", curve.str());

    c.out << "best switch\t" << io::number(res.best_switch) << "\n"
          << "best cost\t" << io::number(res.best_cost) << "\n"
          << "beats adversaries\t" << (res.beats_adversaries ? "yes" : "NO") << "\n"
          << "vanishing costates rejected\t" << (all_rejected ? "yes" : "NO") << "\n"
          << "first contact under -mu\t" << io::number(res.lower_control_contact) << "\n";
    return res.beats_adversaries && all_rejected && res.lower_control_contact > 0.25 ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Penalty approximation and Maximum Principle checks for controlled sweeping "
                 "processes",
                 "sweepctl"};
    app.require_subcommand(1);
    Flags f;
    struct Sub {
        CLI::App* app;
        int (*run)(Context&);
    };
    std::vector<Sub> subs;
    {
        auto* a = app.add_subcommand("validate", "Check the standing assumptions on a problem");
        add_common(a, f);
        subs.push_back({a, cmd_validate});
    }
    {
        auto* a = app.add_subcommand("simulate", "Integrate one trajectory (penalty or catch-up)");
        add_common(a, f);
        add_schedule(a, f);
        add_run(a, f);
        subs.push_back({a, cmd_simulate});
    }
    {
        auto* a = app.add_subcommand("converge", "Run the penalty family against catch-up");
        add_common(a, f);
        add_schedule(a, f);
        add_run(a, f);
        a->add_option("--members", f.members, "Schedule members to run (default 5)");
        subs.push_back({a, cmd_converge});
    }
    {
        auto* a = app.add_subcommand("adjoint", "Backward costate along a penalty trajectory");
        add_common(a, f);
        add_schedule(a, f);
        add_run(a, f);
        add_multipliers(a, f);
        subs.push_back({a, cmd_adjoint});
    }
    {
        auto* a = app.add_subcommand("check-mp", "Score a multiplier candidate against the maximum principle conditions");
        add_common(a, f);
        add_schedule(a, f);
        add_run(a, f);
        add_multipliers(a, f);
        add_tolerances(a, f);
        subs.push_back({a, cmd_check_mp});
    }
    {
        auto* a = app.add_subcommand("example1", "Parameters, optimal trajectory, certificate");
        add_common(a, f);
        a->add_option("--steps", f.steps, "Catch-up steps (default 20000)");
        subs.push_back({a, cmd_example1});
    }
    {
        auto* a = app.add_subcommand("example2", "Switch-time search with drift");
        add_common(a, f);
        a->add_option("--seed", f.seed, "Adversary seed (default 42)");
        a->add_option("--switch-points", f.switch_points, "Switch grid size (default 201)");
        a->add_option("--adversaries", f.adversaries, "Random admissible controls (default 20)");
        a->add_option("--search-steps", f.search_steps, "Catch-up steps per candidate (4000)");
        subs.push_back({a, cmd_example2});
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    const Sub* chosen = nullptr;
    for (const auto& s : subs) {
        if (s.app->parsed()) chosen = &s;
    }
    const std::string name = chosen->app->get_name();
    try {
        RunConfig cfg;
        if (name == "example2") cfg.problem = "example2";
        if (f.config) {
            std::ifstream in(*f.config);
            if (!in) throw ConfigError("cannot open config " + *f.config);
            io::Json j;
            try {
                j = io::Json::parse(in);
            } catch (const std::exception& e) {
                throw ConfigError("config " + *f.config + ": " + e.what());
            }
            apply_json(cfg, j);
        }
        apply_flags(cfg, f);
        if (name == "example1" && cfg.problem != "example1") {
            throw ConfigError("example1 needs problem example1");
        }
        cfg.check();
        Context ctx{cfg, examples::make_builtin(cfg.problem, cfg.params), out};
        return chosen->run(ctx);
    } catch (const ConfigError& e) {
        err << name << ": config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << name << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace sweep::cli
