#include "sweep/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace sweep::io {

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    const int n = tr.state_dim(), m = tr.control_dim();
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",x" << i;
    for (int i = 1; i <= m; ++i) os << ",u" << i;
    os << ",psi,xi\n";
    for (std::size_t k = 0; k < tr.size(); ++k) {
        os << number(tr.t[k]);
        for (int i = 0; i < n; ++i) os << ',' << number(tr.x[k][i]);
        for (int i = 0; i < m; ++i) os << ',' << number(tr.u[k][i]);
        os << ',' << number(tr.psi[k]) << ',' << number(tr.xi[k]) << '\n';
    }
}

void write_adjoint_csv(std::ostream& os, const AdjointArc& arc) {
    const auto n = arc.p.front().size();
    os << "t";
    for (Eigen::Index i = 1; i <= n; ++i) os << ",p" << i;
    os << ",xi,deta\n";
    for (std::size_t k = 0; k < arc.size(); ++k) {
        os << number(arc.t[k]);
        for (Eigen::Index i = 0; i < n; ++i) os << ',' << number(arc.p[k][i]);
        os << ',' << number(arc.xi[k]) << ','
           << number(k < arc.deta.size() ? arc.deta[k] : 0.0) << '\n';
    }
}

namespace {

Json vec(const Vec& v) {
    Json j = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

}  // namespace

Json to_json(const AssumptionReport& r) {
    Json j;
    j["ok"] = r.ok();
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    j["checks"] = checks;
    j["M"] = r.M;
    j["eta"] = r.eta;
    j["beta"] = r.beta;
    j["mu"] = r.mu;
    j["lipschitz_phi"] = r.lipschitz_phi;
    j["max_hess"] = r.max_hess;
    if (r.eta > 0.0) j["xi_bound"] = r.xi_bound();
    j["grid"] = {{"time_samples", r.grid.time_samples},
                 {"state_samples", r.grid.state_samples},
                 {"control_samples", r.grid.control_samples}};
    return j;
}

Json to_json(const PenaltySchedule& s) {
    Json j;
    j["mu"] = s.mu;
    j["eta"] = s.eta;
    j["xi_bound"] = s.xi_bound();
    j["sigmas"] = s.sigmas;
    j["gammas"] = s.gammas;
    j["mus"] = s.mus;
    return j;
}

Json to_json(const FamilyReport& r) {
    Json j;
    j["gaps_monotone"] = r.gaps_monotone;
    j["xi_bound"] = r.xi_bound;
    j["reference_steps"] = r.reference.size() - 1;
    Json members = Json::array();
    for (const auto& m : r.members) {
        Json e{{"k", m.k}, {"sigma", m.sigma}, {"gamma", m.gamma}, {"mu_k", m.mu_k}};
        if (m.error.empty()) {
            e["gap"] = m.gap;
            e["epsilon"] = m.epsilon;
            e["max_xi"] = m.max_xi;
            e["max_inflation_excess"] = m.max_inflation_excess;
            e["steps"] = m.steps;
        } else {
            e["error"] = m.error;
        }
        members.push_back(e);
    }
    j["members"] = members;
    return j;
}

Json to_json(const AdjointArc& arc) {
    Json j;
    j["lambda"] = arc.lambda;
    j["normalization"] = arc.normalization;
    j["p0"] = vec(arc.p.front());
    j["pT"] = vec(arc.p.back());
    j["K0"] = arc.K0;
    j["growth_ratio"] = arc.growth_ratio;
    j["p_variation"] = arc.p_variation;
    j["eta_tv"] = arc.eta_tv;
    j["gradient_mass"] = arc.gradient_mass;
    j["measure_mass"] = arc.measure_mass;
    j["nodes"] = arc.size();
    return j;
}

Json to_json(const MultiplierProfile& m) {
    Json j;
    j["eta_tv"] = m.eta_tv;
    j["max_interior_xi"] = m.max_interior_xi;
    j["interior_bound"] = m.interior_bound;
    j["interior_ok"] = m.interior_ok;
    std::size_t inside = 0;
    for (bool b : m.Ib_mask) inside += b ? 1 : 0;
    j["interior_nodes"] = inside;
    Json contacts = Json::array();
    for (const auto& c : m.contacts) contacts.push_back({{"time", c.time}, {"mass", c.mass}});
    j["contacts"] = contacts;
    return j;
}

Json to_json(const MPReport& r) {
    Json j;
    j["passed"] = r.passed();
    j["lambda"] = r.lambda;
    for (const auto& v : r.verdicts) {
        Json b{{"passed", v.passed}, {"residual", v.residual}, {"tolerance", v.tolerance}};
        if (!v.note.empty()) b["note"] = v.note;
        j[v.name] = b;
    }
    j["nontriviality"]["value"] = r.nontriviality;
    j["transversality"]["r0"] = r.transversality_residual_0;
    j["transversality"]["rT"] = r.transversality_residual_T;
    Json b;
    b["max_xi"] = r.bounds.max_xi;
    if (r.bounds.xi_bound) b["xi_bound"] = *r.bounds.xi_bound;
    b["gradient_mass"] = r.bounds.gradient_mass;
    b["p_variation"] = r.bounds.p_variation;
    b["eta_mass"] = r.bounds.eta_mass;
    b["K0"] = r.bounds.K0;
    b["growth_ratio"] = r.bounds.growth_ratio;
    j["bounds"] = b;
    j["notes"] = r.notes;
    return j;
}

Json to_json(const examples::Example1Params& ep) {
    return Json{{"t1", ep.t1},       {"t2", ep.t2},         {"tstar", ep.tstar},
                {"tau", ep.tau},     {"theta", ep.theta},   {"T", ep.T},
                {"rT", ep.rT},       {"Delta", ep.Delta},   {"mu_ctrl", ep.mu_ctrl},
                {"rho_T", ep.rho_T}, {"r_t2", ep.r_t2},     {"phi_t2", ep.phi_t2},
                {"x_t2", ep.x_t2},   {"y_t2", ep.y_t2},     {"xdot_t2", ep.xdot_t2}};
}

Json to_json(const examples::SwitchSearchResult& r) {
    Json j;
    j["best_switch"] = r.best_switch;
    j["best_cost"] = r.best_cost;
    j["terminal_state"] = vec(r.best_trajectory.x.back());
    j["beats_adversaries"] = r.beats_adversaries;
    j["rejected_draws"] = r.rejected_draws;
    j["lower_control_contact"] = r.lower_control_contact;
    Json adv = Json::array();
    for (const auto& a : r.adversaries) adv.push_back({{"kind", a.kind}, {"cost", a.cost}});
    j["adversaries"] = adv;
    return j;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
    const fs::path path = fs::path(dir) / name;
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw Error("cannot write " + path.string());
}

}  // namespace sweep::io
