#include "sweep/mpcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace sweep {

namespace {

void require_same_grid(const Trajectory& traj, const AdjointArc& arc, const char* who) {
    bool ok = traj.size() == arc.size() && arc.p.size() == arc.size() && traj.size() >= 2 &&
              arc.xi.size() == arc.size() && arc.deta.size() + 1 == arc.size();
    for (std::size_t i = 0; ok && i < arc.size(); ++i) ok = traj.t[i] == arc.t[i];
    if (!ok) throw ProblemError(std::string(who) + ": trajectory and adjoint grids differ");
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

bool MPReport::passed() const {
    return std::all_of(verdicts.begin(), verdicts.end(),
                       [](const ConditionVerdict& v) { return v.passed; });
}

const ConditionVerdict& MPReport::verdict(const std::string& name) const {
    for (const auto& v : verdicts) {
        if (v.name == name) return v;
    }
    throw ProblemError("MPReport: no verdict named " + name);
}

double maximization_residual(const ProblemSpec& spec, const Trajectory& traj,
                             const AdjointArc& arc, const std::vector<Vec>& u_samples,
                             double alpha, double lambda) {
    if (u_samples.empty()) throw ProblemError("maximization_residual: empty control sample set");
    require_same_grid(traj, arc, "maximization_residual");
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const Vec& uh = traj.u[i];
        const double base = arc.p[i].dot(spec.f(traj.t[i], traj.x[i], uh).velocity);
        double best = base;
        for (const auto& u : u_samples) {
            const double h = arc.p[i].dot(spec.f(traj.t[i], traj.x[i], u).velocity) -
                             alpha * lambda * (u - uh).norm();
            best = std::max(best, h);
        }
        worst = std::max(worst, best - base);
    }
    return worst;
}

std::pair<double, double> transversality_residual(const SimpleSet& C0, const SimpleSet& CT,
                                                  const CostFn& phi, const Vec& x0,
                                                  const Vec& xT, const Vec& p0, const Vec& pT,
                                                  double lambda, double active_tol,
                                                  double membership_tol) {
    if (!C0.contains(x0, membership_tol)) {
        throw ProblemError("transversality_residual: x(0) is not in C0 (" + C0.describe() + ")");
    }
    if (!CT.contains(xT, membership_tol)) {
        throw ProblemError("transversality_residual: x(T) is not in CT (" + CT.describe() + ")");
    }
    const double r0 = C0.normal_cone_distance(x0, p0, active_tol);
    const auto cost = phi(xT);
    double rT = std::numeric_limits<double>::infinity();
    if (cost.subgradients.empty()) {
        rT = CT.normal_cone_distance(xT, -pT, active_tol);
    }
    for (const auto& g : cost.subgradients) {
        rT = std::min(rT, CT.normal_cone_distance(xT, -pT - lambda * g, active_tol));
    }
    return {r0, rT};
}

AdjointDefect adjoint_residual(const ProblemSpec& spec, const Trajectory& traj,
                               const AdjointArc& arc, double interior_tol) {
    require_same_grid(traj, arc, "adjoint_residual");
    AdjointDefect out;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double dt = traj.t[i + 1] - traj.t[i];
        const Vec& u = traj.u[i];
        const auto fa = spec.f(traj.t[i], traj.x[i], u);
        const auto fb = spec.f(traj.t[i + 1], traj.x[i + 1], u);
        const auto ca = spec.constraint(traj.t[i], traj.x[i]);
        const auto cb = spec.constraint(traj.t[i + 1], traj.x[i + 1]);
        const Vec& pa = arc.p[i];
        const Vec& pb = arc.p[i + 1];
        const Vec drift = 0.5 * dt *
                          ((-fa.jac_x.transpose() * pa + arc.xi[i] * (ca.hess * pa)) +
                           (-fb.jac_x.transpose() * pb + arc.xi[i + 1] * (cb.hess * pb)));
        const Vec grad = 0.5 * (ca.grad + cb.grad);
        Vec r = pb - pa - drift - arc.deta[i] * grad;
        const bool interior = ca.value < -interior_tol && cb.value < -interior_tol;
        double d = 0.0;
        if (interior) {
            // eta is null and xi vanishes on I_b
            d = r.norm() + std::abs(arc.deta[i]) +
                0.5 * dt * (std::abs(arc.xi[i]) + std::abs(arc.xi[i + 1])) * pa.norm();
        } else {
            const double gn = grad.norm();
            if (gn > 0.0) {
                const Vec n = grad / gn;
                r -= n.dot(r) * n;
            }
            d = r.norm() + dt * std::max(0.0, -std::min(arc.xi[i], arc.xi[i + 1]));
        }
        out.residual += d;
        if (d > out.worst) {
            out.worst = d;
            out.worst_interval = i;
            out.worst_interior = interior;
        }
    }
    return out;
}

MPReport assemble_report(const ProblemSpec& spec, const Trajectory& traj, const AdjointArc& arc,
                         const MPTolerances& tol) {
    require_same_grid(traj, arc, "assemble_report");
    MPReport rep;
    rep.lambda = arc.lambda;
    const Vec& p0 = arc.p.front();
    const Vec& pT = arc.p.back();
    rep.nontriviality = arc.lambda + pT.norm();

    double p_max = 0.0;
    for (const auto& p : arc.p) p_max = std::max(p_max, p.norm());

    // nontriviality
    {
        ConditionVerdict v{"nontriviality", std::max(0.0, tol.nontriviality - rep.nontriviality),
                           0.0, false, ""};
        v.passed = v.residual <= v.tolerance;
        if (!v.passed) {
            v.note = "lambda + |p(T)| = " + fmt(rep.nontriviality) + " below " +
                     fmt(tol.nontriviality);
        }
        rep.verdicts.push_back(v);
    }

    // adjoint equation with multipliers xi, eta
    {
        const auto defect = adjoint_residual(spec, traj, arc, tol.interior);
        rep.adjoint_residual = defect.residual;
        ConditionVerdict v{"adjoint", defect.residual, tol.adjoint_rel * (1.0 + p_max), false, ""};
        v.passed = v.residual <= v.tolerance;
        if (!v.passed) {
            const auto i = defect.worst_interval;
            v.note = std::string("largest defect ") + fmt(defect.worst) + " on [" +
                     fmt(traj.t[i]) + ", " + fmt(traj.t[i + 1]) + "]" +
                     (defect.worst_interior ? " inside C(t)" : " on the boundary");
        }
        rep.verdicts.push_back(v);
    }

    // maximization
    {
        const auto samples = spec.U.extreme_points();
        double M = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            for (const auto& u : samples) {
                M = std::max(M, spec.f(traj.t[i], traj.x[i], u).velocity.norm());
            }
        }
        double p_inf = 0.0;
        for (const auto& p : arc.p) p_inf = std::max(p_inf, p.lpNorm<Eigen::Infinity>());
        rep.max_residual = maximization_residual(spec, traj, arc, samples, tol.alpha, arc.lambda);
        ConditionVerdict v{"maximization", rep.max_residual,
                           tol.maximization_rel * (1.0 + p_inf * M), false, ""};
        v.passed = v.residual <= v.tolerance;
        if (!v.passed) v.note = "u_hat does not maximize <p, f> on the grid";
        rep.verdicts.push_back(v);
    }

    // transversality
    {
        ConditionVerdict v{"transversality", 0.0,
                           tol.transversality_rel * (1.0 + std::max(p0.norm(), pT.norm())), false,
                           ""};
        double r0 = 0.0, rT = 0.0;
        try {
            std::tie(r0, rT) =
                transversality_residual(spec.C0, spec.CT, spec.phi, traj.x.front(),
                                        traj.x.back(), p0, pT, arc.lambda, tol.active_set,
                                        tol.membership);
        } catch (const ProblemError& e) {
            r0 = rT = std::numeric_limits<double>::infinity();
            v.note = e.what();
        }
        rep.transversality_residual_0 = r0;
        rep.transversality_residual_T = rT;
        v.residual = std::max(r0, rT);
        v.passed = v.residual <= v.tolerance;
        if (!v.passed && v.note.empty()) {
            v.note = "r0 = " + fmt(r0) + ", rT = " + fmt(rT);
            if (spec.CT.kind() == SimpleSet::Kind::Ball &&
                (traj.x.back() - spec.CT.center()).norm() < spec.CT.radius() - tol.active_set) {
                v.note += "; x(T) lies inside CT, so only p(T) = lambda dphi qualifies";
            }
        }
        rep.verdicts.push_back(v);
    }

    rep.bounds.max_xi = *std::max_element(traj.xi.begin(), traj.xi.end());
    rep.bounds.xi_bound = tol.xi_bound;
    rep.bounds.gradient_mass = arc.gradient_mass;
    for (std::size_t i = 0; i + 1 < arc.size(); ++i) {
        rep.bounds.p_variation += (arc.p[i + 1] - arc.p[i]).norm();
        rep.bounds.eta_mass += std::abs(arc.deta[i]);
    }
    rep.bounds.K0 = arc.K0;
    rep.bounds.growth_ratio = arc.growth_ratio;
    if (tol.xi_bound && rep.bounds.max_xi > *tol.xi_bound + 1e-6) {
        rep.notes.push_back("multiplier density " + fmt(rep.bounds.max_xi) + " exceeds bound " +
                            fmt(*tol.xi_bound));
    }
    return rep;
}

}  // namespace sweep
