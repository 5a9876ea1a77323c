#include "sweep/integrate.hpp"

#include "dopri.hpp"
#include "sweep/catchup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sweep {


Trajectory integrate_forward(const ProblemSpec& p, const ControlSignal& u, double gamma,
                             double sigma, const Vec& x0, const IntegratorOptions& opts,
                             std::optional<double> inflated_level) {
    if (!(opts.tol > 0.0)) throw ProblemError("integrate_forward: tol must be positive");
    if (!(gamma > 0.0) || !(sigma > 0.0)) {
        throw ProblemError("integrate_forward: gamma and sigma must be positive");
    }
    if (!x0.allFinite() || x0.size() != p.state_dim) {
        throw ProblemError("integrate_forward: x0 must be a finite state vector");
    }
    const double psi0 = p.constraint.value(0.0, x0);
    if (inflated_level && psi0 - sigma > *inflated_level) {
        std::ostringstream os;
        os << "integrate_forward: x0 outside the inflated set C^k(0) (psi - sigma = "
           << psi0 - sigma << " > " << *inflated_level << ")";
        throw ProblemError(os.str());
    }
    u.validate(p.U, p.T);

    const double h_max = opts.h_max > 0.0 ? opts.h_max : p.T / 16.0;
    long budget = opts.max_steps;

    Trajectory tr;
    tr.gamma = gamma;
    tr.sigma = sigma;
    tr.t.push_back(0.0);
    tr.x.push_back(x0);
    tr.psi.push_back(psi0);
    tr.xi.push_back(penalty_density(gamma, psi0, sigma));

    Vec y = x0;
    double h = opts.h_initial;
    const auto& grid = u.grid();
    for (std::size_t piece = 0; piece + 1 < grid.size(); ++piece) {
        const Vec& ui = u.values()[piece];
        auto rhs = [&](double t, const Vec& x) {
            return penalty_rhs(p, t, x, ui, gamma, sigma).velocity;
        };
        auto stiff = [&](double t, const Vec& x) {
            return detail::penalty_stiffness(p, t, x, gamma, sigma);
        };
        auto observe = [&](double t, const Vec& x, const Vec& k_begin, const Vec& k_end) {
            const double psi = p.constraint.value(t, x);
            tr.t.push_back(t);
            tr.x.push_back(x);
            tr.psi.push_back(psi);
            tr.xi.push_back(penalty_density(gamma, psi, sigma));
            tr.slope_begin.push_back(k_begin);
            tr.slope_end.push_back(k_end);
        };
        const double b = piece + 2 == grid.size() ? p.T : grid[piece + 1];
        h = detail::dopri_segment(rhs, stiff, grid[piece], b, y, h, opts, h_max, budget,
                                  "integrate_forward", observe);
    }

    tr.u.reserve(tr.t.size());
    for (std::size_t i = 0; i + 1 < tr.t.size(); ++i) tr.u.push_back(u.at(tr.t[i]));
    tr.u.push_back(u.at(p.T));
    return tr;
}

FamilyReport run_family(const ProblemSpec& p, const ControlSignal& u,
                        const PenaltySchedule& schedule, const Vec& x0,
                        const FamilyOptions& opts) {
    if (p.constraint.value(0.0, x0) > 1e-10) {
        throw ProblemError("run_family: x0 is not in C(0)");
    }
    FamilyReport rep;
    rep.xi_bound = schedule.xi_bound();
    rep.reference = catchup_simulate(p, u, x0, opts.reference_steps);
    const Vec& ref_end = rep.reference.x.back();

    const int count = opts.members > 0 ? std::min(opts.members, schedule.size()) : schedule.size();
    for (int k = 0; k < count; ++k) {
        FamilyMember m;
        m.k = k + 1;
        m.sigma = schedule.sigmas[k];
        m.gamma = schedule.gammas[k];
        m.mu_k = schedule.mus[k];
        try {
            Trajectory tr =
                integrate_forward(p, u, m.gamma, m.sigma, x0, opts.integrator, m.mu_k);
            m.gap = sup_gap(tr, rep.reference, opts.gap_points);
            m.epsilon = (tr.x.back() - ref_end).norm();
            m.max_xi = *std::max_element(tr.xi.begin(), tr.xi.end());
            m.max_inflation_excess = -std::numeric_limits<double>::infinity();
            for (double psi : tr.psi) {
                m.max_inflation_excess = std::max(m.max_inflation_excess, psi - m.sigma - m.mu_k);
            }
            m.steps = tr.size() - 1;
            m.trajectory = std::move(tr);
        } catch (const Error& e) {
            m.error = e.what();
        }
        rep.members.push_back(std::move(m));
    }

    for (std::size_t k = 1; k < rep.members.size(); ++k) {
        const auto& a = rep.members[k - 1];
        const auto& b = rep.members[k];
        if (!a.error.empty() || !b.error.empty() || !(b.gap < a.gap)) rep.gaps_monotone = false;
    }
    return rep;
}

ContractionReport measure_contraction(const ProblemSpec& p, const ControlSignal& u, double gamma,
                                      double sigma, const Vec& x0, const Vec& delta,
                                      const IntegratorOptions& opts) {
    u.validate(p.U, p.T);
    const auto n = x0.size();
    const double d0 = delta.norm();
    if (!(d0 > 0.0)) throw ProblemError("measure_contraction: delta must be non-zero");

    Vec y(2 * n);
    y << x0, x0 + delta;
    const double h_max = opts.h_max > 0.0 ? opts.h_max : p.T / 16.0;
    long budget = opts.max_steps;
    ContractionReport rep;
    double h = opts.h_initial;
    const auto& grid = u.grid();
    for (std::size_t piece = 0; piece + 1 < grid.size(); ++piece) {
        const Vec& ui = u.values()[piece];
        auto rhs = [&](double t, const Vec& z) {
            Vec out(2 * n);
            out.head(n) = penalty_rhs(p, t, z.head(n), ui, gamma, sigma).velocity;
            out.tail(n) = penalty_rhs(p, t, z.tail(n), ui, gamma, sigma).velocity;
            return out;
        };
        auto stiff = [&](double t, const Vec& z) {
            return std::max(detail::penalty_stiffness(p, t, z.head(n), gamma, sigma),
                            detail::penalty_stiffness(p, t, z.tail(n), gamma, sigma));
        };
        auto observe = [&](double t, const Vec& z, const Vec&, const Vec&) {
            const double ratio = (z.head(n) - z.tail(n)).norm() / d0;
            rep.max_ratio = std::max(rep.max_ratio, ratio);
            rep.final_ratio = ratio;
            if (t > 1e-3 * p.T) rep.growth_rate = std::max(rep.growth_rate, std::log(ratio) / t);
        };
        const double b = piece + 2 == grid.size() ? p.T : grid[piece + 1];
        h = detail::dopri_segment(rhs, stiff, grid[piece], b, y, h, opts, h_max, budget,
                                  "measure_contraction", observe);
    }
    return rep;
}

}  // namespace sweep
