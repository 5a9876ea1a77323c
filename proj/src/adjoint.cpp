#include "sweep/adjoint.hpp"

#include "dopri.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace sweep {

namespace {

double op_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

}  // namespace

Vec adjoint_rhs(const ProblemSpec& spec, double t, const Vec& x, const Vec& u, const Vec& p,
                double gamma, double sigma) {
    const auto f = spec.f(t, x, u);
    const auto c = spec.constraint(t, x);
    const double xi = penalty_density(gamma, c.value, sigma);
    return -f.jac_x.transpose() * p + xi * (c.hess * p) + (gamma * xi * c.grad.dot(p)) * c.grad;
}

AdjointArc propagate_costate(const ProblemSpec& spec, const Trajectory& traj, const Vec& pT,
                             double gamma, double sigma, const IntegratorOptions& opts) {
    if (traj.size() < 2) throw ProblemError("propagate_costate: trajectory has fewer than 2 nodes");
    if (pT.size() != traj.state_dim() || !pT.allFinite()) {
        throw ProblemError("propagate_costate: pT must be a finite state-sized vector");
    }
    if (!(gamma > 0.0) || !(sigma > 0.0)) {
        throw ProblemError("propagate_costate: gamma and sigma must be positive");
    }
    if (!(opts.tol > 0.0)) throw ProblemError("propagate_costate: tol must be positive");

    const std::size_t n = traj.size();
    AdjointArc arc;
    arc.t = traj.t;
    arc.p.assign(n, Vec());
    arc.xi.assign(n, 0.0);
    arc.deta.assign(n - 1, 0.0);
    arc.p[n - 1] = pT;

    const double h_max = opts.h_max > 0.0 ? opts.h_max : spec.T / 16.0;
    long budget = opts.max_steps;
    double h = opts.h_initial;

    // gamma xi <grad psi, p> and |grad psi| at (t, x(t))
    struct Density {
        double g = 0.0;
        double grad_norm = 0.0;
    };
    auto density = [&](double t, const Vec& x, const Vec& p) {
        const auto c = spec.constraint(t, x);
        const double xi = penalty_density(gamma, c.value, sigma);
        return Density{gamma * xi * c.grad.dot(p), c.grad.norm()};
    };

    Vec y = pT;
    for (std::size_t i = n - 1; i-- > 0;) {
        const double a = traj.t[i + 1], b = traj.t[i];
        const Vec& ui = traj.u[i];
        // Hermite or linear interpolation restricted to interval i
        auto state = [&](double t) -> Vec {
            const double h_int = traj.t[i + 1] - traj.t[i];
            if (h_int <= 0.0) return traj.x[i];
            const double s = std::clamp((t - traj.t[i]) / h_int, 0.0, 1.0);
            if (traj.slope_begin.size() + 1 == n) {
                const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
                const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
                return h00 * traj.x[i] + h10 * h_int * traj.slope_begin[i] +
                       h01 * traj.x[i + 1] + h11 * h_int * traj.slope_end[i];
            }
            return (1 - s) * traj.x[i] + s * traj.x[i + 1];
        };
        auto rhs = [&](double t, const Vec& p) {
            return adjoint_rhs(spec, t, state(t), ui, p, gamma, sigma);
        };
        auto stiff = [&](double t, const Vec&) {
            return detail::penalty_stiffness(spec, t, state(t), gamma, sigma);
        };
        double t_prev = a;
        Density d_prev = density(a, traj.x[i + 1], y);
        double deta = 0.0;
        auto observe = [&](double t, const Vec& p, const Vec&, const Vec&) {
            const Density d = density(t, state(t), p);
            const double dt = t_prev - t;
            deta += 0.5 * (d.g + d_prev.g) * dt;
            arc.measure_mass += 0.5 * (std::abs(d.g) + std::abs(d_prev.g)) * dt;
            arc.gradient_mass +=
                0.5 * (std::abs(d.g) * d.grad_norm + std::abs(d_prev.g) * d_prev.grad_norm) * dt;
            t_prev = t;
            d_prev = d;
        };
        if (b < a) {
            h = detail::dopri_segment(rhs, stiff, a, b, y, h, opts, h_max, budget,
                                      "integrate_adjoint_backward", observe);
        }
        arc.p[i] = y;
        arc.deta[i] = deta;
    }

    double M_run = 0.0, hess_run = 0.0, xi_run = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = spec.constraint(traj.t[i], traj.x[i]);
        arc.xi[i] = penalty_density(gamma, c.value, sigma);
        xi_run = std::max(xi_run, arc.xi[i]);
        hess_run = std::max(hess_run, op_norm(c.hess));
        M_run = std::max(M_run, op_norm(spec.f(traj.t[i], traj.x[i], traj.u[i]).jac_x));
    }
    arc.K0 = M_run + xi_run * hess_run;

    const double pT_norm = pT.norm();
    for (std::size_t i = 0; i < n; ++i) {
        if (i + 1 < n) {
            arc.p_variation += (arc.p[i + 1] - arc.p[i]).norm();
            arc.eta_tv += std::abs(arc.deta[i]);
        }
        if (pT_norm > 0.0) {
            const double envelope = std::exp(arc.K0 * (traj.t.back() - traj.t[i])) * pT_norm;
            arc.growth_ratio = std::max(arc.growth_ratio, arc.p[i].norm() / envelope);
        }
    }
    arc.normalization = arc.lambda + pT_norm;
    return arc;
}

AdjointArc integrate_adjoint_backward(const ProblemSpec& spec, const Trajectory& traj,
                                      const Vec& pT, double lambda, double gamma, double sigma,
                                      const IntegratorOptions& opts) {
    if (!(lambda >= 0.0)) throw ProblemError("integrate_adjoint_backward: lambda must be >= 0");
    const double norm = lambda + pT.norm();
    if (std::abs(norm - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "integrate_adjoint_backward: lambda + |pT| = " << norm << ", expected 1";
        throw ProblemError(os.str());
    }
    AdjointArc arc = propagate_costate(spec, traj, pT, gamma, sigma, opts);
    arc.lambda = lambda;
    arc.normalization = norm;
    return arc;
}

MultiplierProfile multiplier_profile(const AdjointArc& arc, const Trajectory& traj,
                                     double Ib_tolerance, double contact_window) {
    if (arc.size() != traj.size()) {
        throw ProblemError("multiplier_profile: adjoint and state grids differ in length");
    }
    for (std::size_t i = 0; i < arc.size(); ++i) {
        if (arc.t[i] != traj.t[i]) {
            throw ProblemError("multiplier_profile: adjoint and state grids differ");
        }
    }
    if (!(Ib_tolerance > 0.0)) throw ProblemError("multiplier_profile: tolerance must be positive");

    MultiplierProfile mp;
    const std::size_t n = arc.size();
    mp.Ib_mask.resize(n);
    mp.xi_limit.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        mp.Ib_mask[i] = traj.psi[i] < -Ib_tolerance;
        mp.xi_limit[i] = mp.Ib_mask[i] ? 0.0 : arc.xi[i];
        if (mp.Ib_mask[i]) mp.max_interior_xi = std::max(mp.max_interior_xi, arc.xi[i]);
    }
    mp.interior_bound = traj.gamma * std::exp(-traj.gamma * Ib_tolerance / 2.0);
    mp.interior_ok = mp.max_interior_xi <= mp.interior_bound;

    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(mp.Ib_mask[i] && mp.Ib_mask[i + 1])) mp.eta_tv += std::abs(arc.deta[i]);
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (mp.Ib_mask[i] == mp.Ib_mask[i - 1]) continue;
        ContactMass c;
        c.time = arc.t[i];
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const double mid = 0.5 * (arc.t[j] + arc.t[j + 1]);
            if (std::abs(mid - c.time) <= contact_window) c.mass += std::abs(arc.deta[j]);
        }
        mp.contacts.push_back(c);
    }
    return mp;
}

}  // namespace sweep
