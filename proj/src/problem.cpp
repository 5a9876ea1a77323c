#include "sweep/problem.hpp"

#include "sweep/catchup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace sweep {

ConstraintFn ConstraintFn::centered_disc(Scalar1 radius, Scalar1 radius_dot) {
    ConstraintFn c([radius, radius_dot](double t, const Vec& x) {
        const double r = radius(t);
        const auto n = x.size();
        ConstraintEval e;
        e.value = x.squaredNorm() - r * r;
        e.grad = 2.0 * x;
        e.hess = 2.0 * Mat::Identity(n, n);
        e.dt = -2.0 * r * radius_dot(t);
        e.dt_grad = Vec::Zero(n);
        return e;
    });
    c.radius_ = std::move(radius);
    return c;
}

// ---------------------------------------------------------------------------
// ControlSet

ControlSet ControlSet::box(Vec lo, Vec hi) {
    if (lo.size() != hi.size() || lo.size() == 0) {
        throw ProblemError("ControlSet::box: bounds must be non-empty and of equal size");
    }
    if ((lo.array() > hi.array()).any()) {
        throw ProblemError("ControlSet::box: lo must not exceed hi");
    }
    ControlSet s;
    s.is_box_ = true;
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
}

ControlSet ControlSet::samples(std::vector<Vec> points) {
    ControlSet s;
    s.points_ = std::move(points);
    for (const auto& p : s.points_) {
        if (p.size() != s.points_.front().size()) {
            throw ProblemError("ControlSet::samples: points of mixed dimension");
        }
    }
    return s;
}

bool ControlSet::empty() const { return is_box_ ? lo_.size() == 0 : points_.empty(); }

int ControlSet::dim() const {
    if (is_box_) return static_cast<int>(lo_.size());
    return points_.empty() ? 0 : static_cast<int>(points_.front().size());
}

bool ControlSet::contains(const Vec& u, double tol) const {
    if (u.size() != dim()) return false;
    if (is_box_) {
        return ((u - lo_).array() >= -tol).all() && ((hi_ - u).array() >= -tol).all();
    }
    return std::any_of(points_.begin(), points_.end(),
                       [&](const Vec& p) { return (p - u).lpNorm<Eigen::Infinity>() <= tol; });
}

std::vector<Vec> ControlSet::extreme_points() const {
    if (!is_box_) return points_;
    const int m = dim();
    std::vector<Vec> out;
    for (long mask = 0; mask < (1L << m); ++mask) {
        Vec v(m);
        for (int i = 0; i < m; ++i) v[i] = (mask >> i) & 1 ? hi_[i] : lo_[i];
        out.push_back(v);
    }
    return out;
}

std::vector<Vec> ControlSet::probe(int per_axis) const {
    if (!is_box_) return points_;
    const int m = dim();
    const int k = std::max(per_axis, 2);
    std::vector<Vec> out;
    std::vector<int> idx(m, 0);
    while (true) {
        Vec v(m);
        for (int i = 0; i < m; ++i) {
            v[i] = lo_[i] + (hi_[i] - lo_[i]) * idx[i] / (k - 1);
        }
        out.push_back(v);
        int i = 0;
        while (i < m && ++idx[i] == k) idx[i++] = 0;
        if (i == m) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// SimpleSet

SimpleSet SimpleSet::point(Vec p) {
    SimpleSet s;
    s.kind_ = Kind::Point;
    s.a_ = std::move(p);
    return s;
}

SimpleSet SimpleSet::ball(Vec center, double radius) {
    if (!(radius > 0.0)) throw ProblemError("SimpleSet::ball: radius must be positive");
    SimpleSet s;
    s.kind_ = Kind::Ball;
    s.a_ = std::move(center);
    s.radius_ = radius;
    return s;
}

SimpleSet SimpleSet::box(Vec lo, Vec hi) {
    if (lo.size() != hi.size()) throw ProblemError("SimpleSet::box: dimension mismatch");
    if ((lo.array() > hi.array()).any()) {
        throw ProblemError("SimpleSet::box: lo must not exceed hi");
    }
    SimpleSet s;
    s.kind_ = Kind::Box;
    s.a_ = std::move(lo);
    s.b_ = std::move(hi);
    return s;
}

bool SimpleSet::contains(const Vec& x, double tol) const {
    switch (kind_) {
        case Kind::Point: return (x - a_).norm() <= tol;
        case Kind::Ball: return (x - a_).norm() <= radius_ + tol;
        case Kind::Box:
            return ((x - a_).array() >= -tol).all() && ((b_ - x).array() >= -tol).all();
    }
    return false;
}

std::vector<Vec> SimpleSet::boundary_probes(int density) const {
    const int n = dim();
    std::vector<Vec> out;
    switch (kind_) {
        case Kind::Point: out.push_back(a_); break;
        case Kind::Ball:
            if (n == 2) {
                for (int k = 0; k < density; ++k) {
                    const double a = 2.0 * M_PI * k / density;
                    out.push_back(a_ + radius_ * Vec{{std::cos(a), std::sin(a)}});
                }
            } else {
                for (int i = 0; i < n; ++i) {
                    for (double sgn : {-1.0, 1.0}) {
                        Vec v = a_;
                        v[i] += sgn * radius_;
                        out.push_back(v);
                    }
                }
            }
            break;
        case Kind::Box: {
            // vertices suffice for a convex C(t) but faces catch curved sets
            for (long mask = 0; mask < (1L << n); ++mask) {
                Vec v(n);
                for (int i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? b_[i] : a_[i];
                out.push_back(v);
            }
            const Vec mid = 0.5 * (a_ + b_);
            for (int i = 0; i < n; ++i) {
                Vec lo = mid, hi = mid;
                lo[i] = a_[i];
                hi[i] = b_[i];
                out.push_back(lo);
                out.push_back(hi);
            }
            break;
        }
    }
    return out;
}

double SimpleSet::normal_cone_distance(const Vec& x, const Vec& v, double active_tol) const {
    switch (kind_) {
        case Kind::Point: return 0.0;
        case Kind::Ball: {
            const Vec d = x - a_;
            const double r = d.norm();
            if (r < radius_ - active_tol || r == 0.0) return v.norm();
            const Vec n = d / r;
            const double along = std::max(0.0, n.dot(v));
            return (v - along * n).norm();
        }
        case Kind::Box: {
            double sq = 0.0;
            for (int i = 0; i < dim(); ++i) {
                const bool at_lo = x[i] - a_[i] <= active_tol;
                const bool at_hi = b_[i] - x[i] <= active_tol;
                double viol = v[i];
                if (at_lo && at_hi) viol = 0.0;
                else if (at_lo) viol = std::max(v[i], 0.0);
                else if (at_hi) viol = std::min(v[i], 0.0);
                sq += viol * viol;
            }
            return std::sqrt(sq);
        }
    }
    return 0.0;
}

std::string SimpleSet::describe() const {
    std::ostringstream os;
    const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, ",", ",", "", "", "(",
                              ")");
    switch (kind_) {
        case Kind::Point: os << "point" << a_.transpose().format(fmt); break;
        case Kind::Ball: os << "ball" << a_.transpose().format(fmt) << " r=" << radius_; break;
        case Kind::Box:
            os << "box" << a_.transpose().format(fmt) << ".." << b_.transpose().format(fmt);
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Assumption checks

bool AssumptionReport::ok() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

void require_assumptions(const AssumptionReport& report) {
    std::string failed;
    for (const auto& c : report.checks) {
        if (!c.passed) failed += " " + c.name + " (" + c.detail + ")";
    }
    if (!failed.empty()) throw ProblemError("validate_assumptions: failed" + failed);
}

namespace {

double spectral_norm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1 || m.cols() == 1) return m.norm();
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

/// Distance from x to C(t), or 0 when the projection fails (the probe is kept).
double distance_to_set(const ConstraintFn& c, double t, const Vec& x) {
    try {
        auto pr = project_onto_sublevel(c, t, x);
        return (x - pr.point).norm();
    } catch (const ProjectionError&) {
        return 0.0;
    }
}

/// Pulls x onto the level set psi = level along the gradient.
std::optional<Vec> onto_level(const ConstraintFn& c, double t, Vec x, double level) {
    for (int it = 0; it < 30; ++it) {
        const auto e = c(t, x);
        const double g2 = e.grad.squaredNorm();
        if (g2 < 1e-300) return std::nullopt;
        const double gap = e.value - level;
        if (std::abs(gap) < 1e-13 * (1.0 + std::abs(level))) return x;
        x -= gap / g2 * e.grad;
    }
    return std::nullopt;
}

/// Newton iteration for grad psi = 0 from x.
std::optional<Vec> critical_point(const ConstraintFn& c, double t, Vec x, double box) {
    for (int it = 0; it < 60; ++it) {
        const auto e = c(t, x);
        if (e.grad.norm() < 1e-11) return x;
        Eigen::FullPivLU<Mat> lu(e.hess);
        if (!lu.isInvertible()) return std::nullopt;
        x -= lu.solve(e.grad);
        if (x.lpNorm<Eigen::Infinity>() > box) return std::nullopt;
    }
    return std::nullopt;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

AssumptionReport validate_assumptions(const ProblemSpec& p, const ProbeGrid& grid) {
    if (p.U.empty()) throw ProblemError("validate_assumptions: control set U is empty");
    if (grid.time_samples < 10 || grid.state_samples < 10 || grid.control_samples < 10) {
        throw ProblemError("validate_assumptions: probe grids need at least 10 samples per axis");
    }
    if (!(grid.beta > 0.0)) throw ProblemError("validate_assumptions: beta must be positive");

    const int n = p.state_dim;
    const double half = p.bound_radius + 1.0;
    const auto controls = p.U.probe(grid.control_samples);
    const int ns = grid.state_samples;
    const double spacing = 2.0 * half / (ns - 1);

    AssumptionReport rep;
    rep.grid = grid;
    rep.beta = grid.beta;
    double min_grad = std::numeric_limits<double>::infinity();
    double sup_mu = 0.0;
    double max_affine_defect = 0.0;
    bool finite = true;

    struct Candidate {
        double t;
        Vec x;
        double grad;
    };
    std::vector<Candidate> weakest;  // smallest band gradients, for the critical-point search

    std::vector<int> idx(n, 0);
    Vec x(n);
    for (int j = 0; j < grid.time_samples; ++j) {
        const double t = p.T * j / (grid.time_samples - 1);
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            for (int i = 0; i < n; ++i) x[i] = -half + spacing * idx[i];
            const auto e = p.constraint(t, x);
            const bool near_set = e.value <= 0.0 || distance_to_set(p.constraint, t, x) <= 1.0;

            if (near_set) {
                const double gnorm = e.grad.norm();
                rep.max_hess = std::max(rep.max_hess, spectral_norm(e.hess));
                for (const auto& u : controls) {
                    const auto fe = p.f(t, x, u);
                    const double speed = fe.velocity.norm();
                    rep.M = std::max({rep.M, speed, spectral_norm(fe.jac_x)});
                    sup_mu = std::max(sup_mu, gnorm * speed + std::abs(e.dt));
                    finite = finite && std::isfinite(speed);
                }
                if (p.U.is_box() && controls.size() > 1 && j % 8 == 0) {
                    const Vec& ua = controls.front();
                    const Vec& ub = controls.back();
                    const Vec mid = p.f(t, x, 0.5 * (ua + ub)).velocity;
                    const Vec avg = 0.5 * (p.f(t, x, ua).velocity + p.f(t, x, ub).velocity);
                    max_affine_defect = std::max(
                        max_affine_defect, (mid - avg).norm() / (1.0 + avg.norm()));
                }
                const auto cost = p.phi(x);
                for (const auto& g : cost.subgradients) {
                    rep.lipschitz_phi = std::max(rep.lipschitz_phi, g.norm());
                }
            }

            if (e.value >= -grid.beta) {
                const double gnorm = e.grad.norm();
                if (gnorm < min_grad) min_grad = gnorm;
                weakest.push_back({t, x, gnorm});
                if (weakest.size() > 64) {
                    std::nth_element(weakest.begin(), weakest.begin() + 16, weakest.end(),
                                     [](const auto& a, const auto& b) { return a.grad < b.grad; });
                    weakest.resize(16);
                }
                // the inner edge of the band is where the gradient is usually
                // smallest; sample it exactly
                if (e.value + grid.beta < 2.0 * spacing * (gnorm + 1.0)) {
                    if (auto y = onto_level(p.constraint, t, x, -grid.beta)) {
                        min_grad = std::min(min_grad, p.constraint(t, *y).grad.norm());
                    }
                }
            }

            int i = 0;
            while (i < n && ++idx[i] == ns) idx[i++] = 0;
            if (i == n) break;
        }
    }

    rep.mu = sup_mu + 1.0;
    rep.checks.push_back({"bounded_dynamics", finite && std::isfinite(rep.M),
                          "M = " + num(rep.M) + " over probes of [0,T] x (C(t)+B) x U"});
    {
        AssumptionCheck c{"convex_velocities", true, ""};
        if (!p.U.is_box()) {
            c.detail = "finite control list; convexity of f(t,x,U) not verified";
        } else if (max_affine_defect <= 1e-9) {
            c.detail = "box U with f affine in u";
        } else {
            c.passed = false;
            c.detail = "f is not affine in u (defect " + num(max_affine_defect) +
                       "); convexity of f(t,x,U) unverified";
        }
        rep.checks.push_back(c);
    }
    {
        AssumptionCheck c{"band_gradient", true, ""};
        std::sort(weakest.begin(), weakest.end(),
                  [](const auto& a, const auto& b) { return a.grad < b.grad; });
        if (weakest.size() > 16) weakest.resize(16);
        for (const auto& w : weakest) {
            auto crit = critical_point(p.constraint, w.t, w.x, 2.0 * half);
            if (crit && p.constraint.value(w.t, *crit) >= -grid.beta) {
                std::ostringstream os;
                os << "grad psi vanishes at t=" << w.t << " x=(" << crit->transpose()
                   << ") with psi >= -beta";
                c.passed = false;
                c.detail = os.str();
                min_grad = 0.0;
                break;
            }
        }
        if (c.passed && !(min_grad > 1e-12)) {
            c.passed = false;
            c.detail = "grad psi vanishes on the band";
            min_grad = 0.0;
        }
        if (c.passed) {
            c.detail = "eta = " + num(min_grad) + " on psi >= -" + num(grid.beta);
        }
        rep.eta = std::isfinite(min_grad) ? min_grad : 0.0;
        if (!std::isfinite(min_grad)) {
            c.passed = false;
            c.detail = "band psi >= -beta not sampled";
        }
        rep.checks.push_back(c);
    }
    {
        bool bounded = !p.U.is_box() ||
                       (p.U.lo().allFinite() && p.U.hi().allFinite());
        rep.checks.push_back({"compact_controls", bounded, bounded ? "U compact" : "U unbounded"});
    }
    {
        AssumptionCheck c{"end_sets_feasible", true, "C0 in C(0), CT in C(T)"};
        if (p.C0.dim() != n || p.CT.dim() != n) {
            c.passed = false;
            c.detail = "end set dimension mismatch";
        } else {
            for (const auto& q : p.C0.boundary_probes(32)) {
                if (p.constraint.value(0.0, q) > 1e-10) {
                    c.passed = false;
                    c.detail = "C0 not contained in C(0)";
                }
            }
            for (const auto& q : p.CT.boundary_probes(32)) {
                if (p.constraint.value(p.T, q) > 1e-10) {
                    c.passed = false;
                    c.detail = "CT not contained in C(T)";
                }
            }
        }
        rep.checks.push_back(c);
    }

    rep.checks.push_back({"lipschitz_cost", std::isfinite(rep.lipschitz_phi),
                          "L_phi = " + num(rep.lipschitz_phi)});
    return rep;
}

double boundary_multiplier(const ProblemSpec& p, double t, const Vec& x, const Vec& u,
                           double boundary_tol) {
    const auto e = p.constraint(t, x);
    if (e.value > boundary_tol) {
        throw ProblemError("boundary_multiplier: state lies outside C(t) (psi = " +
                           num(e.value) + ")");
    }
    if (e.value < -boundary_tol) return 0.0;
    const double g2 = e.grad.squaredNorm();
    if (g2 <= 0.0) throw ProblemError("boundary_multiplier: grad psi vanishes on the boundary");
    const Vec v = p.f(t, x, u).velocity;
    return std::max(0.0, (e.grad.dot(v) + e.dt) / g2);
}

// ---------------------------------------------------------------------------
// Derivative consistency

double DerivativeCheck::max() const { return std::max({grad, hess, dt, dt_grad}); }

namespace {

double rel(const Vec& fd, const Vec& an) { return (fd - an).norm() / std::max(1.0, an.norm()); }

}  // namespace

DerivativeCheck check_constraint_derivatives(const ConstraintFn& c, int dim, double T,
                                             double radius, int probes, std::uint64_t seed,
                                             double step) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> time(0.0, T);
    DerivativeCheck out;
    for (int k = 0; k < probes; ++k) {
        const double t = std::clamp(time(rng), step, T - step);
        Vec x(dim);
        for (int i = 0; i < dim; ++i) x[i] = radius * unit(rng);
        const auto e = c(t, x);

        Vec fd_grad(dim);
        Mat fd_hess(dim, dim);
        for (int i = 0; i < dim; ++i) {
            Vec xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            const auto ep = c(t, xp);
            const auto em = c(t, xm);
            fd_grad[i] = (ep.value - em.value) / (2 * step);
            fd_hess.col(i) = (ep.grad - em.grad) / (2 * step);
        }
        const auto tp = c(t + step, x);
        const auto tm = c(t - step, x);
        const Vec fd_dt{{(tp.value - tm.value) / (2 * step)}};
        const Vec fd_dt_grad = (tp.grad - tm.grad) / (2 * step);

        out.grad = std::max(out.grad, rel(fd_grad, e.grad));
        out.hess = std::max(out.hess, (fd_hess - e.hess).norm() / std::max(1.0, e.hess.norm()));
        out.dt = std::max(out.dt, rel(fd_dt, Vec{{e.dt}}));
        out.dt_grad = std::max(out.dt_grad, rel(fd_dt_grad, e.dt_grad));
    }
    return out;
}

double check_dynamics_jacobian(const ProblemSpec& p, int probes, std::uint64_t seed,
                               double step) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> time(0.0, p.T);
    const auto controls = p.U.extreme_points();
    double worst = 0.0;
    for (int k = 0; k < probes; ++k) {
        const double t = time(rng);
        Vec x(p.state_dim);
        for (int i = 0; i < p.state_dim; ++i) x[i] = p.bound_radius * unit(rng);
        const Vec& u = controls[k % controls.size()];
        const auto fe = p.f(t, x, u);
        Mat fd(p.state_dim, p.state_dim);
        for (int i = 0; i < p.state_dim; ++i) {
            Vec xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            fd.col(i) = (p.f(t, xp, u).velocity - p.f(t, xm, u).velocity) / (2 * step);
        }
        worst = std::max(worst, (fd - fe.jac_x).norm() / std::max(1.0, fe.jac_x.norm()));
    }
    return worst;
}

}  // namespace sweep
