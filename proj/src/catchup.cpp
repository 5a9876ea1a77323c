#include "sweep/catchup.hpp"

#include <cmath>
#include <sstream>

namespace sweep {

namespace {

std::string where(double t, const Vec& y) {
    std::ostringstream os;
    os.precision(17);
    os << " at t=" << t << " y=(" << y.transpose() << ")";
    return os.str();
}

}  // namespace

ProjectionResult project_onto_sublevel(const ConstraintFn& c, double t, const Vec& y,
                                       const ProjectionOptions& opts) {
    const auto e0 = c(t, y);
    if (e0.value <= 0.0) return {y, 0.0, false, 0};

    if (c.is_centered_disc()) {
        const double R = c.disc_radius(t);
        const double r = y.norm();
        return {y * (R / r), (r - R) / (2.0 * R), true, 0};
    }

    // Newton on the KKT system z - y + s grad psi(z) = 0, psi(z) = 0.
    const auto n = y.size();
    Vec z = y;
    double s = 0.0;
    auto residual = [&](const Vec& zz, double ss, const ConstraintEval& e) {
        Vec r(n + 1);
        r.head(n) = zz - y + ss * e.grad;
        r[n] = e.value;
        return r;
    };
    ConstraintEval e = e0;
    Vec F = residual(z, s, e);
    const double scale = 1.0 + y.norm();
    for (int it = 1; it <= opts.max_iterations; ++it) {
        if (e.grad.norm() < opts.min_grad) {
            throw ProjectionError("project_onto_sublevel: gradient below floor" + where(t, y));
        }
        Mat J = Mat::Zero(n + 1, n + 1);
        J.topLeftCorner(n, n) = Mat::Identity(n, n) + s * e.hess;
        J.topRightCorner(n, 1) = e.grad;
        J.bottomLeftCorner(1, n) = e.grad.transpose();
        const Vec step = J.fullPivLu().solve(-F);

        // backtracking on |F|
        double lambda = 1.0;
        const double f0 = F.norm();
        Vec z_new;
        double s_new = s;
        ConstraintEval e_new;
        Vec F_new;
        for (int bt = 0; bt < 30; ++bt) {
            z_new = z + lambda * step.head(n);
            s_new = std::max(0.0, s + lambda * step[n]);
            e_new = c(t, z_new);
            F_new = residual(z_new, s_new, e_new);
            if (F_new.norm() < (1.0 - 1e-4 * lambda) * f0) break;
            lambda *= 0.5;
        }
        z = std::move(z_new);
        s = s_new;
        e = std::move(e_new);
        F = std::move(F_new);
        if (std::abs(e.value) <= opts.tol && F.head(n).norm() <= opts.tol * scale) {
            if (e.value > 0.0) {
                z -= e.value / e.grad.squaredNorm() * e.grad;
            }
            return {z, s, true, it};
        }
    }
    throw ProjectionError("project_onto_sublevel: Newton did not converge" + where(t, y));
}

Trajectory catchup_simulate(const ProblemSpec& p, const ControlSignal& u, const Vec& x0, int N) {
    if (N < 100) throw ProblemError("catchup_simulate: N must be at least 100");
    if (p.constraint.value(0.0, x0) > 1e-10) {
        throw ProblemError("catchup_simulate: x0 is not in C(0)");
    }
    u.validate(p.U, p.T);

    const double h = p.T / N;
    Trajectory tr;
    tr.t.reserve(N + 1);
    tr.x.reserve(N + 1);
    tr.u.reserve(N + 1);
    tr.psi.reserve(N + 1);
    tr.xi.reserve(N + 1);

    Vec x = x0;
    tr.t.push_back(0.0);
    tr.x.push_back(x);
    tr.psi.push_back(p.constraint.value(0.0, x));
    tr.xi.push_back(0.0);
    for (int i = 0; i < N; ++i) {
        const double t = p.T * i / N;
        const double t_next = (i + 1 == N) ? p.T : p.T * (i + 1) / N;
        const Vec& ui = u.at(t);
        tr.u.push_back(ui);
        const Vec y = x + h * p.f(t, x, ui).velocity;
        auto pr = project_onto_sublevel(p.constraint, t_next, y);
        x = std::move(pr.point);
        tr.t.push_back(t_next);
        tr.x.push_back(x);
        tr.psi.push_back(p.constraint.value(t_next, x));
        tr.xi.push_back(pr.multiplier / h);
    }
    tr.u.push_back(u.at(p.T));
    return tr;
}

}  // namespace sweep
