#pragma once

// Internal Dormand-Prince 5(4) engine shared by the forward penalty solver and
// the backward adjoint solver.

#include "sweep/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sweep::detail {

/// Stiffness of the penalty field at (t, x): gamma xi |grad psi|^2 + xi |hess psi|.
/// The Frobenius norm stands in for the spectral norm of the Hessian.
inline double penalty_stiffness(const ProblemSpec& p, double t, const Vec& x, double gamma,
                                double sigma) {
    const auto e = p.constraint(t, x);
    const double exponent = gamma * (e.value - sigma);
    if (exponent < -60.0) return 0.0;
    const double xi = gamma * std::exp(std::min(exponent, kExponentGuard));
    return gamma * xi * e.grad.squaredNorm() + xi * e.hess.norm();
}

/// Integrates y' = rhs(t, y) from a to b (b < a runs backward) on a segment
/// with smooth data. `stiffness(t, y)` bounds the step from above by
/// opts.stiffness_factor / stiffness. Each accepted step is reported as
/// observe(t_end, y_end, slope_begin, slope_end). Returns the step size to
/// try on the next segment.
template <typename Rhs, typename Stiffness, typename Observer>
double dopri_segment(Rhs&& rhs, Stiffness&& stiffness, double a, double b, Vec& y,
                     double h_guess, const IntegratorOptions& opts, double h_max,
                     long& step_budget, const char* who, Observer&& observe) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double dir = b >= a ? 1.0 : -1.0;
    const double length = std::abs(b - a);
    if (length == 0.0) return h_guess;

    auto fail = [&](const std::string& what, double t) {
        std::ostringstream os;
        os.precision(17);
        os << who << ": " << what << " at t=" << t;
        throw IntegrationError(os.str(), t);
    };

    double t = a;
    double h = std::min(h_guess, std::min(length, h_max));
    Vec k1 = rhs(t, y);
    Vec k2, k3, k4, k5, k6, k7, y_new, err;

    while (dir * (b - t) > 0.0) {
        if (--step_budget < 0) fail("step budget exhausted", t);

        const double lam = stiffness(t, y);
        if (lam > 0.0) h = std::min(h, opts.stiffness_factor / lam);
        h = std::min(h, h_max);
        const double remaining = std::abs(b - t);
        const double h_free = h;
        bool last = false;
        if (h >= remaining * (1.0 - 1e-12)) {
            h = remaining;
            last = true;
        }
        if (h < opts.h_min) fail("step size underflow", t);

        const double hs = dir * h;
        bool ok = true;
        try {
            k2 = rhs(t + c2 * hs, y + hs * (a21 * k1));
            k3 = rhs(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
            k4 = rhs(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
            k5 = rhs(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            k6 = rhs(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            y_new = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            k7 = rhs(t + hs, y_new);
            ok = y_new.allFinite() && k7.allFinite();
        } catch (const PenaltyOverflow&) {
            ok = false;
        }
        if (!ok) {
            h *= 0.25;
            continue;
        }

        err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double norm = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc =
                opts.tol + opts.tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            norm += (err[i] / sc) * (err[i] / sc);
        }
        norm = std::sqrt(norm / static_cast<double>(y.size()));
        if (!std::isfinite(norm)) {
            h *= 0.25;
            continue;
        }

        if (norm <= 1.0) {
            const double t_new = last ? b : t + hs;
            observe(t_new, y_new, k1, k7);
            t = t_new;
            y.swap(y_new);
            k1.swap(k7);
            const double grow = norm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(norm, -0.2));
            h = last ? h_free : h * std::max(1.0, grow);
        } else {
            h *= std::max(0.2, 0.9 * std::pow(norm, -0.2));
        }
    }
    return h;
}

}  // namespace sweep::detail
