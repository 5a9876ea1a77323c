#pragma once

#include "sweep/penalty.hpp"
#include "sweep/trajectory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sweep {

struct IntegratorOptions {
    /// Absolute and relative local error tolerance per step.
    double tol = 1e-8;
    double h_initial = 1e-3;
    double h_min = 1e-14;
    /// 0 means T / 16.
    double h_max = 0.0;
    /// h <= stiffness_factor / (gamma xi |grad psi|^2 + xi |hess psi|).
    double stiffness_factor = 2.0;
    long max_steps = 20'000'000;
};

/// Adaptive Dormand-Prince 5(4) solve of
///   x' = f(t,x,u) - gamma exp(gamma (psi - sigma)) grad psi,  x(0) = x0.
/// The grid contains every control breakpoint. When `inflated_level` is
/// given, x0 must satisfy psi(0,x0) - sigma <= inflated_level.
Trajectory integrate_forward(const ProblemSpec& p, const ControlSignal& u, double gamma,
                             double sigma, const Vec& x0, const IntegratorOptions& opts = {},
                             std::optional<double> inflated_level = std::nullopt);

struct FamilyMember {
    int k = 0;  // 1-based
    double sigma = 0.0;
    double gamma = 0.0;
    double mu_k = 0.0;
    std::optional<Trajectory> trajectory;
    std::string error;  // non-empty when the integration failed
    double gap = 0.0;       // sup-norm distance to the catch-up reference
    double epsilon = 0.0;   // |x_k(T) - x_ref(T)|
    double max_xi = 0.0;
    /// max over the grid of psi - sigma - mu_k (<= 0 when inside C^k).
    double max_inflation_excess = 0.0;
    std::size_t steps = 0;
};

struct FamilyOptions {
    IntegratorOptions integrator;
    int reference_steps = 20'000;
    int gap_points = 2'001;
    /// Number of schedule members to run; 0 means all.
    int members = 0;
};

struct FamilyReport {
    std::vector<FamilyMember> members;
    Trajectory reference;
    bool gaps_monotone = true;
    double xi_bound = 0.0;
};

/// Penalty solves for every schedule member with one control, compared with
/// the catch-up oracle.
FamilyReport run_family(const ProblemSpec& p, const ControlSignal& u,
                        const PenaltySchedule& schedule, const Vec& x0,
                        const FamilyOptions& opts = {});

struct ContractionReport {
    /// max over t > 0 of log(|x1(t) - x2(t)| / |delta|) / t.
    double growth_rate = 0.0;
    double max_ratio = 0.0;
    double final_ratio = 0.0;
};

/// Runs two penalty solves from x0 and x0 + delta with the same control.
ContractionReport measure_contraction(const ProblemSpec& p, const ControlSignal& u, double gamma,
                                      double sigma, const Vec& x0, const Vec& delta,
                                      const IntegratorOptions& opts = {});

}  // namespace sweep
