#pragma once

#include "sweep/catchup.hpp"
#include "sweep/mpcheck.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace sweep::examples {

/// Radius of the moving disc: (1 - 2t)^2 + 1/4.
template <typename Scalar>
Scalar rho(Scalar t) {
    const Scalar a = Scalar(1) - Scalar(2) * t;
    return a * a + Scalar(0.25);
}

template <typename Scalar>
Scalar rho_dot(Scalar t) {
    return Scalar(8) * t - Scalar(4);
}

/// (r', phi') for x = r (cos phi, sin phi) under x' = (u, 0) - lambda x.
template <typename Scalar>
std::pair<Scalar, Scalar> polar_rhs(Scalar r, Scalar phi, Scalar u, Scalar lambda) {
    using std::cos;
    using std::sin;
    if (!(r > Scalar(1e-12))) throw ProblemError("polar_rhs: r must exceed 1e-12");
    return {u * cos(phi) - lambda * r, -u * sin(phi) / r};
}

/// tan(phi/2) along the boundary arc under u = 1.
template <typename Scalar>
Scalar boundary_tan_half(Scalar t) {
    using std::atan;
    using std::exp;
    using std::sqrt;
    return exp(atan(Scalar(2) * (Scalar(1) - Scalar(2) * t)) - Scalar(std::numbers::pi / 4)) /
           sqrt(Scalar(3));
}

/// Polar angle of the boundary arc, valid on [1/4, t*].
template <typename Scalar>
Scalar phi_boundary(Scalar t) {
    using std::atan;
    return Scalar(2) * atan(boundary_tan_half(t));
}

struct TStar {
    double tstar = 0.0;
    double tau = 0.0;
    /// |(1 - tau^2)/(1 + tau^2) - (8 t* - 4)|
    double residual_speed = 0.0;
    /// |tau - tan(phi_boundary(t*)/2)|
    double residual_angle = 0.0;
};

/// Bisection on (1/2, 5/8) for the instant the boundary arc turns tangent.
TStar solve_tstar();

struct Example1Params {
    double t1 = 0.25;
    double tstar = 0.0;
    double tau = 0.0;
    double theta = 0.0;
    double t2 = 0.0;
    double T = 0.0;
    double mu_ctrl = 0.0;
    double rT = 0.0;
    double Delta = 0.0;
    // state at t2 on the boundary
    double r_t2 = 0.0;
    double phi_t2 = 0.0;
    double x_t2 = 0.0;
    double y_t2 = 0.0;
    double xdot_t2 = 0.0;
    double rho_T = 0.0;
};

/// Terminal radius r_T(mu) without validity checks.
double terminal_radius(double mu_ctrl);

/// Throws ProblemError when mu_ctrl <= 0 or the ordering
/// rho(T) > r(t2) > r_T > r(t2) sin phi(t2) or Delta > 0 fails.
Example1Params example1_params(double mu_ctrl = 0.05);

/// The bang-bang control 1 on [0, t2), -mu_ctrl on [t2, T].
ControlSignal example1_optimal_control(const Example1Params& ep);

Vec example1_x0();

ProblemSpec example1_problem(double mu_ctrl = 0.05);
ProblemSpec example2_problem(double mu_ctrl = 0.05, double sigma_drift = 0.05);
/// psi = |x|^2 - radius^2, f = (u, 0), U = [-1, 1], x0 = 0.
ProblemSpec static_disc_problem(double radius = 1.0, double T = 2.0);

/// A registered problem with its start point and a reference control.
struct BuiltinProblem {
    std::string id;
    ProblemSpec spec;
    Vec x0;
    ControlSignal nominal_control;
    std::map<std::string, double> parameters;
};

std::vector<std::string> builtin_ids();
/// Overrides: example1 {mu_ctrl}, example2 {mu_ctrl, sigma_drift},
/// static-disc {radius, T}. Unknown ids or keys throw ConfigError.
BuiltinProblem make_builtin(const std::string& id,
                            const std::map<std::string, double>& overrides = {});

struct SwitchSearchOptions {
    int switch_points = 201;
    int catchup_steps = 4000;
    int adversaries = 20;
    int adversary_pieces = 20;
    std::uint64_t seed = 42;
    int max_attempts = 20000;
    int refine_iterations = 40;
};

struct SwitchSample {
    double switch_time = 0.0;
    double cost = 0.0;
    bool admissible = false;
    double terminal_excess = 0.0;  // |x(T)|^2 - r_T^2 for ball C_T
};

struct AdversaryResult {
    ControlSignal control;
    double cost = 0.0;
    std::string kind;  // "random" or "perturbed"
};

struct SwitchSearchResult {
    double best_switch = 0.0;
    double best_cost = 0.0;
    ControlSignal best_control;
    Trajectory best_trajectory;
    std::vector<SwitchSample> cost_curve;
    std::vector<AdversaryResult> adversaries;
    int rejected_draws = 0;
    bool beats_adversaries = true;
    /// First boundary contact under u = -mu_ctrl throughout (T if none).
    double lower_control_contact = 0.0;
};

/// Switch-time search over u = 1 then -mu_ctrl, scored with catch-up runs.
/// Throws ProblemError when no grid switch time is admissible.
SwitchSearchResult example2_search(const ProblemSpec& spec, double mu_ctrl,
                                   const SwitchSearchOptions& opts = {});

/// Costate constant (0, qT) with xi = 0 and eta = 0 along `traj`: the only
/// shape compatible with a first component vanishing after the switch.
AdjointArc vanishing_first_component_arc(const Trajectory& traj, double qT, double lambda);

/// Degenerate multiplier set lambda = 1, p = 0, q = -y(T)/x(T), xi = 0,
/// eta = 0 (not normalized).
AdjointArc degenerate_certificate(const Trajectory& traj);

}  // namespace sweep::examples
