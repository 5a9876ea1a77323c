#pragma once

#include "sweep/trajectory.hpp"

namespace sweep {

/// Euclidean projection onto C(t). When active, input - point equals
/// multiplier * grad psi(t, point).
struct ProjectionResult {
    Vec point;
    double multiplier = 0.0;
    bool active = false;
    int iterations = 0;
};

struct ProjectionOptions {
    double tol = 1e-12;
    int max_iterations = 100;
    /// Fail when |grad psi| drops below this at an iterate.
    double min_grad = 0.0;
};

ProjectionResult project_onto_sublevel(const ConstraintFn& c, double t, const Vec& y,
                                       const ProjectionOptions& opts = {});

/// Moreau catch-up: x_{i+1} = proj_{C(t_{i+1})}(x_i + h f(t_i, x_i, u_i)) on a
/// uniform grid of N steps.
Trajectory catchup_simulate(const ProblemSpec& p, const ControlSignal& u, const Vec& x0, int N);

}  // namespace sweep
