#pragma once

#include "sweep/integrate.hpp"

#include <vector>

namespace sweep {

/// Backward costate arc on the forward grid.
struct AdjointArc {
    std::vector<double> t;
    std::vector<Vec> p;
    /// Multiplier density at the nodes (gamma exp(gamma (psi - sigma)) for
    /// penalty arcs).
    std::vector<double> xi;
    /// deta[i] is the measure increment on [t[i], t[i+1]].
    std::vector<double> deta;
    double lambda = 0.0;

    // run diagnostics
    double normalization = 0.0;  // lambda + |p(T)|
    double K0 = 0.0;             // M + max xi * max |hess psi| along the run
    double growth_ratio = 0.0;   // max_t |p(t)| / (exp(K0 (T - t)) |p(T)|)
    double p_variation = 0.0;    // sum |p[i+1] - p[i]|
    double eta_tv = 0.0;         // sum |deta[i]|
    double gradient_mass = 0.0;    // int gamma^2 e^(...) |grad psi| |<grad psi, p>| dt
    double measure_mass = 0.0;    // int gamma^2 e^(...) |<grad psi, p>| dt

    std::size_t size() const { return t.size(); }
};

/// -(d/dx f)^T p + xi hess psi p + gamma xi grad psi <grad psi, p>,
/// xi = gamma exp(gamma (psi - sigma)).
Vec adjoint_rhs(const ProblemSpec& spec, double t, const Vec& x, const Vec& u, const Vec& p,
                double gamma, double sigma);

/// Linear backward propagation of the penalized adjoint from p(T) = pT along
/// `traj`. lambda is left at 0 and the normalization is not checked.
AdjointArc propagate_costate(const ProblemSpec& spec, const Trajectory& traj, const Vec& pT,
                             double gamma, double sigma, const IntegratorOptions& opts = {});

/// Same, for a normalized multiplier pair: lambda >= 0, lambda + |pT| = 1.
AdjointArc integrate_adjoint_backward(const ProblemSpec& spec, const Trajectory& traj,
                                      const Vec& pT, double lambda, double gamma, double sigma,
                                      const IntegratorOptions& opts = {});

struct ContactMass {
    double time = 0.0;
    double mass = 0.0;  // sum |deta| within the window around `time`
};

struct MultiplierProfile {
    std::vector<double> xi_limit;  // xi off I_b, 0 on I_b
    std::vector<bool> Ib_mask;     // psi < -Ib_tolerance
    double eta_tv = 0.0;           // sum |deta| off I_b
    double max_interior_xi = 0.0;
    double interior_bound = 0.0;   // gamma exp(-gamma Ib_tolerance / 2)
    bool interior_ok = true;
    /// Concentrated measure near the instants where the arc enters or
    /// leaves the boundary.
    std::vector<ContactMass> contacts;
};

MultiplierProfile multiplier_profile(const AdjointArc& arc, const Trajectory& traj,
                                     double Ib_tolerance, double contact_window = 0.01);

}  // namespace sweep
