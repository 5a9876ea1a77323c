#pragma once

#include "sweep/adjoint.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sweep {

struct MPTolerances {
    double nontriviality = 1e-9;
    /// maximization: rel * (1 + |p|_inf * M)
    double maximization_rel = 1e-6;
    /// transversality: rel * (1 + |p|)
    double transversality_rel = 1e-8;
    /// adjoint equation: rel * (1 + max |p|)
    double adjoint_rel = 1e-6;
    /// End points within this distance of a set boundary count as on it.
    double active_set = 1e-8;
    /// Allowed distance of the end points from C0 / CT.
    double membership = 1e-8;
    /// Nodes with psi < -interior are in I_b.
    double interior = 1e-8;
    /// Weight of the -alpha lambda |u - u_hat| term in the maximization.
    double alpha = 0.0;
    /// Bound on the multiplier density, checked when set.
    std::optional<double> xi_bound;
};

struct ConditionVerdict {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string note;
};

struct BoundDiagnostics {
    double max_xi = 0.0;
    std::optional<double> xi_bound;  // defaults to mu / eta^2
    double gradient_mass = 0.0;
    double p_variation = 0.0;  // sum |p[i+1] - p[i]|
    double eta_mass = 0.0;  // sum |deta|
    double K0 = 0.0;
    double growth_ratio = 0.0;
};

struct MPReport {
    double lambda = 0.0;
    double nontriviality = 0.0;
    double adjoint_residual = 0.0;
    double max_residual = 0.0;
    double transversality_residual_0 = 0.0;
    double transversality_residual_T = 0.0;
    BoundDiagnostics bounds;
    /// Conditions in order: nontriviality, adjoint, maximization,
    /// transversality.
    std::vector<ConditionVerdict> verdicts;
    std::vector<std::string> notes;

    bool passed() const;
    const ConditionVerdict& verdict(const std::string& name) const;
};

/// max over nodes of max_u <p, f(t,x,u)> - alpha lambda |u - u_hat| minus
/// <p, f(t,x,u_hat)>. u_hat itself is always a candidate, so the result is
/// never negative.
double maximization_residual(const ProblemSpec& spec, const Trajectory& traj,
                             const AdjointArc& arc, const std::vector<Vec>& u_samples,
                             double alpha = 0.0, double lambda = 0.0);

/// (dist(p0, N_C0(x0)), dist(-pT, N_CT(xT) + lambda dphi(xT))), minimized over
/// the supplied subgradients.
std::pair<double, double> transversality_residual(const SimpleSet& C0, const SimpleSet& CT,
                                                  const CostFn& phi, const Vec& x0,
                                                  const Vec& xT, const Vec& p0, const Vec& pT,
                                                  double lambda, double active_tol = 1e-8,
                                                  double membership_tol = 1e-8);

struct AdjointDefect {
    double residual = 0.0;
    std::size_t worst_interval = 0;
    double worst = 0.0;
    bool worst_interior = false;
};

/// Discrete defect of dp = -(d/dx f)^T p dt + xi hess psi p dt + grad psi deta:
/// sum over intervals of the defect with the normal direction projected out
/// off I_b, plus sign and support violations of xi and eta.
AdjointDefect adjoint_residual(const ProblemSpec& spec, const Trajectory& traj,
                               const AdjointArc& arc, double interior_tol);

MPReport assemble_report(const ProblemSpec& spec, const Trajectory& traj, const AdjointArc& arc,
                         const MPTolerances& tol = {});

}  // namespace sweep
