#pragma once

#include "sweep/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sweep {

/// Value and derivatives of the moving-set function psi at (t, x).
struct ConstraintEval {
    double value = 0.0;
    Vec grad;        // d/dx psi
    Mat hess;        // d2/dx2 psi
    double dt = 0.0; // d/dt psi
    Vec dt_grad;     // d/dt d/dx psi
};

/// The moving set C(t) = {x : psi(t, x) <= 0}.
///
/// A constraint built with centered_disc() also carries its radius so that
/// projections can take the exact radial route.
class ConstraintFn {
public:
    using Eval = std::function<ConstraintEval(double, const Vec&)>;
    using Scalar1 = std::function<double(double)>;

    ConstraintFn() = default;
    explicit ConstraintFn(Eval eval) : eval_(std::move(eval)) {}

    /// psi(t, x) = |x|^2 - radius(t)^2.
    static ConstraintFn centered_disc(Scalar1 radius, Scalar1 radius_dot);

    ConstraintEval operator()(double t, const Vec& x) const { return eval_(t, x); }
    double value(double t, const Vec& x) const { return eval_(t, x).value; }

    bool is_centered_disc() const { return static_cast<bool>(radius_); }
    double disc_radius(double t) const { return radius_(t); }

private:
    Eval eval_;
    Scalar1 radius_;
};

struct DynamicsEval {
    Vec velocity;
    Mat jac_x;
};

using DynamicsFn = std::function<DynamicsEval(double, const Vec&, const Vec&)>;

/// Cost value plus a sample of its limiting subdifferential. Smooth costs
/// return their single gradient.
struct CostEval {
    double value = 0.0;
    std::vector<Vec> subgradients;
};

using CostFn = std::function<CostEval(const Vec&)>;

/// Admissible controls: a coordinate box or an explicit finite list.
class ControlSet {
public:
    ControlSet() = default;
    static ControlSet box(Vec lo, Vec hi);
    static ControlSet samples(std::vector<Vec> points);

    bool is_box() const { return is_box_; }
    bool empty() const;
    int dim() const;
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }

    bool contains(const Vec& u, double tol = 1e-12) const;
    /// Box vertices, or the list itself.
    std::vector<Vec> extreme_points() const;
    /// Tensor grid with `per_axis` nodes per coordinate, or the list itself.
    std::vector<Vec> probe(int per_axis) const;

private:
    bool is_box_ = false;
    Vec lo_, hi_;
    std::vector<Vec> points_;
};

/// Closed end-point set with a closed-form limiting normal cone.
class SimpleSet {
public:
    enum class Kind { Point, Ball, Box };

    SimpleSet() = default;
    static SimpleSet point(Vec p);
    static SimpleSet ball(Vec center, double radius);
    static SimpleSet box(Vec lo, Vec hi);

    Kind kind() const { return kind_; }
    int dim() const { return static_cast<int>(a_.size()); }
    const Vec& center() const { return a_; }  // point / ball center / box lo
    const Vec& upper() const { return b_; }   // box hi
    double radius() const { return radius_; }

    bool contains(const Vec& x, double tol = 1e-8) const;
    /// Points of the set's boundary used for inclusion checks.
    std::vector<Vec> boundary_probes(int density) const;
    /// Euclidean distance from v to the limiting normal cone at x. Points
    /// within `active_tol` of the boundary count as boundary points.
    double normal_cone_distance(const Vec& x, const Vec& v, double active_tol) const;

    std::string describe() const;

private:
    Kind kind_ = Kind::Point;
    Vec a_, b_;
    double radius_ = 0.0;
};

/// An optimal-control problem over a controlled sweeping process:
/// minimize phi(x(T)) subject to x' in f(t,x,u) - N_{C(t)}(x), u in U,
/// x(0) in C0, x(T) in CT.
struct ProblemSpec {
    std::string name;
    int state_dim = 0;
    int control_dim = 0;
    DynamicsFn f;
    ControlSet U;
    ConstraintFn constraint;
    SimpleSet C0;
    SimpleSet CT;
    CostFn phi;
    double T = 1.0;
    /// C(t) lies in the ball of this radius around 0 for every t in [0, T].
    double bound_radius = 1.0;
};

struct ProbeGrid {
    int time_samples = 64;
    int state_samples = 64;
    int control_samples = 16;
    double beta = 0.01;
};

struct AssumptionCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Measured constants and per-assumption verdicts.
struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    ProbeGrid grid;
    double M = 0.0;         // sup of |f| and |d/dx f|
    double eta = 0.0;       // inf of |d/dx psi| on the band psi >= -beta
    double beta = 0.0;
    double mu = 0.0;        // sup(|grad psi||f| + |d/dt psi|) + 1
    double lipschitz_phi = 0.0;
    double max_hess = 0.0;  // sup of |d2/dx2 psi| over C(t) + unit ball

    bool ok() const;
    const AssumptionCheck* find(const std::string& name) const;
    /// mu / eta^2, the uniform bound on boundary multipliers.
    double xi_bound() const { return mu / (eta * eta); }
};

AssumptionReport validate_assumptions(const ProblemSpec& p, const ProbeGrid& grid = {});

/// Throws ProblemError naming every failed assumption.
void require_assumptions(const AssumptionReport& report);

/// Multiplier of the normal cone that keeps a boundary state on the
/// boundary: (<grad psi, f> + d/dt psi) / |grad psi|^2, clipped at 0.
/// Zero strictly inside C(t).
double boundary_multiplier(const ProblemSpec& p, double t, const Vec& x, const Vec& u,
                           double boundary_tol = 1e-9);

struct DerivativeCheck {
    double grad = 0.0;
    double hess = 0.0;
    double dt = 0.0;
    double dt_grad = 0.0;
    double max() const;
};

/// Worst relative central-difference mismatch of the supplied derivatives
/// over random probes in [0,T] x (ball of `radius`).
DerivativeCheck check_constraint_derivatives(const ConstraintFn& c, int dim, double T,
                                             double radius, int probes, std::uint64_t seed,
                                             double step = 1e-5);

/// Same for d/dx f.
double check_dynamics_jacobian(const ProblemSpec& p, int probes, std::uint64_t seed,
                               double step = 1e-5);

}  // namespace sweep
