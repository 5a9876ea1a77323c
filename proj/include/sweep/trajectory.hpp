#pragma once

#include "sweep/problem.hpp"

#include <vector>

namespace sweep {

/// Piecewise-constant control: values[i] acts on [grid[i], grid[i+1]).
class ControlSignal {
public:
    ControlSignal() = default;
    ControlSignal(std::vector<double> grid, std::vector<Vec> values);

    static ControlSignal constant(double T, const Vec& u);
    /// `first` on [0, switch_time), `second` on [switch_time, T]. Degenerate
    /// pieces are dropped.
    static ControlSignal bang_bang(double T, double switch_time, const Vec& first,
                                   const Vec& second);
    /// Equal-length pieces over [0, T].
    static ControlSignal uniform_pieces(double T, std::vector<Vec> values);

    const Vec& at(double t) const;
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<Vec>& values() const { return values_; }
    double horizon() const { return grid_.back(); }
    int dim() const { return static_cast<int>(values_.front().size()); }

    /// Interior breakpoints (grid without 0 and T).
    std::vector<double> switch_times() const;

    /// Throws ProblemError unless the grid spans [0, T] and every value is in U.
    void validate(const ControlSet& U, double T, double tol = 1e-12) const;

private:
    std::vector<double> grid_;
    std::vector<Vec> values_;
};

/// Sampled state arc. u[i] is the control acting on [t[i], t[i+1]); the last
/// entry repeats the final control. xi holds the normal-cone multiplier
/// density: the penalty term for penalty runs, multiplier / h for catch-up.
struct Trajectory {
    std::vector<double> t;
    std::vector<Vec> x;
    std::vector<Vec> u;
    std::vector<double> psi;
    std::vector<double> xi;
    /// Right-hand side at both ends of interval i (with that interval's
    /// control); empty for catch-up arcs.
    std::vector<Vec> slope_begin;
    std::vector<Vec> slope_end;
    double gamma = 0.0;
    double sigma = 0.0;

    std::size_t size() const { return t.size(); }
    int state_dim() const { return static_cast<int>(x.front().size()); }
    int control_dim() const { return static_cast<int>(u.front().size()); }

    /// Index i with t[i] <= time < t[i+1], clamped to the last interval.
    std::size_t interval(double time) const;
    /// Cubic Hermite interpolation when slopes are stored, linear otherwise.
    Vec state_at(double time) const;
    /// Control acting at `time` (right-continuous).
    const Vec& control_at(double time) const;
};

/// max_i |a(grid_i) - b(grid_i)| over a uniform grid of `points` nodes.
double sup_gap(const Trajectory& a, const Trajectory& b, int points = 2001);

}  // namespace sweep
