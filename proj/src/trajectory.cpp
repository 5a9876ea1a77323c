#include "sweep/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace sweep {

ControlSignal::ControlSignal(std::vector<double> grid, std::vector<Vec> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (grid_.size() < 2 || values_.size() + 1 != grid_.size()) {
        throw ProblemError("ControlSignal: need one value per grid interval");
    }
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (!(grid_[i] > grid_[i - 1])) {
            throw ProblemError("ControlSignal: grid must be strictly increasing");
        }
    }
}

ControlSignal ControlSignal::constant(double T, const Vec& u) { return {{0.0, T}, {u}}; }

ControlSignal ControlSignal::bang_bang(double T, double switch_time, const Vec& first,
                                       const Vec& second) {
    if (switch_time <= 0.0) return constant(T, second);
    if (switch_time >= T) return constant(T, first);
    return {{0.0, switch_time, T}, {first, second}};
}

ControlSignal ControlSignal::uniform_pieces(double T, std::vector<Vec> values) {
    std::vector<double> grid(values.size() + 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = T * static_cast<double>(i) / static_cast<double>(values.size());
    }
    grid.back() = T;
    return {std::move(grid), std::move(values)};
}

const Vec& ControlSignal::at(double t) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    auto i = static_cast<std::size_t>(std::distance(grid_.begin(), it));
    i = std::clamp<std::size_t>(i, 1, values_.size());
    return values_[i - 1];
}

std::vector<double> ControlSignal::switch_times() const {
    return {grid_.begin() + 1, grid_.end() - 1};
}

void ControlSignal::validate(const ControlSet& U, double T, double tol) const {
    if (grid_.front() != 0.0 || std::abs(grid_.back() - T) > 1e-12 * std::max(1.0, T)) {
        throw ProblemError("ControlSignal: grid must start at 0 and end at T");
    }
    for (const auto& v : values_) {
        if (!U.contains(v, tol)) throw ProblemError("ControlSignal: value outside U");
    }
}

std::size_t Trajectory::interval(double time) const {
    auto it = std::upper_bound(t.begin(), t.end(), time);
    auto i = static_cast<std::size_t>(std::distance(t.begin(), it));
    return std::clamp<std::size_t>(i, 1, t.size() - 1) - 1;
}

Vec Trajectory::state_at(double time) const {
    if (t.size() == 1) return x.front();
    const std::size_t i = interval(time);
    const double h = t[i + 1] - t[i];
    const double s = std::clamp((time - t[i]) / h, 0.0, 1.0);
    if (slope_begin.empty()) return (1.0 - s) * x[i] + s * x[i + 1];
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * x[i] + h10 * h * slope_begin[i] + h01 * x[i + 1] + h11 * h * slope_end[i];
}

const Vec& Trajectory::control_at(double time) const {
    if (time >= t.back()) return u.back();
    return u[interval(time)];
}

double sup_gap(const Trajectory& a, const Trajectory& b, int points) {
    const double T = std::min(a.t.back(), b.t.back());
    double gap = 0.0;
    for (int i = 0; i < points; ++i) {
        const double s = T * i / (points - 1);
        gap = std::max(gap, (a.state_at(s) - b.state_at(s)).norm());
    }
    return gap;
}

}  // namespace sweep
