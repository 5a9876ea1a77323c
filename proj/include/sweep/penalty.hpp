#pragma once

#include "sweep/problem.hpp"

#include <cmath>
#include <vector>

namespace sweep {

/// Largest admissible penalty exponent gamma*(psi - sigma).
inline constexpr double kExponentGuard = 700.0;

/// Inflation level mu(gamma) = log(mu / (eta^2 gamma)) / gamma, chosen so that
/// gamma * exp(gamma * mu(gamma)) = mu / eta^2.
template <typename Scalar>
Scalar mu_gamma(Scalar gamma, Scalar mu, Scalar eta) {
    if (!(gamma > Scalar(0)) || !(mu > Scalar(0)) || !(eta > Scalar(0))) {
        throw ProblemError("mu_gamma: arguments must be positive");
    }
    using std::log;
    return log(mu / (eta * eta * gamma)) / gamma;
}

/// Smallest gamma = 2^j * max(1, mu/eta^2), j = 0..64, from which on every
/// candidate satisfies mu(gamma) > -margin * sigma.
double choose_gamma(double sigma, double mu, double eta, double margin = 0.5);

struct ScheduleConfig {
    int K = 8;
    double sigma_first = 0.125;
    double sigma_ratio = 0.5;
    /// mu(gamma_k) > -margin * sigma_k.
    double margin = 0.5;
    /// gamma_k >= growth * gamma_{k-1}.
    double gamma_growth = 2.0;

    void check() const;
};

/// sigma_k decreasing to 0, gamma_k increasing, mu_k = mu(gamma_k).
struct PenaltySchedule {
    std::vector<double> sigmas;
    std::vector<double> gammas;
    std::vector<double> mus;
    double mu = 0.0;
    double eta = 0.0;

    int size() const { return static_cast<int>(sigmas.size()); }
    double xi_bound() const { return mu / (eta * eta); }
    /// Throws ProblemError when an invariant fails.
    void check() const;
};

PenaltySchedule make_schedule(double mu, double eta, const ScheduleConfig& cfg = {});

/// gamma * exp(gamma * (psi - sigma)); throws PenaltyOverflow past the guard.
double penalty_density(double gamma, double psi, double sigma);

struct PenaltyRhs {
    Vec velocity;
    double xi = 0.0;
};

/// f(t,x,u) - xi * grad psi(t,x) with xi = gamma exp(gamma (psi - sigma)).
PenaltyRhs penalty_rhs(const ProblemSpec& p, double t, const Vec& x, const Vec& u, double gamma,
                       double sigma);

}  // namespace sweep
