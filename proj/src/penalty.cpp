#include "sweep/penalty.hpp"

#include <algorithm>
#include <sstream>

namespace sweep {

double choose_gamma(double sigma, double mu, double eta, double margin) {
    if (!(sigma > 0.0)) throw ProblemError("choose_gamma: sigma must be positive");
    const double start = std::max(1.0, mu / (eta * eta));
    int last_failure = -1;
    for (int j = 0; j <= 64; ++j) {
        if (!(mu_gamma(std::ldexp(start, j), mu, eta) > -margin * sigma)) last_failure = j;
    }
    if (last_failure == 64) {
        throw ProblemError("choose_gamma: no gamma up to 2^64 * gamma_start qualifies");
    }
    return std::ldexp(start, last_failure + 1);
}

void ScheduleConfig::check() const {
    if (K < 1) throw ConfigError("schedule: K must be at least 1");
    if (!(sigma_first > 0.0)) throw ConfigError("schedule: sigma_first must be positive");
    if (!(sigma_ratio > 0.0 && sigma_ratio < 1.0)) {
        throw ConfigError("schedule: sigma_ratio must lie in (0, 1)");
    }
    if (!(margin > 0.0 && margin < 1.0)) throw ConfigError("schedule: margin must lie in (0, 1)");
    if (!(gamma_growth > 1.0)) throw ConfigError("schedule: gamma_growth must exceed 1");
}

PenaltySchedule make_schedule(double mu, double eta, const ScheduleConfig& cfg) {
    cfg.check();
    PenaltySchedule s;
    s.mu = mu;
    s.eta = eta;
    double sigma = cfg.sigma_first;
    double prev = 0.0;
    for (int k = 0; k < cfg.K; ++k) {
        const double gamma = std::max(choose_gamma(sigma, mu, eta, cfg.margin),
                                      cfg.gamma_growth * prev);
        s.sigmas.push_back(sigma);
        s.gammas.push_back(gamma);
        s.mus.push_back(mu_gamma(gamma, mu, eta));
        prev = gamma;
        sigma *= cfg.sigma_ratio;
    }
    s.check();
    return s;
}

void PenaltySchedule::check() const {
    if (sigmas.size() != gammas.size() || sigmas.size() != mus.size() || sigmas.empty()) {
        throw ProblemError("PenaltySchedule: inconsistent lengths");
    }
    for (std::size_t k = 0; k < sigmas.size(); ++k) {
        if (!(sigmas[k] > 0.0) || !(gammas[k] > 0.0)) {
            throw ProblemError("PenaltySchedule: sigma and gamma must be positive");
        }
        if (k > 0 && !(sigmas[k] < sigmas[k - 1] && gammas[k] > gammas[k - 1])) {
            throw ProblemError("PenaltySchedule: sigmas must decrease and gammas increase");
        }
        if (!(mus[k] > -sigmas[k])) {
            std::ostringstream os;
            os << "PenaltySchedule: C(t) not inside the inflated set at k=" << k + 1;
            throw ProblemError(os.str());
        }
    }
}

double penalty_density(double gamma, double psi, double sigma) {
    const double exponent = gamma * (psi - sigma);
    if (exponent > kExponentGuard) {
        std::ostringstream os;
        os << "penalty_rhs: exponent " << exponent << " exceeds guard";
        throw PenaltyOverflow(os.str(), exponent);
    }
    return gamma * std::exp(exponent);
}

PenaltyRhs penalty_rhs(const ProblemSpec& p, double t, const Vec& x, const Vec& u, double gamma,
                       double sigma) {
    const auto e = p.constraint(t, x);
    const double xi = penalty_density(gamma, e.value, sigma);
    return {p.f(t, x, u).velocity - xi * e.grad, xi};
}

}  // namespace sweep
