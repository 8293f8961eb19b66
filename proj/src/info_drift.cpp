#include "insider/info_drift.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "insider/errors.hpp"
#include "insider/normal.hpp"

namespace insider {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_remaining(const DriftState& state) {
    if (!(state.remaining > 0.0))
        throw SingularTimeError("no remaining variance at t = " + std::to_string(state.t));
}

}  // namespace

DriftState make_drift_state(const CoefficientSet& coeffs, const LogThresholds& thresholds, double t, double m) {
    return make_drift_state(coeffs, TimeChange(coeffs), thresholds, t, m);
}

DriftState make_drift_state(const CoefficientSet& coeffs, const TimeChange& clock, const LogThresholds& thresholds,
                            double t, double m) {
    DriftState s;
    s.t = t;
    s.tau = clock.tau(t);
    s.rho = clock.rho();
    s.remaining = clock.remaining(t);
    if (!(s.remaining > 0.0)) throw SingularTimeError("no remaining variance at t = " + std::to_string(t));
    if (!(thresholds.c1 < thresholds.c2)) throw ValidationError("thresholds require c1 < c2");
    s.m = m;
    s.c1 = thresholds.c1;
    s.c2 = thresholds.c2;
    s.sigma_t = coeffs.volatility(t);
    const double sd = std::sqrt(s.remaining);
    s.z1 = (s.c1 - m) / sd;
    s.z2 = (s.c2 - m) / sd;
    s.cond_prob = normal::interval_prob(s.z1, s.z2);
    return s;
}

DensityGap density_gap(double z1, double z2) {
    const bool lower_open = (z1 == -kInf);
    const bool upper_open = (z2 == kInf);
    if (lower_open && upper_open) return {-kInf, 0};
    if (upper_open) return {normal::log_pdf(z1), 1};
    if (lower_open) return {normal::log_pdf(z2), -1};
    const double sum = z1 + z2;
    if (sum == 0.0) return {-kInf, 0};
    // z2^2 - z1^2 = (z2 - z1)(z1 + z2); factor out the larger density.
    const double d = 0.5 * (z2 - z1) * std::abs(sum);
    if (sum > 0.0) return {normal::log_pdf(z1) + normal::log1mexp(d), 1};
    return {normal::log_pdf(z2) + normal::log1mexp(d), -1};
}

double conditional_prob(const DriftState& state) {
    require_remaining(state);
    return normal::interval_prob(state.z1, state.z2);
}

double indicator_drift_log(double z1, double z2, double sd, double sigma_t, bool l) {
    const DensityGap g = density_gap(z1, z2);
    if (g.sign == 0) return 0.0;
    const double log_mass = l ? normal::log_interval_prob(z1, z2) : normal::log_outside_prob(z1, z2);
    const double magnitude = std::exp(g.log_abs - log_mass) * sigma_t / sd;
    return l ? g.sign * magnitude : -g.sign * magnitude;
}

double indicator_drift(double z1, double z2, double sd, double sigma_t, bool l) {
    // Inside this band no tail mass underflows, so the ratio can be formed
    // directly from erfc values; outside it (or for infinite thresholds) the
    // log-space kernel takes over.
    constexpr double kLinearBand = 25.0;
    if (!(std::abs(z1) < kLinearBand && std::abs(z2) < kLinearBand)) return indicator_drift_log(z1, z2, sd, sigma_t, l);
    const double sum = z1 + z2;
    if (sum == 0.0) return 0.0;
    const double near = sum > 0.0 ? z1 : -z2;  // threshold closer to m, reflected to the upper side
    const double far = sum > 0.0 ? z2 : -z1;
    const double d = 0.5 * (z2 - z1) * std::abs(sum);
    const double gap = normal::pdf(near) * -std::expm1(-d);  // |phi(z1) - phi(z2)|
    const double sign = sum > 0.0 ? 1.0 : -1.0;
    const double near_tail = normal::sf(near);
    const double far_tail = normal::sf(far);
    double mass;
    if (l) {
        // Tails closer than this ratio would cancel in the subtraction.
        if (far_tail > 0.8824969025845955 * near_tail) return indicator_drift_log(z1, z2, sd, sigma_t, l);
        mass = near_tail - far_tail;
    } else {
        // Phi(-z2) + Phi(z1) in reflected form: the far tail plus the lower
        // tail below -near.
        mass = far_tail + normal::sf(-near);
    }
    const double magnitude = gap / mass * sigma_t / sd;
    return l ? sign * magnitude : -sign * magnitude;
}

double info_drift_interval(const DriftState& state, bool l) {
    require_remaining(state);
    return indicator_drift(state.z1, state.z2, std::sqrt(state.remaining), state.sigma_t, l);
}

double info_drift_onesided(const DriftState& state, bool l, BoundSide side) {
    require_remaining(state);
    const double z1 = side == BoundSide::Lower ? state.z1 : -kInf;
    const double z2 = side == BoundSide::Lower ? kInf : state.z2;
    return indicator_drift(z1, z2, std::sqrt(state.remaining), state.sigma_t, l);
}

double info_drift_exact(double m_terminal, const DriftState& state) {
    require_remaining(state);
    return state.sigma_t * (m_terminal - state.m) / state.remaining;
}

double optimal_portfolio(const CoefficientSet& coeffs, double t, double alpha) {
    if (!(t >= 0.0 && t < 1.0)) throw DomainError("portfolio time must lie in [0, 1)");
    const double sigma = coeffs.volatility(t);
    return (coeffs.drift(t) - coeffs.rate(t)) / (sigma * sigma) + alpha / sigma;
}

}  // namespace insider
