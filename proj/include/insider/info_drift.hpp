#pragma once

#include "insider/market_model.hpp"

namespace insider {

// Sufficient statistics for the information drift at time t < 1, given the
// realized value m of M(t).
struct DriftState {
    double t = 0.0;
    double tau = 0.0;
    double rho = 0.0;
    double m = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double sigma_t = 0.0;
    double remaining = 0.0;  // rho - tau
    double z1 = 0.0;         // (c1 - m) / sqrt(rho - tau)
    double z2 = 0.0;
    double cond_prob = 0.0;  // P(L = 1 | M(t) = m)

    double gap() const { return z2 - z1; }
};

// Throws SingularTimeError when t = 1 (no variance left).
DriftState make_drift_state(const CoefficientSet& coeffs, const LogThresholds& thresholds, double t, double m);
DriftState make_drift_state(const CoefficientSet& coeffs, const TimeChange& clock, const LogThresholds& thresholds,
                            double t, double m);

// phi(z1) - phi(z2) as (log |value|, sign); sign 0 means exactly zero.
struct DensityGap {
    double log_abs;
    int sign;
};
DensityGap density_gap(double z1, double z2);

double conditional_prob(const DriftState& state);

// sigma_t * d/dm log P(L = l | M(t) = m) for L = 1{c1 <= M(1) < c2}, with
// either threshold allowed to be infinite. Kernel shared by the interval and
// one-sided drifts; sd is sqrt(rho - tau).
double indicator_drift(double z1, double z2, double sd, double sigma_t, bool l);
// Same quantity evaluated entirely in log space; the reference the fast
// kernel above falls back to in the tails.
double indicator_drift_log(double z1, double z2, double sd, double sigma_t, bool l);

double info_drift_interval(const DriftState& state, bool l);

enum class BoundSide { Lower, Upper };
// The c2 -> +inf (Lower) or c1 -> -inf (Upper) limit of the interval drift;
// the state's other threshold is ignored.
double info_drift_onesided(const DriftState& state, bool l, BoundSide side);

// Brownian-bridge pull towards the known terminal value M(1) = m_terminal.
double info_drift_exact(double m_terminal, const DriftState& state);

// Log-optimal risky fraction (b - r) / sigma^2 + alpha / sigma.
double optimal_portfolio(const CoefficientSet& coeffs, double t, double alpha);

}  // namespace insider
