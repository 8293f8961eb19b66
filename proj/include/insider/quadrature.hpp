#pragma once

#include <span>
#include <string>
#include <vector>

#include "insider/integrator.hpp"
#include "insider/market_model.hpp"

namespace insider {

// I(x, t) = [phi(z1) - phi(z2)]^2 / (sqrt(rho - tau) [Phi(z2) - Phi(z1)] [Phi(-z2) + Phi(z1)])
// with z_i = (c_i - x) / sqrt(rho - tau). Evaluated in log space.
double integrand_I(double x, double t, const LogThresholds& thresholds, const TimeChange& clock);

// Contribution of one of the three intervals (-inf, c1], (c1, c2), [c2, inf).
// Because P(L=1) + P(L=0) = 1, the integrand splits as
// gap^2 / P(L=1) + gap^2 / P(L=0); the two pieces are reported separately.
struct SubIntegral {
    double value = 0.0;
    double event_term = 0.0;       // gap^2 / [Phi(z2) - Phi(z1)]
    double complement_term = 0.0;  // gap^2 / [Phi(-z2) + Phi(z1)]
    double error = 0.0;
    bool converged = true;
};

struct IntegralIReport {
    double t = 0.0;
    double gap = 0.0;  // s_t = (c2 - c1) / sqrt(rho - tau)
    SubIntegral left;
    SubIntegral middle;
    SubIntegral right;

    double total() const { return left.value + middle.value + right.value; }
    double error() const { return left.error + middle.error + right.error; }
    bool converged() const { return left.converged && middle.converged && right.converged; }
};

IntegralIReport integral_I(double t, const LogThresholds& thresholds, const TimeChange& clock,
                           const QuadratureOptions& options = {1e-13, 1e-11, 10000});

struct Estimate {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

// E[alpha^2(t)] for indicator information, averaging the conditional mean
// sigma^2 / sqrt(rho - tau) * I(x, t) against the N(0, tau) law of M(t).
Estimate expected_alpha_sq(double t, const CoefficientSet& coeffs, const LogThresholds& thresholds);
// Exact terminal knowledge: sigma^2(t) / (rho - tau).
Estimate expected_alpha_sq_exact(double t, const CoefficientSet& coeffs);
Estimate expected_alpha_sq(double t, const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price);

struct BoundScanRow {
    double t = 0.0;
    double e_alpha_sq = 0.0;
    double product = 0.0;  // E[alpha^2(t)] * sqrt(t (1 - t))
    double running_sup = 0.0;
    double error = 0.0;
    bool converged = true;
};

struct BoundScanReport {
    std::vector<BoundScanRow> rows;
    double k_hat = 0.0;              // sup of the products
    double last_octave_ratio = 0.0;  // product(last) / product(second to last)
    bool bounded = false;            // ratio below kOctaveGrowthLimit and everything converged
};

// Growth factor across the final refinement step above which a scan is
// judged to blow up.
inline constexpr double kOctaveGrowthLimit = 1.05;

BoundScanReport bound_scan(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price,
                           std::span<const double> t_grid);

struct LemmaScanRow {
    IntegralIReport integral;
    double e_alpha_sq = 0.0;
    double bound_product = 0.0;
    double error = 0.0;  // integral error plus E[alpha^2] error
    bool converged = true;
};

struct LemmaScanReport {
    std::vector<LemmaScanRow> rows;
    double sup_integral = 0.0;
    double last_octave_growth = 0.0;  // relative increase over the final step
    double max_error = 0.0;
    bool converged = true;
    bool finite = false;
};

LemmaScanReport lemma_check(const CoefficientSet& coeffs, const LogThresholds& thresholds,
                            std::span<const double> t_grid);

struct ValueReport {
    double horizon = 1.0;
    double eps = 0.0;
    double vf = 0.0;
    double half_int_alpha_sq = 0.0;  // 0.5 * int_0^{T - eps} E[alpha^2]
    double vg = 0.0;
    double quadrature_error = 0.0;
    double truncation_bound = 0.0;  // 0.5 * K * int_{T-eps}^T dt / sqrt(t (1-t)); inf when unbounded
    double k_hat = 0.0;
    double last_octave_ratio = 0.0;
    bool converged = true;
    bool finite = false;

    std::string verdict() const { return finite ? "finite" : "infinite (diverges as ε→0)"; }
};

// Geometric refinement {2^-k} and {1 - 2^-k}, k = 1..levels, used to judge
// whether E[alpha^2] * sqrt(t (1 - t)) stays bounded at both ends.
std::vector<double> endpoint_refinement_grid(int levels = 20);

ValueReport value_of_information(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price,
                                 double horizon, double eps, double initial_wealth = 1.0);

}  // namespace insider
