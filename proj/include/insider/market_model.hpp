#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace insider {

// Right-continuous step function on [0, 1] with exact running integrals.
class PiecewiseConstant {
public:
    PiecewiseConstant() = default;
    PiecewiseConstant(std::vector<double> breakpoints, std::vector<double> values);

    double at(double t) const;
    // Integral over [0, t].
    double integral(double t) const;
    // Integral over [t0, t1], summed piece by piece (no subtraction of
    // running totals, so short spans near t = 1 keep full relative accuracy).
    double integral(double t0, double t1) const;

    std::span<const double> breakpoints() const { return breakpoints_; }
    std::span<const double> values() const { return values_; }

private:
    std::size_t piece_index(double t) const;

    std::vector<double> breakpoints_;
    std::vector<double> values_;
    std::vector<double> running_;  // integral up to each breakpoint
};

// Deterministic market coefficients: interest rate r, stock drift b and
// volatility sigma, constant between consecutive breakpoints on [0, 1].
class CoefficientSet {
public:
    CoefficientSet(std::vector<double> breakpoints, std::vector<double> r, std::vector<double> b,
                   std::vector<double> sigma);

    static CoefficientSet constant(double r, double b, double sigma);

    std::size_t pieces() const { return breakpoints_.size() - 1; }
    std::span<const double> breakpoints() const { return breakpoints_; }
    std::span<const double> rate_values() const { return rate_.values(); }
    std::span<const double> drift_values() const { return drift_.values(); }
    std::span<const double> volatility_values() const { return volatility_.values(); }

    double rate(double t) const { return rate_.at(t); }
    double drift(double t) const { return drift_.at(t); }
    double volatility(double t) const { return volatility_.at(t); }
    double sigma_min() const { return sigma_min_; }
    double sigma_max() const { return sigma_max_; }

    // Exact integrals over [0, t] or [t0, t1].
    double integrated_rate(double t) const { return rate_.integral(t); }
    double integrated_rate(double t0, double t1) const { return rate_.integral(t0, t1); }
    double integrated_drift(double t) const { return drift_.integral(t); }
    double integrated_excess_drift(double t0, double t1) const { return excess_.integral(t0, t1); }
    double integrated_variance(double t) const { return variance_.integral(t); }
    double integrated_variance(double t0, double t1) const { return variance_.integral(t0, t1); }
    // Integral of ((b - r) / sigma)^2.
    double integrated_sharpe_sq(double t) const { return sharpe_sq_.integral(t); }
    // Integral of (sigma^2 / 2 - b) over [0, 1].
    double log_price_compensator() const;

    const PiecewiseConstant& variance() const { return variance_; }

private:
    std::vector<double> breakpoints_;
    PiecewiseConstant rate_;
    PiecewiseConstant drift_;
    PiecewiseConstant volatility_;
    PiecewiseConstant variance_;
    PiecewiseConstant excess_;
    PiecewiseConstant sharpe_sq_;
    double sigma_min_ = 0.0;
    double sigma_max_ = 0.0;
};

// Quadratic variation clock of M(t) = int_0^t sigma dw.
class TimeChange {
public:
    explicit TimeChange(const CoefficientSet& coeffs);

    double tau(double t) const;
    double rho() const { return rho_; }
    // rho - tau(t), computed directly as int_t^1 sigma^2.
    double remaining(double t) const;

private:
    PiecewiseConstant variance_;
    double rho_;
};

double time_change(const CoefficientSet& coeffs, double t);

// What the insider knows about the terminal price P1(1).
enum class InfoKind { Interval, LowerBound, UpperBound, ExactTerminal };

class InsiderInfo {
public:
    // L = 1{P1(1) in [p1, p2)}. p1 = 0 and p2 = +inf are accepted as
    // sentinels for an unbounded side.
    static InsiderInfo interval(double p1, double p2);
    // L = 1{P1(1) >= p1}.
    static InsiderInfo lower_bound(double p1);
    // L = 1{P1(1) < p2}.
    static InsiderInfo upper_bound(double p2);
    // The insider knows P1(1) itself.
    static InsiderInfo exact_terminal();

    InfoKind kind() const { return kind_; }
    double p1() const { return p1_; }
    double p2() const { return p2_; }

private:
    InsiderInfo(InfoKind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}

    InfoKind kind_;
    double p1_;
    double p2_;
};

// Thresholds on M(1): L = 1{c1 <= M(1) < c2}. Infinite values mean unbounded.
struct LogThresholds {
    double c1;
    double c2;

    bool contains(double m_terminal) const { return c1 <= m_terminal && m_terminal < c2; }
};

LogThresholds log_thresholds(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price);

// Inverse of log_thresholds: price-unit interval whose thresholds are (c1, c2).
InsiderInfo interval_from_log_thresholds(const CoefficientSet& coeffs, double initial_price, double c1,
                                         double c2);

// One simulated trajectory sampled on a time grid.
struct PathRealization {
    std::vector<double> grid;
    std::vector<double> dw;         // Brownian increment per step
    std::vector<double> m;          // int_0^t sigma dw at grid points, m[0] = 0
    std::vector<double> log_price;  // log P1 at grid points
    double m_terminal = 0.0;        // M(1)
    bool realized_l = false;        // value of the indicator on this path
};

void validate_grid(std::span<const double> grid);

class NormalStream;

// Exact sampling of (w, M) increments over the steps of a grid. Steps that
// straddle a coefficient breakpoint are split so each sub-segment has a
// single volatility.
class IncrementPlan {
public:
    IncrementPlan(const CoefficientSet& coeffs, std::span<const double> grid);

    std::size_t steps() const { return offsets_.size() - 1; }
    void draw(NormalStream& stream, std::span<double> dw, std::span<double> dm) const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<double> sqrt_dt_;
    std::vector<double> sigma_;
};

PathRealization simulate_path(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price,
                              std::span<const double> grid, std::uint64_t seed,
                              std::uint64_t path_index = 0);

// Classical log-utility value log(x0) + int_0^T (r + ((b - r) / sigma)^2 / 2).
double classical_value(const CoefficientSet& coeffs, double horizon, double initial_wealth);

}  // namespace insider
