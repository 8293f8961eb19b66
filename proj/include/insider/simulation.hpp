#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "insider/market_model.hpp"

namespace insider {

enum class StrategyKind { Classical, InsiderInterval, InsiderOneSided, InsiderExact, Riskless };

std::string to_string(StrategyKind kind);
StrategyKind strategy_from_string(const std::string& name);

struct MCConfig {
    std::size_t paths = 100000;
    std::vector<double> grid;  // trading dates on [0, T]; T = grid.back()
    std::uint64_t seed = 1;
    StrategyKind strategy = StrategyKind::Classical;
    unsigned threads = 0;       // 0: hardware concurrency
    bool keep_paths = false;    // record per-path diagnostics
    // Simulation sub-steps per trading step; the position is held across
    // them. A grid refined by midpoints with substeps = 1 sees exactly the
    // same Brownian path as the coarse grid with substeps = 2.
    int substeps = 1;
};

struct PathDiagnostic {
    std::uint64_t index;
    bool realized_l;
    double log_wealth;
};

struct MCReport {
    std::string strategy;
    double horizon = 0.0;
    std::size_t paths = 0;
    std::size_t flagged = 0;
    double mean_log_wealth = 0.0;
    double std_dev = 0.0;
    double standard_error = 0.0;
    std::string target_kind;  // "VF" or "VG"
    double target = 0.0;
    double z_score = 0.0;
    std::vector<PathDiagnostic> diagnostics;
};

// Trades the chosen strategy on exact Gaussian increments of M and returns
// E[log X(T)] with its standard error. The target is V_T^F for the classical
// and riskless strategies (for riskless the exact value log x0 + int r) and
// the quadrature value V_T^G for insider strategies.
MCReport run_mc(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price, const MCConfig& config,
                double initial_wealth);

struct OracleEstimate {
    double t = 0.0;
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t paths = 0;
};

// Monte Carlo E[alpha^2(t)] from jointly simulated (M(t), M(1)).
OracleEstimate drift_mc_oracle(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price, double t,
                               std::size_t paths, std::uint64_t seed, unsigned threads = 0);

struct MartingaleRow {
    double t = 0.0;
    double mean = 0.0;
    double standard_error = 0.0;
};

struct MartingaleReport {
    std::vector<MartingaleRow> rows;
    double unconditional = 0.0;  // P(L = 1) in closed form
    double l_frequency = 0.0;    // share of paths with L = 1
    double l_frequency_se = 0.0;
    std::size_t paths = 0;
};

// Per-t average of P(L = 1 | F_t) along simulated paths. grid must start at 0
// and stay below 1.
MartingaleReport martingale_scan(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price,
                                 std::span<const double> grid, std::size_t paths, std::uint64_t seed,
                                 unsigned threads = 0);

// Running mean and centred sum of squares; merge() combines two partial
// results (Chan et al.), so a fixed merge order gives worker-independent
// totals.
struct MomentAccumulator {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        count += 1.0;
        const double delta = x - mean;
        mean += delta / count;
        m2 += delta * (x - mean);
    }
    void merge(const MomentAccumulator& other);
    double variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
    double standard_error() const;
};

}  // namespace insider
