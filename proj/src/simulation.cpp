#include "insider/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "insider/errors.hpp"
#include "insider/info_drift.hpp"
#include "insider/normal.hpp"
#include "insider/philox.hpp"
#include "insider/quadrature.hpp"

namespace insider {

namespace {

constexpr std::size_t kChunkPaths = 4096;
constexpr double kMaxFlaggedShare = 1e-4;

unsigned worker_count(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs work(begin, end) over fixed chunks of path indices and returns the
// per-chunk results in chunk order, whatever the number of workers.
template <class Partial, class Work>
std::vector<Partial> run_chunks(std::size_t paths, unsigned threads, const Work& work) {
    const std::size_t chunks = (paths + kChunkPaths - 1) / kChunkPaths;
    std::vector<Partial> partials(chunks);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
            const std::size_t begin = c * kChunkPaths;
            partials[c] = work(begin, std::min(paths, begin + kChunkPaths));
        }
    };
    const unsigned n = std::min<unsigned>(worker_count(threads), static_cast<unsigned>(std::max<std::size_t>(chunks, 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n);
        for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
    }
    return partials;
}

bool is_indicator(InfoKind kind) { return kind != InfoKind::ExactTerminal; }

void check_strategy_matches(StrategyKind strategy, const InsiderInfo& info) {
    const InfoKind kind = info.kind();
    bool ok = true;
    switch (strategy) {
        case StrategyKind::InsiderInterval: ok = kind == InfoKind::Interval; break;
        case StrategyKind::InsiderOneSided: ok = kind == InfoKind::LowerBound || kind == InfoKind::UpperBound; break;
        case StrategyKind::InsiderExact: ok = kind == InfoKind::ExactTerminal; break;
        default: break;
    }
    if (!ok) throw ValidationError("strategy " + to_string(strategy) + " does not match the information kind");
}

// Trading grid plus coefficient breakpoints inside it, so the Merton term is
// constant over every step.
std::vector<double> merge_breakpoints(const CoefficientSet& coeffs, std::span<const double> grid) {
    std::vector<double> merged(grid.begin(), grid.end());
    for (double b : coeffs.breakpoints())
        if (b > grid.front() && b < grid.back()) merged.push_back(b);
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return merged;
}

struct StepData {
    double rate;    // int r over the step
    double excess;  // int (b - r)
    double var;     // int sigma^2
    double sigma;   // sigma at the left end
    double merton;  // (b - r) / sigma^2 at the left end
    double sd;      // sqrt(rho - tau) at the left end
    double remaining;
};

struct McPartial {
    MomentAccumulator moments;
    std::size_t flagged = 0;
    std::vector<PathDiagnostic> diagnostics;
};

}  // namespace

void MomentAccumulator::merge(const MomentAccumulator& other) {
    if (other.count == 0.0) return;
    if (count == 0.0) {
        *this = other;
        return;
    }
    const double total = count + other.count;
    const double delta = other.mean - mean;
    mean += delta * other.count / total;
    m2 += other.m2 + delta * delta * count * other.count / total;
    count = total;
}

double MomentAccumulator::standard_error() const { return count > 0.0 ? std::sqrt(variance() / count) : 0.0; }

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Classical: return "classical";
        case StrategyKind::InsiderInterval: return "insider-interval";
        case StrategyKind::InsiderOneSided: return "insider-onesided";
        case StrategyKind::InsiderExact: return "insider-exact";
        case StrategyKind::Riskless: return "riskless";
    }
    return "unknown";
}

StrategyKind strategy_from_string(const std::string& name) {
    for (auto kind : {StrategyKind::Classical, StrategyKind::InsiderInterval, StrategyKind::InsiderOneSided,
                      StrategyKind::InsiderExact, StrategyKind::Riskless})
        if (to_string(kind) == name) return kind;
    throw ValidationError("unknown strategy '" + name + "'");
}

MCReport run_mc(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price, const MCConfig& config,
                double initial_wealth) {
    if (config.paths < 1) throw ValidationError("Monte Carlo needs at least one path");
    validate_grid(config.grid);
    if (config.grid.front() != 0.0) throw ValidationError("trading grid must start at 0");
    if (!(initial_wealth > 0.0)) throw ValidationError("initial wealth must be positive");
    check_strategy_matches(config.strategy, info);
    const double horizon = config.grid.back();
    const bool insider = config.strategy == StrategyKind::InsiderInterval ||
                         config.strategy == StrategyKind::InsiderOneSided ||
                         config.strategy == StrategyKind::InsiderExact;
    if (insider && !(horizon < 1.0)) throw ValidationError("insider strategies need a horizon strictly below 1");

    if (config.substeps < 1) throw ValidationError("substeps must be at least 1");
    const std::vector<double> trading = merge_breakpoints(coeffs, config.grid);
    const std::size_t sub = static_cast<std::size_t>(config.substeps);
    std::vector<double> sim_grid{trading.front()};
    for (std::size_t k = 0; k + 1 < trading.size(); ++k) {
        for (std::size_t j = 1; j < sub; ++j)
            sim_grid.push_back(trading[k] + (trading[k + 1] - trading[k]) * static_cast<double>(j) / sub);
        sim_grid.push_back(trading[k + 1]);
    }
    if (sim_grid.back() < 1.0) sim_grid.push_back(1.0);
    const IncrementPlan plan(coeffs, sim_grid);
    const std::size_t trade_steps = trading.size() - 1;

    const TimeChange clock(coeffs);
    std::vector<StepData> steps(trade_steps);
    for (std::size_t k = 0; k < trade_steps; ++k) {
        const double t0 = trading[k];
        const double t1 = trading[k + 1];
        StepData& s = steps[k];
        s.rate = coeffs.integrated_rate(t0, t1);
        s.excess = coeffs.integrated_excess_drift(t0, t1);
        s.var = coeffs.integrated_variance(t0, t1);
        s.sigma = coeffs.volatility(t0);
        s.merton = (coeffs.drift(t0) - coeffs.rate(t0)) / (s.sigma * s.sigma);
        s.remaining = clock.remaining(t0);
        s.sd = std::sqrt(s.remaining);
    }
    const LogThresholds thresholds =
        is_indicator(info.kind()) ? log_thresholds(coeffs, info, initial_price) : LogThresholds{0.0, 0.0};
    const double log_x0 = std::log(initial_wealth);
    const StrategyKind strategy = config.strategy;

    auto work = [&](std::size_t begin, std::size_t end) {
        McPartial partial;
        std::vector<double> dw(plan.steps()), dm(plan.steps());
        for (std::size_t i = begin; i < end; ++i) {
            NormalStream stream(config.seed, i);
            plan.draw(stream, dw, dm);
            double m_terminal = 0.0;
            for (double x : dm) m_terminal += x;
            const bool l = is_indicator(info.kind()) ? thresholds.contains(m_terminal) : true;

            double log_x = log_x0;
            double m = 0.0;
            for (std::size_t k = 0; k < trade_steps; ++k) {
                const StepData& s = steps[k];
                double pi = 0.0;
                switch (strategy) {
                    case StrategyKind::Riskless: break;
                    case StrategyKind::Classical: pi = s.merton; break;
                    case StrategyKind::InsiderInterval:
                    case StrategyKind::InsiderOneSided: {
                        const double alpha = indicator_drift((thresholds.c1 - m) / s.sd, (thresholds.c2 - m) / s.sd,
                                                             s.sd, s.sigma, l);
                        pi = s.merton + alpha / s.sigma;
                        break;
                    }
                    case StrategyKind::InsiderExact: {
                        const double alpha = s.sigma * (m_terminal - m) / s.remaining;
                        pi = s.merton + alpha / s.sigma;
                        break;
                    }
                }
                double dm_step = 0.0;
                for (std::size_t j = 0; j < sub; ++j) dm_step += dm[k * sub + j];
                log_x += s.rate + pi * s.excess - 0.5 * pi * pi * s.var + pi * dm_step;
                m += dm_step;
            }
            if (!std::isfinite(log_x)) {
                ++partial.flagged;
                continue;
            }
            partial.moments.add(log_x);
            if (config.keep_paths) partial.diagnostics.push_back({i, l, log_x});
        }
        return partial;
    };
    const auto partials = run_chunks<McPartial>(config.paths, config.threads, work);

    MCReport report;
    report.strategy = to_string(strategy);
    report.horizon = horizon;
    report.paths = config.paths;
    MomentAccumulator total;
    for (const auto& p : partials) {
        total.merge(p.moments);
        report.flagged += p.flagged;
        if (config.keep_paths)
            report.diagnostics.insert(report.diagnostics.end(), p.diagnostics.begin(), p.diagnostics.end());
    }
    if (static_cast<double>(report.flagged) > kMaxFlaggedShare * static_cast<double>(config.paths))
        throw NumericalError(std::to_string(report.flagged) + " of " + std::to_string(config.paths) +
                             " paths produced non-finite wealth");
    report.mean_log_wealth = total.mean;
    report.std_dev = std::sqrt(total.variance());
    report.standard_error = total.standard_error();

    if (strategy == StrategyKind::Riskless) {
        report.target_kind = "riskless";
        report.target = log_x0 + coeffs.integrated_rate(horizon);
    } else if (!insider) {
        report.target_kind = "VF";
        report.target = classical_value(coeffs, horizon, initial_wealth);
    } else {
        report.target_kind = "VG";
        report.target = value_of_information(coeffs, info, initial_price, horizon, 0.0, initial_wealth).vg;
    }
    report.z_score = report.standard_error > 0.0 ? (report.mean_log_wealth - report.target) / report.standard_error
                                                 : (report.mean_log_wealth == report.target ? 0.0 : std::numeric_limits<double>::infinity());
    return report;
}

OracleEstimate drift_mc_oracle(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price, double t,
                               std::size_t paths, std::uint64_t seed, unsigned threads) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("drift oracle time must lie in (0, 1)");
    if (paths < 1) throw ValidationError("oracle needs at least one path");
    const TimeChange clock(coeffs);
    const double st = std::sqrt(clock.tau(t));
    const double remaining = clock.remaining(t);
    const double sd = std::sqrt(remaining);
    const double sigma = coeffs.volatility(t);
    const bool exact = info.kind() == InfoKind::ExactTerminal;
    const LogThresholds th = exact ? LogThresholds{0.0, 0.0} : log_thresholds(coeffs, info, initial_price);

    auto work = [&](std::size_t begin, std::size_t end) {
        MomentAccumulator acc;
        for (std::size_t i = begin; i < end; ++i) {
            NormalStream stream(seed, i);
            const double m = st * stream.next();
            const double m_terminal = m + sd * stream.next();
            double alpha;
            if (exact) {
                alpha = sigma * (m_terminal - m) / remaining;
            } else {
                alpha = indicator_drift((th.c1 - m) / sd, (th.c2 - m) / sd, sd, sigma, th.contains(m_terminal));
            }
            acc.add(alpha * alpha);
        }
        return acc;
    };
    MomentAccumulator total;
    for (const auto& p : run_chunks<MomentAccumulator>(paths, threads, work)) total.merge(p);
    return {t, total.mean, total.standard_error(), paths};
}

MartingaleReport martingale_scan(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price,
                                 std::span<const double> grid, std::size_t paths, std::uint64_t seed,
                                 unsigned threads) {
    if (info.kind() == InfoKind::ExactTerminal)
        throw ValidationError("martingale scan needs indicator information");
    validate_grid(grid);
    if (grid.front() != 0.0 || !(grid.back() < 1.0))
        throw ValidationError("martingale grid must start at 0 and stay below 1");
    if (paths < 1) throw ValidationError("scan needs at least one path");

    std::vector<double> sim_grid(grid.begin(), grid.end());
    sim_grid.push_back(1.0);
    const IncrementPlan plan(coeffs, sim_grid);
    const TimeChange clock(coeffs);
    std::vector<double> sd(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) sd[k] = std::sqrt(clock.remaining(grid[k]));
    const LogThresholds th = log_thresholds(coeffs, info, initial_price);

    struct Partial {
        std::vector<MomentAccumulator> per_t;
        MomentAccumulator l;
    };
    auto work = [&](std::size_t begin, std::size_t end) {
        Partial partial;
        partial.per_t.resize(grid.size());
        std::vector<double> dw(plan.steps()), dm(plan.steps());
        for (std::size_t i = begin; i < end; ++i) {
            NormalStream stream(seed, i);
            plan.draw(stream, dw, dm);
            double m = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                partial.per_t[k].add(normal::interval_prob((th.c1 - m) / sd[k], (th.c2 - m) / sd[k]));
                m += dm[k];
            }
            partial.l.add(th.contains(m) ? 1.0 : 0.0);
        }
        return partial;
    };
    const auto partials = run_chunks<Partial>(paths, threads, work);

    MartingaleReport report;
    report.paths = paths;
    std::vector<MomentAccumulator> per_t(grid.size());
    MomentAccumulator l;
    for (const auto& p : partials) {
        for (std::size_t k = 0; k < grid.size(); ++k) per_t[k].merge(p.per_t[k]);
        l.merge(p.l);
    }
    for (std::size_t k = 0; k < grid.size(); ++k)
        report.rows.push_back({grid[k], per_t[k].mean, per_t[k].standard_error()});
    const double rho_sd = std::sqrt(clock.rho());
    report.unconditional = normal::interval_prob(th.c1 / rho_sd, th.c2 / rho_sd);
    report.l_frequency = l.mean;
    report.l_frequency_se = l.standard_error();
    return report;
}

}  // namespace insider
