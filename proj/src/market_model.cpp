#include "insider/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "insider/errors.hpp"
#include "insider/philox.hpp"

namespace insider {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_time(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("time " + std::to_string(t) + " outside [0, 1]");
}

}  // namespace

PiecewiseConstant::PiecewiseConstant(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    running_.resize(breakpoints_.size(), 0.0);
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        running_[i + 1] = running_[i] + values_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
}

std::size_t PiecewiseConstant::piece_index(double t) const {
    // Last breakpoint <= t, clamped so t = 1 belongs to the final piece.
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - breakpoints_.begin() - 1, 0));
    return std::min(idx, values_.size() - 1);
}

double PiecewiseConstant::at(double t) const { return values_[piece_index(t)]; }

double PiecewiseConstant::integral(double t) const {
    const std::size_t i = piece_index(t);
    return running_[i] + values_[i] * (t - breakpoints_[i]);
}

double PiecewiseConstant::integral(double t0, double t1) const {
    if (t1 <= t0) return 0.0;
    std::size_t i = piece_index(t0);
    double total = 0.0;
    double left = t0;
    while (true) {
        const double right = (i + 1 < values_.size()) ? std::min(t1, breakpoints_[i + 1]) : t1;
        total += values_[i] * (right - left);
        if (right >= t1) break;
        left = right;
        ++i;
    }
    return total;
}

CoefficientSet::CoefficientSet(std::vector<double> breakpoints, std::vector<double> r, std::vector<double> b,
                               std::vector<double> sigma) {
    if (breakpoints.size() < 2) throw ValidationError("coefficients need at least two breakpoints");
    const std::size_t n = breakpoints.size() - 1;
    if (r.size() != n || b.size() != n || sigma.size() != n)
        throw ValidationError("coefficient arrays must have one value per piece (" + std::to_string(n) + ")");
    if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
        throw ValidationError("breakpoints must start at 0 and end at 1");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw ValidationError("breakpoints must be strictly increasing");
        if (!std::isfinite(r[i]) || !std::isfinite(b[i]))
            throw ValidationError("r and b must be finite on every piece");
        if (!(sigma[i] > 0.0) || !std::isfinite(sigma[i]))
            throw ValidationError("sigma must be finite and strictly positive on every piece");
    }

    std::vector<double> variance(n), excess(n), sharpe_sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        variance[i] = sigma[i] * sigma[i];
        excess[i] = b[i] - r[i];
        const double theta = excess[i] / sigma[i];
        sharpe_sq[i] = theta * theta;
    }
    sigma_min_ = *std::min_element(sigma.begin(), sigma.end());
    sigma_max_ = *std::max_element(sigma.begin(), sigma.end());

    breakpoints_ = breakpoints;
    rate_ = PiecewiseConstant(breakpoints, std::move(r));
    drift_ = PiecewiseConstant(breakpoints, std::move(b));
    volatility_ = PiecewiseConstant(breakpoints, std::move(sigma));
    variance_ = PiecewiseConstant(breakpoints, std::move(variance));
    excess_ = PiecewiseConstant(breakpoints, std::move(excess));
    sharpe_sq_ = PiecewiseConstant(std::move(breakpoints), std::move(sharpe_sq));
}

CoefficientSet CoefficientSet::constant(double r, double b, double sigma) {
    return CoefficientSet({0.0, 1.0}, {r}, {b}, {sigma});
}

double CoefficientSet::log_price_compensator() const {
    return 0.5 * variance_.integral(1.0) - drift_.integral(1.0);
}

TimeChange::TimeChange(const CoefficientSet& coeffs)
    : variance_(coeffs.variance()), rho_(coeffs.variance().integral(1.0)) {}

double TimeChange::tau(double t) const {
    check_time(t);
    return variance_.integral(t);
}

double TimeChange::remaining(double t) const {
    check_time(t);
    return variance_.integral(t, 1.0);
}

double time_change(const CoefficientSet& coeffs, double t) {
    check_time(t);
    return coeffs.integrated_variance(t);
}

InsiderInfo InsiderInfo::interval(double p1, double p2) {
    if (!(p1 >= 0.0) || !(p1 < p2) || std::isinf(p1) || std::isnan(p2))
        throw ValidationError("interval information requires 0 <= p1 < p2");
    return InsiderInfo(InfoKind::Interval, p1, p2);
}

InsiderInfo InsiderInfo::lower_bound(double p1) {
    if (!(p1 > 0.0) || !std::isfinite(p1)) throw ValidationError("lower bound requires finite p1 > 0");
    return InsiderInfo(InfoKind::LowerBound, p1, kInf);
}

InsiderInfo InsiderInfo::upper_bound(double p2) {
    if (!(p2 > 0.0) || !std::isfinite(p2)) throw ValidationError("upper bound requires finite p2 > 0");
    return InsiderInfo(InfoKind::UpperBound, 0.0, p2);
}

InsiderInfo InsiderInfo::exact_terminal() { return InsiderInfo(InfoKind::ExactTerminal, 0.0, kInf); }

LogThresholds log_thresholds(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price) {
    if (!(initial_price > 0.0) || !std::isfinite(initial_price))
        throw ValidationError("initial price must be finite and positive");
    if (info.kind() == InfoKind::ExactTerminal)
        throw ValidationError("exact terminal information has no thresholds");
    if (!(info.p1() < info.p2())) throw ValidationError("thresholds require p1 < p2");
    const double shift = coeffs.log_price_compensator();
    auto to_log = [&](double p) {
        if (p == 0.0) return -kInf;
        if (std::isinf(p)) return kInf;
        return std::log(p / initial_price) + shift;
    };
    return {to_log(info.p1()), to_log(info.p2())};
}

InsiderInfo interval_from_log_thresholds(const CoefficientSet& coeffs, double initial_price, double c1,
                                         double c2) {
    if (!(initial_price > 0.0)) throw ValidationError("initial price must be positive");
    if (!(c1 < c2)) throw ValidationError("thresholds require c1 < c2");
    const double shift = coeffs.log_price_compensator();
    auto to_price = [&](double c) {
        if (c == -kInf) return 0.0;
        if (c == kInf) return kInf;
        return initial_price * std::exp(c - shift);
    };
    return InsiderInfo::interval(to_price(c1), to_price(c2));
}

void validate_grid(std::span<const double> grid) {
    if (grid.size() < 2) throw ValidationError("time grid needs at least two points");
    if (!(grid.front() >= 0.0) || !(grid.back() <= 1.0)) throw ValidationError("time grid must lie in [0, 1]");
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (!(grid[i] < grid[i + 1])) throw ValidationError("time grid must be strictly increasing");
}

IncrementPlan::IncrementPlan(const CoefficientSet& coeffs, std::span<const double> grid) {
    validate_grid(grid);
    const auto breaks = coeffs.breakpoints();
    offsets_.push_back(0);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        double left = grid[k];
        const double right = grid[k + 1];
        for (double cut : breaks) {
            if (cut > left && cut < right) {
                sqrt_dt_.push_back(std::sqrt(cut - left));
                sigma_.push_back(coeffs.volatility(left));
                left = cut;
            }
        }
        sqrt_dt_.push_back(std::sqrt(right - left));
        sigma_.push_back(coeffs.volatility(left));
        offsets_.push_back(sqrt_dt_.size());
    }
}

void IncrementPlan::draw(NormalStream& stream, std::span<double> dw, std::span<double> dm) const {
    for (std::size_t k = 0; k + 1 < offsets_.size(); ++k) {
        double w = 0.0;
        double m = 0.0;
        for (std::size_t j = offsets_[k]; j < offsets_[k + 1]; ++j) {
            const double dwj = sqrt_dt_[j] * stream.next();
            w += dwj;
            m += sigma_[j] * dwj;
        }
        dw[k] = w;
        dm[k] = m;
    }
}

PathRealization simulate_path(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price,
                              std::span<const double> grid, std::uint64_t seed, std::uint64_t path_index) {
    validate_grid(grid);
    if (grid.front() != 0.0 || grid.back() != 1.0) throw ValidationError("path grid must include 0 and 1");
    if (!(initial_price > 0.0)) throw ValidationError("initial price must be positive");

    const IncrementPlan plan(coeffs, grid);
    PathRealization path;
    path.grid.assign(grid.begin(), grid.end());
    const std::size_t steps = plan.steps();
    path.dw.resize(steps);
    std::vector<double> dm(steps);
    NormalStream stream(seed, path_index);
    plan.draw(stream, path.dw, dm);

    path.m.resize(grid.size());
    path.log_price.resize(grid.size());
    path.m[0] = 0.0;
    const double log_p0 = std::log(initial_price);
    path.log_price[0] = log_p0;
    for (std::size_t k = 0; k < steps; ++k) {
        path.m[k + 1] = path.m[k] + dm[k];
        const double t = grid[k + 1];
        path.log_price[k + 1] =
            log_p0 + coeffs.integrated_drift(t) - 0.5 * coeffs.integrated_variance(t) + path.m[k + 1];
    }
    path.m_terminal = path.m.back();
    if (info.kind() == InfoKind::ExactTerminal) {
        path.realized_l = true;
    } else {
        path.realized_l = log_thresholds(coeffs, info, initial_price).contains(path.m_terminal);
    }
    return path;
}

double classical_value(const CoefficientSet& coeffs, double horizon, double initial_wealth) {
    if (!(horizon > 0.0 && horizon <= 1.0)) throw DomainError("horizon must lie in (0, 1]");
    if (!(initial_wealth > 0.0) || !std::isfinite(initial_wealth))
        throw ValidationError("initial wealth must be finite and positive");
    return std::log(initial_wealth) + coeffs.integrated_rate(horizon) + 0.5 * coeffs.integrated_sharpe_sq(horizon);
}

}  // namespace insider
