#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "insider/info_drift.hpp"
#include "insider/normal.hpp"
#include "insider/quadrature.hpp"
#include "insider/simulation.hpp"

namespace insider::cli {

namespace {

struct Check {
    std::string name;
    std::function<bool()> body;
};

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

CoefficientSet unit_vol() { return CoefficientSet::constant(0.0, 0.0, 1.0); }
CoefficientSet merton_case() { return CoefficientSet::constant(0.01, 0.05, 0.2); }

std::vector<Check> checks() {
    const double pi0 = normal::kInvSqrt2Pi;
    return {
        {"time_change constant sigma", [] { return close(time_change(merton_case(), 0.5), 0.02, 1e-15); }},
        {"time_change at t=0", [] { return time_change(merton_case(), 0.0) == 0.0; }},
        {"time_change two pieces",
         [] {
             const CoefficientSet c({0.0, 0.5, 1.0}, {0.0, 0.0}, {0.0, 0.0}, {0.1, 0.3});
             return close(time_change(c, 1.0), 0.05, 1e-15);
         }},
        {"log_thresholds unit case",
         [] {
             const auto th =
                 log_thresholds(unit_vol(), InsiderInfo::interval(std::exp(-1.5), std::exp(0.5)), 1.0);
             return close(th.c1, -1.0, 1e-15) && close(th.c2, 1.0, 1e-15);
         }},
        {"log_thresholds compensated drift",
         [] {
             const auto th = log_thresholds(CoefficientSet::constant(0.0, 0.08, 0.4), InsiderInfo::interval(0.8, 1.3),
                                            1.0);
             return close(th.c1, std::log(0.8), 1e-15) && close(th.c2, std::log(1.3), 1e-15);
         }},
        {"log_thresholds price units",
         [] {
             const auto th = log_thresholds(merton_case(), InsiderInfo::interval(90.0, 110.0), 100.0);
             return close(th.c1, std::log(0.9) - 0.03, 1e-14) && close(th.c2, std::log(1.1) - 0.03, 1e-14);
         }},
        {"classical value", [] { return close(classical_value(merton_case(), 1.0, 1.0), 0.03, 1e-15); }},
        {"classical value without risk premium",
         [] { return close(classical_value(CoefficientSet::constant(0.02, 0.02, 0.3), 1.0, 1.0), 0.02, 1e-15); }},
        {"classical value log of wealth",
         [] { return close(classical_value(CoefficientSet::constant(0.0, 0.0, 0.7), 1.0, std::exp(1.0)), 1.0, 1e-15); }},
        {"conditional probability one sigma",
         [] {
             const auto s = make_drift_state(unit_vol(), {-1.0, 1.0}, 0.0, 0.0);
             return close(conditional_prob(s), 0.682689492137085897, 1e-15);
         }},
        {"drift vanishes at the midpoint",
         [] {
             const auto s = make_drift_state(unit_vol(), {-1.0, 3.0}, 0.4, 1.0);
             return info_drift_interval(s, true) == 0.0;
         }},
        {"drift has zero conditional mean",
         [] {
             const auto s = make_drift_state(unit_vol(), {-1.0, 1.0}, 0.3, 0.4);
             const double p = conditional_prob(s);
             return std::abs(p * info_drift_interval(s, true) + (1 - p) * info_drift_interval(s, false)) <= 1e-13;
         }},
        {"one-sided drift at the threshold",
         [pi0] {
             const auto s = make_drift_state(unit_vol(), {0.5, INFINITY}, 0.75, 0.5);
             return close(info_drift_onesided(s, true, BoundSide::Lower), 2.0 * pi0 / 0.5, 1e-14);
         }},
        {"bridge drift",
         [] {
             const auto s = make_drift_state(unit_vol(), {-1.0, 1.0}, 0.5, 0.0);
             return close(info_drift_exact(1.0, s), 2.0, 1e-15) && info_drift_exact(0.0, s) == 0.0;
         }},
        {"optimal portfolio",
         [] {
             return close(optimal_portfolio(CoefficientSet::constant(0.01, 0.05, 0.2), 0.5, 0.0), 1.0, 1e-14) &&
                    close(optimal_portfolio(CoefficientSet::constant(0.02, 0.02, 0.2), 0.5, 0.3), 1.5, 1e-14);
         }},
        {"I symmetric about the midpoint",
         [] {
             const TimeChange clock(unit_vol());
             const LogThresholds th{-1.0, 1.0};
             return integrand_I(0.0, 0.5, th, clock) == 0.0 &&
                    close(integrand_I(0.7, 0.5, th, clock), integrand_I(-0.7, 0.5, th, clock), 1e-13);
         }},
        {"no information has no value",
         [] {
             const auto r = value_of_information(unit_vol(), InsiderInfo::interval(0.0, INFINITY), 1.0, 1.0, 1e-3);
             return r.vg == r.vf && r.finite;
         }},
        {"terminal knowledge value",
         [] {
             const auto r2 = value_of_information(unit_vol(), InsiderInfo::exact_terminal(), 1.0, 1.0, 1e-2);
             const auto r3 = value_of_information(unit_vol(), InsiderInfo::exact_terminal(), 1.0, 1.0, 1e-3);
             return close(r2.half_int_alpha_sq, 0.5 * std::log(1e2), 1e-2) &&
                    close(r3.half_int_alpha_sq, 0.5 * std::log(1e3), 1e-2) && !r3.finite;
         }},
        {"martingale scan starts at the unconditional probability",
         [] {
             const auto info = InsiderInfo::interval(std::exp(-1.5), std::exp(0.5));
             const std::vector<double> grid{0.0, 0.5};
             const auto r = martingale_scan(unit_vol(), info, 1.0, grid, 16, 1, 1);
             return r.rows.front().mean == r.unconditional && r.rows.front().standard_error == 0.0;
         }},
        {"riskless wealth is exact on every path",
         [] {
             MCConfig config;
             config.paths = 256;
             config.grid = {0.0, 0.25, 0.5, 0.75, 1.0};
             config.strategy = StrategyKind::Riskless;
             config.keep_paths = true;
             const auto r = run_mc(merton_case(), InsiderInfo::interval(0.0, INFINITY), 1.0, config, 2.0);
             for (const auto& d : r.diagnostics)
                 if (!close(d.log_wealth, std::log(2.0) + 0.01, 1e-15)) return false;
             return r.diagnostics.size() == 256;
         }},
    };
}

}  // namespace

int selftest(std::ostream& out) {
    int failures = 0;
    for (const auto& check : checks()) {
        bool ok = false;
        try {
            ok = check.body();
        } catch (const std::exception&) {
            ok = false;
        }
        if (!ok) ++failures;
        out << (ok ? "PASS " : "FAIL ") << check.name << '\n';
    }
    out << (failures == 0 ? "selftest: all checks passed" : "selftest: " + std::to_string(failures) + " failed")
        << '\n';
    return failures;
}

}  // namespace insider::cli
