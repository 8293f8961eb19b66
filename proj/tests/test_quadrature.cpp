#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "insider/errors.hpp"
#include "insider/integrator.hpp"
#include "insider/normal.hpp"
#include "insider/quadrature.hpp"
#include "insider/simulation.hpp"

using namespace insider;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CoefficientSet unit() { return CoefficientSet::constant(0.0, 0.0, 1.0); }
CoefficientSet two_piece_vol() { return CoefficientSet({0.0, 0.5, 1.0}, {0.0, 0.0}, {0.0, 0.0}, {0.6, 1.3}); }
const LogThresholds kUnitBand{-1.0, 1.0};

// Reference values from 60-digit evaluations of the same integrals and
// integrands (standardized form, c = -1, 1, sigma = 1).
constexpr double kLeftAtZero = 0.836780695534665830;
constexpr double kMiddleAtZero = 0.436061313621508798;
constexpr double kLeftAtHalf = 0.896005950748387859;
constexpr double kMiddleAtHalf = 0.965958281418703999;
constexpr double kLeftLimit = 0.903197285568625354;  // gap -> infinity

std::vector<double> geometric_grid() {
    std::vector<double> grid{0.0};
    for (int k = 1; k <= 20; ++k) grid.push_back(1.0 - std::ldexp(1.0, -k));
    return grid;
}

}  // namespace

TEST(Integrator, Polynomials) {
    for (int k = 0; k <= 29; ++k) {
        const auto r = integrate([k](double x) { return std::pow(x, k); }, 0.0, 1.0);
        EXPECT_NEAR(r.value, 1.0 / (k + 1), 1e-15) << k;
        EXPECT_TRUE(r.converged);
    }
}

TEST(Integrator, HalfLineAndBreakpoints) {
    const auto gauss = integrate_half_line([](double w) { return std::exp(-0.5 * w * w); }, kInf);
    EXPECT_NEAR(gauss.value, std::sqrt(std::numbers::pi / 2.0), 1e-12);
    const auto kink = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, std::vector<double>{0.3});
    EXPECT_NEAR(kink.value, 0.5 * (0.09 + 0.49), 1e-15);
    EXPECT_LE(kink.panels, 2);
}

TEST(Integrator, BudgetExhaustionIsReported) {
    QuadratureOptions tight{1e-300, 0.0, 20};
    const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {}, tight);
    EXPECT_FALSE(r.converged);
    EXPECT_LE(r.panels, 20);
    EXPECT_GT(r.error, 0.0);
}

TEST(IntegrandI, MidpointAndReflection) {
    const TimeChange clock(unit());
    for (double t : {0.0, 0.5, 0.99, 1.0 - 0x1p-20}) {
        EXPECT_EQ(integrand_I(0.0, t, kUnitBand, clock), 0.0);
        for (double y = 0.01; y < 12.0; y *= 1.37) {
            const double a = integrand_I(y, t, kUnitBand, clock);
            const double b = integrand_I(-y, t, kUnitBand, clock);
            if (a == 0.0) {
                EXPECT_EQ(b, 0.0);
                continue;
            }
            EXPECT_NEAR(a, b, 1e-13 * a) << t << ' ' << y;
        }
    }
    const TimeChange stepped(two_piece_vol());
    const LogThresholds band{-0.2, 0.9};
    for (double y : {0.05, 0.4, 1.7, 6.0})
        EXPECT_NEAR(integrand_I(0.35 + y, 0.7, band, stepped), integrand_I(0.35 - y, 0.7, band, stepped),
                    1e-13 * integrand_I(0.35 + y, 0.7, band, stepped));
}

TEST(IntegrandI, FarTailAgainstExtendedPrecision) {
    // x = c1 - k sqrt(rho - tau) at t = 0.5.
    const TimeChange clock(unit());
    const std::pair<double, double> refs[] = {{5.0, 1.090482928371884047e-05},
                                              {10.0, 1.098854888649435282e-21},
                                              {20.0, 1.565444630295428332e-86},
                                              {30.0, 6.259082532407682585e-195},
                                              {35.0, 1.951986221318554083e-265}};
    for (const auto& [k, ref] : refs) {
        const double x = -1.0 - k * std::sqrt(0.5);
        const double got = integrand_I(x, 0.5, kUnitBand, clock);
        EXPECT_GT(got, 0.0);
        EXPECT_NEAR(got, ref, 1e-8 * ref) << k;
    }
}

TEST(IntegralI, MatchesReferenceValues) {
    const TimeChange clock(unit());
    const auto at0 = integral_I(0.0, kUnitBand, clock);
    EXPECT_NEAR(at0.gap, 2.0, 1e-15);
    EXPECT_NEAR(at0.left.value, kLeftAtZero, 1e-11);
    EXPECT_NEAR(at0.middle.value, kMiddleAtZero, 1e-11);
    const auto half = integral_I(0.5, kUnitBand, clock);
    EXPECT_NEAR(half.left.value, kLeftAtHalf, 1e-11);
    EXPECT_NEAR(half.middle.value, kMiddleAtHalf, 1e-11);
    const auto late = integral_I(1.0 - 0x1p-20, kUnitBand, clock);
    EXPECT_NEAR(late.left.value, kLeftLimit, 1e-11);
    EXPECT_NEAR(late.middle.value, 2.0 * kLeftLimit, 1e-10);
    for (const auto* r : {&at0, &half, &late}) {
        EXPECT_TRUE(r->converged());
        EXPECT_LE(r->error(), 1e-9);
        EXPECT_EQ(r->left.value, r->right.value);
        EXPECT_NEAR(r->left.value, r->left.event_term + r->left.complement_term, 1e-14);
    }
}

TEST(IntegralI, RiemannSumCrossCheck) {
    const TimeChange clock(unit());
    const double t = 0.5;
    const double a = -40.0, b = 40.0;
    const int n = 10000000;
    const double h = (b - a) / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += integrand_I(a + (i + 0.5) * h, t, kUnitBand, clock);
    const double riemann = sum * h;
    const auto r = integral_I(t, kUnitBand, clock);
    EXPECT_NEAR(r.total(), riemann, 1e-6 * riemann);
}

TEST(IntegralI, TotalFiniteAndPositive) {
    const TimeChange clock(unit());
    for (double t : {0.0, 0.5, 0.99}) {
        const auto r = integral_I(t, kUnitBand, clock);
        EXPECT_TRUE(std::isfinite(r.total()));
        EXPECT_GT(r.total(), 0.0);
    }
}

TEST(IntegralI, OuterComplementTermsStayBelowTheProofConstant) {
    const TimeChange clock(unit());
    for (double t : endpoint_refinement_grid(20)) {
        const auto r = integral_I(t, kUnitBand, clock);
        EXPECT_LE(r.left.complement_term, 0.7072) << t;
        EXPECT_LE(r.right.complement_term, 0.7072) << t;
    }
}

TEST(IntegralI, DependsOnTimeOnlyThroughTheGap) {
    // Same gap from different (t, sigma, thresholds): identical pieces.
    const TimeChange unit_clock(unit());
    const TimeChange stepped(two_piece_vol());
    const double t = 0.7;
    const double sd = std::sqrt(stepped.remaining(t));
    const auto a = integral_I(0.5, kUnitBand, unit_clock);
    const LogThresholds scaled{0.3, 0.3 + a.gap * sd};
    const auto b = integral_I(t, scaled, stepped);
    EXPECT_NEAR(b.gap, a.gap, 1e-14);
    EXPECT_NEAR(b.total(), a.total(), 1e-12);
}

TEST(ExpectedAlphaSq, ReferenceValues) {
    const std::pair<double, double> refs[] = {{0.1, 0.104064785417558932},
                                              {0.3, 0.331759147532364311},
                                              {0.5, 0.659204075802216990},
                                              {0.7, 1.24681728145126013},
                                              {0.9, 2.74400929615995271}};
    for (const auto& [t, ref] : refs) {
        const auto e = expected_alpha_sq(t, unit(), kUnitBand);
        EXPECT_NEAR(e.value, ref, 1e-10 * ref) << t;
        EXPECT_TRUE(e.converged);
    }
    // At t = 0, M(0) = 0 and the expectation is a single evaluation.
    const TimeChange clock(unit());
    const LogThresholds off_centre{-0.5, 1.5};
    const double at0 = expected_alpha_sq(0.0, unit(), off_centre).value;
    EXPECT_GT(at0, 0.0);
    EXPECT_NEAR(at0, integrand_I(0.0, 0.0, off_centre, clock), 1e-16);
}

TEST(ExpectedAlphaSq, VanishesWithoutInformation) {
    EXPECT_EQ(expected_alpha_sq(0.5, unit(), LogThresholds{-kInf, kInf}).value, 0.0);
    EXPECT_LT(expected_alpha_sq(0.5, unit(), LogThresholds{-40.0, 40.0}).value, 1e-200);
}

TEST(ExpectedAlphaSq, MonotoneInFarThresholds) {
    double prev = kInf;
    for (double c : {2.0, 4.0, 8.0, 16.0}) {
        const double e = expected_alpha_sq(0.5, unit(), LogThresholds{-c, c}).value;
        EXPECT_LT(e, prev) << c;
        EXPECT_GT(e, 0.0);
        prev = e;
    }
    const auto info = interval_from_log_thresholds(unit(), 1.0, -2.0, 2.0);
    const auto mc = drift_mc_oracle(unit(), info, 1.0, 0.5, 200000, 5);
    const double q = expected_alpha_sq(0.5, unit(), LogThresholds{-2.0, 2.0}).value;
    EXPECT_NEAR(mc.mean, q, 3.0 * mc.standard_error);
}

TEST(ExpectedAlphaSq, ExactTerminal) {
    for (double t : {0.0, 0.5, 0.99}) EXPECT_NEAR(expected_alpha_sq_exact(t, unit()).value, 1.0 / (1.0 - t), 1e-12);
    EXPECT_NEAR(expected_alpha_sq_exact(0.7, two_piece_vol()).value, 1.69 / (0.3 * 1.69), 1e-12);
}

TEST(BoundScan, IntervalIsBounded) {
    const auto info = interval_from_log_thresholds(unit(), 1.0, -1.0, 1.0);
    const auto scan = bound_scan(unit(), info, 1.0, endpoint_refinement_grid(20));
    EXPECT_TRUE(scan.bounded);
    EXPECT_LT(scan.last_octave_ratio, kOctaveGrowthLimit);
    EXPECT_NEAR(scan.k_hat, 0.874188789, 1e-6);
    for (const auto& row : scan.rows) EXPECT_TRUE(row.converged);
}

TEST(BoundScan, ExactTerminalGrowsBySqrtTwoPerOctave) {
    const auto grid = geometric_grid();
    const auto scan = bound_scan(unit(), InsiderInfo::exact_terminal(), 1.0, grid);
    EXPECT_FALSE(scan.bounded);
    ASSERT_EQ(scan.rows.size(), 21u);
    for (std::size_t k = 1; k < scan.rows.size(); ++k) {
        const auto& row = scan.rows[k];
        // One-sided weight sqrt(1 - t) = 2^(-k/2): exactly 2^(k/2).
        EXPECT_NEAR(row.e_alpha_sq * std::sqrt(1.0 - row.t), std::pow(2.0, 0.5 * k), 1e-9 * std::pow(2.0, 0.5 * k));
        // Two-sided weight: the extra sqrt(t) settles within 5% from k = 4 on.
        if (k >= 4) EXPECT_NEAR(row.product / scan.rows[k - 1].product, std::sqrt(2.0), 0.05 * std::sqrt(2.0)) << k;
    }
}

TEST(Value, ExactTerminalIsHalfLogOfInverseEps) {
    for (double eps : {1e-2, 1e-3}) {
        const auto r = value_of_information(unit(), InsiderInfo::exact_terminal(), 1.0, 1.0, eps);
        EXPECT_NEAR(r.half_int_alpha_sq, 0.5 * std::log(1.0 / eps), 0.01 * 0.5 * std::log(1.0 / eps));
        EXPECT_FALSE(r.finite);
        EXPECT_EQ(r.verdict(), "infinite (diverges as ε→0)");
    }
}

TEST(Value, IntervalIsFiniteAndCauchy) {
    const auto info = interval_from_log_thresholds(unit(), 1.0, -1.0, 1.0);
    const auto r2 = value_of_information(unit(), info, 1.0, 1.0, 1e-2);
    const auto r3 = value_of_information(unit(), info, 1.0, 1.0, 1e-3);
    const auto r6 = value_of_information(unit(), info, 1.0, 1.0, 1e-6);
    // Reference: 0.5 * int_0^0.99 E[alpha^2] from a 18-digit nested evaluation.
    EXPECT_NEAR(r2.half_int_alpha_sq, 0.537406620749329, 1e-9);
    for (const auto* r : {&r2, &r3, &r6}) {
        EXPECT_TRUE(r->finite);
        EXPECT_TRUE(r->converged);
        EXPECT_EQ(r->verdict(), "finite");
        EXPECT_GE(r->vg, r->vf);
        EXPECT_EQ(r->vf, 0.0);
    }
    EXPECT_LT(r6.vg - r3.vg, 10.0 * std::sqrt(1e-3 * r3.k_hat * r3.k_hat));
    EXPECT_LE(r3.vg - r2.vg, r2.truncation_bound);
    EXPECT_LE(r6.vg - r3.vg, r3.truncation_bound);
}

TEST(Value, NoInformationHasNoValue) {
    const auto c = CoefficientSet::constant(0.01, 0.05, 0.2);
    const auto r = value_of_information(c, InsiderInfo::interval(0.0, kInf), 1.0, 1.0, 1e-3);
    EXPECT_NEAR(r.vf, 0.03, 1e-16);
    EXPECT_EQ(r.vg, r.vf);
    EXPECT_TRUE(r.finite);
    const auto shifted = value_of_information(c, InsiderInfo::interval(90.0, 110.0), 100.0, 1.0, 1e-3, std::exp(1.0));
    EXPECT_NEAR(shifted.vf, 1.03, 1e-15);
    EXPECT_GT(shifted.vg, shifted.vf);
}

TEST(Value, ShorterHorizonNeedsNoCutoff) {
    const auto info = interval_from_log_thresholds(unit(), 1.0, -1.0, 1.0);
    const auto direct = value_of_information(unit(), info, 1.0, 0.99, 0.0);
    const auto cut = value_of_information(unit(), info, 1.0, 1.0, 1e-2);
    EXPECT_NEAR(direct.vg, cut.vg, 1e-9);
    EXPECT_EQ(direct.truncation_bound, 0.0);
    EXPECT_THROW(value_of_information(unit(), info, 1.0, 1.0, 0.0), SingularTimeError);
}

TEST(Lemma, ScanIsFiniteAndFlat) {
    const auto scan = lemma_check(unit(), kUnitBand, geometric_grid());
    EXPECT_TRUE(scan.finite);
    EXPECT_TRUE(scan.converged);
    EXPECT_LE(scan.max_error, 1e-6);
    EXPECT_LT(scan.last_octave_growth, 0.05);
    EXPECT_NEAR(scan.sup_integral, 4.0 * kLeftLimit, 1e-9);
    // The middle piece rises toward twice the outer limit (flat to rounding
    // once the gap is large).
    for (std::size_t i = 1; i < scan.rows.size(); ++i)
        EXPECT_GE(scan.rows[i].integral.middle.value, scan.rows[i - 1].integral.middle.value - 1e-12);
    EXPECT_NEAR(scan.rows.front().integral.gap, 2.0, 0.0);
}
