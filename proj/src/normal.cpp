#include "insider/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kronrod_rule.hpp"

namespace insider::normal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Beyond this point erfc starts to lose range; the continued fraction for the
// Mills ratio is already accurate to full precision there.
constexpr double kContinuedFractionFrom = 30.0;

// Two tails whose logs differ by less than this are close enough that
// subtracting them would cancel; integrate the density directly instead.
constexpr double kNarrowGap = 0.125;

// log of the density mass on [z1, z2] for a short interval. Written in terms
// of the centre c and half-width h so that (z1, z2) and (-z2, -z1) produce
// bit-identical results.
double log_narrow_mass(double z1, double z2) {
    const double c = 0.5 * (z1 + z2);
    const double h = 0.5 * (z2 - z1);
    const double ac = std::abs(c);
    double sum = detail::kKronrodWeights[7];
    for (std::size_t i = 0; i < 7; ++i) {
        const double x = h * detail::kKronrodNodes[i];
        sum += detail::kKronrodWeights[i] * std::exp(-0.5 * x * x) * 2.0 * std::cosh(ac * x);
    }
    return log_pdf(ac) + std::log(h * sum);
}

}  // namespace

double pdf(double z) {
    // z*z split into head and exact rounding error, so the density keeps
    // full relative precision where z^2/2 is large.
    const double head = z * z;
    const double tail = std::fma(z, z, -head);
    return kInvSqrt2Pi * std::exp(-0.5 * head) * (1.0 - 0.5 * tail);
}

double log_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double sf(double z) {
    // x = z / sqrt(2) carries a rounding error dx; erfc is steep in the
    // tail, so remove it to first order with erfc'(x) = -2/sqrt(pi) e^{-x^2}.
    constexpr double kHead = 0.70710678118654757;      // nearest double to 1/sqrt(2)
    constexpr double kTail = -4.8336466567264567e-17;  // 1/sqrt(2) - kHead
    const double x = z * kHead;
    const double dx = std::fma(z, kHead, -x) + z * kTail;
    const double e = std::erfc(x);
    if (dx == 0.0 || !std::isfinite(z)) return 0.5 * e;
    return 0.5 * (e - std::numbers::inv_sqrtpi * 2.0 * std::exp(-x * x) * dx);
}

double cdf(double z) { return sf(-z); }

double mills_ratio(double z) {
    if (z < kContinuedFractionFrom) return sf(z) / pdf(z);
    // R(z) = 1/(z+ 1/(z+ 2/(z+ 3/(z+ ...)))), evaluated from the tail.
    double tail = z;
    for (int k = 80; k >= 1; --k) tail = z + k / tail;
    return 1.0 / tail;
}

double log_sf(double z) {
    if (std::isnan(z)) return z;
    if (z == kInf) return -kInf;
    if (z == -kInf) return 0.0;
    if (z < -1.0) return std::log1p(-sf(-z));
    if (z < kContinuedFractionFrom) return std::log(sf(z));
    return log_pdf(z) + std::log(mills_ratio(z));
}

double log_cdf(double z) { return log_sf(-z); }

double log1mexp(double d) {
    if (d <= 0.0) return -kInf;
    if (d < std::numbers::ln2) return std::log(-std::expm1(-d));
    return std::log1p(-std::exp(-d));
}

double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (a == -kInf) return -kInf;
    return a + std::log1p(std::exp(b - a));
}

double log_interval_prob(double z1, double z2) {
    if (!(z1 < z2)) return -kInf;
    if (z1 == -kInf && z2 == kInf) return 0.0;
    // Take both masses from the side the interval leans to; those tails are
    // the smaller ones.
    double big;
    double small;
    if (z1 + z2 > 0.0) {
        big = log_sf(z1);
        small = log_sf(z2);
    } else {
        big = log_sf(-z2);
        small = log_sf(-z1);
    }
    const double gap = big - small;
    if (gap < kNarrowGap && std::isfinite(z1) && std::isfinite(z2)) return log_narrow_mass(z1, z2);
    return big + log1mexp(gap);
}

double log_outside_prob(double z1, double z2) { return log_add_exp(log_sf(z2), log_sf(-z1)); }

double interval_prob(double z1, double z2) { return std::exp(log_interval_prob(z1, z2)); }

}  // namespace insider::normal
