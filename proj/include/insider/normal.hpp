#pragma once

// Standard normal density and tail probabilities, evaluated so that
// differences and ratios of tail masses stay accurate far into the tails.
// Every log-space routine accepts +/-infinity for unbounded thresholds.

namespace insider::normal {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;

double pdf(double z);
double log_pdf(double z);

// Upper tail 1 - Phi(z) and lower tail Phi(z).
double sf(double z);
double cdf(double z);
double log_sf(double z);
double log_cdf(double z);

// Mills ratio (1 - Phi(z)) / phi(z), valid for z >= 0.
double mills_ratio(double z);

// log(1 - exp(-d)) for d >= 0.
double log1mexp(double d);
// log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

// log(Phi(z2) - Phi(z1)) for z1 < z2. The mass is taken from whichever tail
// is smaller so no cancellation against 1 occurs.
double log_interval_prob(double z1, double z2);
// log(Phi(-z2) + Phi(z1)), the complement of the interval mass.
double log_outside_prob(double z1, double z2);

double interval_prob(double z1, double z2);

}  // namespace insider::normal
