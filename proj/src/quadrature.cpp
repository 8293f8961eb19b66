#include "insider/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "insider/errors.hpp"
#include "insider/info_drift.hpp"
#include "insider/normal.hpp"

namespace insider {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_before_terminal(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("time " + std::to_string(t) + " outside [0, 1]");
    if (t >= 1.0) throw SingularTimeError("I(x, t) is not defined at t = 1");
}

// gap^2 / P(L=1) and gap^2 / P(L=0) at standardized thresholds (z1, z2).
struct KernelTerms {
    double event;
    double complement;
};

KernelTerms kernel_terms(double z1, double z2) {
    const DensityGap g = density_gap(z1, z2);
    if (g.sign == 0) return {0.0, 0.0};
    const double twice = 2.0 * g.log_abs;
    return {std::exp(twice - normal::log_interval_prob(z1, z2)),
            std::exp(twice - normal::log_outside_prob(z1, z2))};
}

// A ray x = anchor + direction * sd * w, w in [0, w_max], starting at one of
// the thresholds. Along it the standardized thresholds are affine in w.
struct Ray {
    bool from_c1;
    int direction;
    double w_max;

    double z1(double w, double gap) const { return from_c1 ? -direction * w : -gap - direction * w; }
    double z2(double w, double gap) const { return from_c1 ? gap - direction * w : -direction * w; }
};

struct RaySet {
    std::vector<Ray> left, middle, right;
};

RaySet rays_for(const LogThresholds& th, double gap) {
    RaySet set;
    const bool lo = std::isfinite(th.c1);
    const bool hi = std::isfinite(th.c2);
    const double half = (lo && hi) ? 0.5 * gap : kInf;
    if (lo) {
        set.left.push_back({true, -1, kInf});
        set.middle.push_back({true, +1, half});
    }
    if (hi) {
        set.middle.push_back({false, -1, half});
        set.right.push_back({false, +1, kInf});
    }
    return set;
}

SubIntegral integrate_rays(const std::vector<Ray>& rays, double gap, const QuadratureOptions& options) {
    SubIntegral out;
    for (const Ray& ray : rays) {
        const auto event = integrate_half_line(
            [&](double w) { return kernel_terms(ray.z1(w, gap), ray.z2(w, gap)).event; }, ray.w_max, {}, options);
        const auto complement = integrate_half_line(
            [&](double w) { return kernel_terms(ray.z1(w, gap), ray.z2(w, gap)).complement; }, ray.w_max, {},
            options);
        out.event_term += event.value;
        out.complement_term += complement.value;
        out.error += event.error + complement.error;
        out.converged = out.converged && event.converged && complement.converged;
    }
    out.value = out.event_term + out.complement_term;
    return out;
}

double anchor(const LogThresholds& th, const Ray& ray) { return ray.from_c1 ? th.c1 : th.c2; }

}  // namespace

double integrand_I(double x, double t, const LogThresholds& thresholds, const TimeChange& clock) {
    check_before_terminal(t);
    const double v = clock.remaining(t);
    if (!(v > 0.0)) throw SingularTimeError("no remaining variance");
    const double sd = std::sqrt(v);
    const double z1 = (thresholds.c1 - x) / sd;
    const double z2 = (thresholds.c2 - x) / sd;
    const DensityGap g = density_gap(z1, z2);
    if (g.sign == 0) return 0.0;
    return std::exp(2.0 * g.log_abs - normal::log_interval_prob(z1, z2) - normal::log_outside_prob(z1, z2) -
                    0.5 * std::log(v));
}

IntegralIReport integral_I(double t, const LogThresholds& thresholds, const TimeChange& clock,
                           const QuadratureOptions& options) {
    check_before_terminal(t);
    if (!(thresholds.c1 < thresholds.c2)) throw ValidationError("thresholds require c1 < c2");
    const double v = clock.remaining(t);
    if (!(v > 0.0)) throw SingularTimeError("no remaining variance");
    IntegralIReport report;
    report.t = t;
    report.gap = (thresholds.c2 - thresholds.c1) / std::sqrt(v);
    // In the standardized variable w = |x - c_i| / sqrt(rho - tau) the factor
    // 1/sqrt(rho - tau) of I cancels against dx, so each piece depends on t
    // only through the gap s_t.
    const RaySet rays = rays_for(thresholds, report.gap);
    report.left = integrate_rays(rays.left, report.gap, options);
    report.middle = integrate_rays(rays.middle, report.gap, options);
    report.right = integrate_rays(rays.right, report.gap, options);
    return report;
}

Estimate expected_alpha_sq(double t, const CoefficientSet& coeffs, const LogThresholds& thresholds) {
    check_before_terminal(t);
    if (!(thresholds.c1 < thresholds.c2)) throw ValidationError("thresholds require c1 < c2");
    const TimeChange clock(coeffs);
    const double v = clock.remaining(t);
    const double tau = clock.tau(t);
    const double sigma = coeffs.volatility(t);
    const double sd = std::sqrt(v);
    const double gap = (thresholds.c2 - thresholds.c1) / sd;

    if (tau == 0.0) {
        // M(0) = 0 surely: the conditional mean at x = 0 is the expectation.
        const KernelTerms k = kernel_terms(thresholds.c1 / sd, thresholds.c2 / sd);
        return {sigma * sigma / v * (k.event + k.complement), 0.0, true};
    }

    const double st = std::sqrt(tau);
    const QuadratureOptions options{1e-14, 1e-11, 10000};
    const RaySet rays = rays_for(thresholds, gap);
    Estimate out;
    for (const auto* group : {&rays.left, &rays.middle, &rays.right}) {
        for (const Ray& ray : *group) {
            const double c = anchor(thresholds, ray);
            // Centre the Gaussian weight's features in this ray's coordinate.
            const double w_centre = -ray.direction * c / sd;
            const double w_scale = st / sd;
            std::vector<double> cuts;
            for (double j : {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) cuts.push_back(w_centre + j * w_scale);
            const auto r = integrate_half_line(
                [&](double w) {
                    const double x = c + ray.direction * sd * w;
                    const double density = normal::pdf(x / st) / st;
                    if (density == 0.0) return 0.0;
                    const KernelTerms k = kernel_terms(ray.z1(w, gap), ray.z2(w, gap));
                    return density * (k.event + k.complement);
                },
                ray.w_max, cuts, options);
            out.value += r.value;
            out.error += r.error;
            out.converged = out.converged && r.converged;
        }
    }
    // E[alpha^2 | M(t) = x] = sigma^2 / sd * I(x, t) and dx = sd dw, I = J / sd.
    const double scale = sigma * sigma / sd;
    out.value *= scale;
    out.error *= scale;
    return out;
}

Estimate expected_alpha_sq_exact(double t, const CoefficientSet& coeffs) {
    check_before_terminal(t);
    const double sigma = coeffs.volatility(t);
    const double v = coeffs.integrated_variance(t, 1.0);
    return {sigma * sigma / v, 0.0, true};
}

Estimate expected_alpha_sq(double t, const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price) {
    if (info.kind() == InfoKind::ExactTerminal) return expected_alpha_sq_exact(t, coeffs);
    return expected_alpha_sq(t, coeffs, log_thresholds(coeffs, info, initial_price));
}

BoundScanReport bound_scan(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price,
                           std::span<const double> t_grid) {
    BoundScanReport report;
    bool all_converged = true;
    for (double t : t_grid) {
        if (!(t >= 0.0 && t < 1.0)) throw ValidationError("bound scan times must lie in [0, 1)");
        const Estimate e = expected_alpha_sq(t, coeffs, info, initial_price);
        BoundScanRow row;
        row.t = t;
        row.e_alpha_sq = e.value;
        row.product = e.value * std::sqrt(t * (1.0 - t));
        report.k_hat = std::max(report.k_hat, row.product);
        row.running_sup = report.k_hat;
        row.error = e.error * std::sqrt(t * (1.0 - t));
        row.converged = e.converged && std::isfinite(e.value);
        all_converged = all_converged && row.converged;
        report.rows.push_back(row);
    }
    if (report.rows.size() >= 2) {
        const double last = report.rows.back().product;
        const double prev = report.rows[report.rows.size() - 2].product;
        report.last_octave_ratio = prev > 0.0 ? last / prev : (last > 0.0 ? kInf : 1.0);
    }
    report.bounded = all_converged && std::isfinite(report.k_hat) && report.last_octave_ratio < kOctaveGrowthLimit;
    return report;
}

LemmaScanReport lemma_check(const CoefficientSet& coeffs, const LogThresholds& thresholds,
                            std::span<const double> t_grid) {
    const TimeChange clock(coeffs);
    LemmaScanReport report;
    for (double t : t_grid) {
        LemmaScanRow row;
        row.integral = integral_I(t, thresholds, clock);
        const Estimate e = expected_alpha_sq(t, coeffs, thresholds);
        row.e_alpha_sq = e.value;
        row.bound_product = e.value * std::sqrt(t * (1.0 - t));
        row.error = row.integral.error();
        row.converged = row.integral.converged() && e.converged && std::isfinite(row.integral.total());
        report.sup_integral = std::max(report.sup_integral, row.integral.total());
        report.max_error = std::max(report.max_error, row.error);
        report.converged = report.converged && row.converged;
        report.rows.push_back(row);
    }
    if (report.rows.size() >= 2) {
        const double last = report.rows.back().integral.total();
        const double prev = report.rows[report.rows.size() - 2].integral.total();
        report.last_octave_growth = (last - prev) / prev;
    }
    report.finite = report.converged && std::isfinite(report.sup_integral) && report.last_octave_growth < 0.05;
    return report;
}

std::vector<double> endpoint_refinement_grid(int levels) {
    std::vector<double> grid;
    for (int k = levels; k >= 1; --k) grid.push_back(std::ldexp(1.0, -k));
    for (int k = 2; k <= levels; ++k) grid.push_back(1.0 - std::ldexp(1.0, -k));
    return grid;
}

ValueReport value_of_information(const CoefficientSet& coeffs, const InsiderInfo& info, double initial_price,
                                 double horizon, double eps, double initial_wealth) {
    if (!(horizon > 0.0 && horizon <= 1.0)) throw DomainError("horizon must lie in (0, 1]");
    if (!(eps >= 0.0) || !(eps < horizon)) throw ValidationError("cutoff eps must satisfy 0 <= eps < horizon");
    const double upper = horizon - eps;
    if (upper >= 1.0) throw SingularTimeError("horizon 1 needs a positive cutoff eps");

    ValueReport report;
    report.horizon = horizon;
    report.eps = eps;
    report.vf = classical_value(coeffs, horizon, initial_wealth);

    // Substituting t = sin^2(theta) turns dt into 2 sqrt(t (1 - t)) d theta,
    // which absorbs a K / sqrt(t (1 - t)) envelope into a bounded integrand.
    bool inner_ok = true;
    double inner_error = 0.0;
    const Integrand integrand = [&](double theta) {
        const double s = std::sin(theta);
        const double t = s * s;
        const Estimate e = expected_alpha_sq(t, coeffs, info, initial_price);
        inner_ok = inner_ok && e.converged;
        const double jacobian = std::sin(2.0 * theta);
        inner_error = std::max(inner_error, e.error * jacobian);
        return e.value * jacobian;
    };
    const double theta_upper = std::asin(std::sqrt(upper));
    const QuadratureResult outer = integrate(integrand, 0.0, theta_upper, {}, {1e-12, 1e-9, 2000});

    report.half_int_alpha_sq = 0.5 * outer.value;
    report.quadrature_error = 0.5 * (outer.error + inner_error * theta_upper);
    report.vg = report.vf + report.half_int_alpha_sq;
    report.converged = outer.converged && inner_ok;

    const auto grid = endpoint_refinement_grid();
    const BoundScanReport scan = bound_scan(coeffs, info, initial_price, grid);
    report.k_hat = scan.k_hat;
    report.last_octave_ratio = scan.last_octave_ratio;
    report.finite = scan.bounded;
    if (eps > 0.0) {
        const double arcsine_mass = 2.0 * (std::asin(std::sqrt(horizon)) - theta_upper);
        report.truncation_bound = report.finite ? 0.5 * report.k_hat * arcsine_mass : kInf;
    }
    return report;
}

}  // namespace insider
