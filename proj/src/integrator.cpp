#include "insider/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "kronrod_rule.hpp"

namespace insider {

namespace {

struct Panel {
    double a;
    double b;
    double value;
    double error;
    std::size_t order;  // creation order, breaks error ties deterministically

    bool operator<(const Panel& other) const {
        if (error != other.error) return error < other.error;
        return order > other.order;
    }
};

Panel apply_rule(const Integrand& f, double a, double b, std::size_t order) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = detail::kKronrodWeights[7] * fc;
    double gauss = detail::kGaussWeights[3] * fc;
    for (std::size_t i = 0; i < 7; ++i) {
        const double dx = half * detail::kKronrodNodes[i];
        const double pair = f(centre - dx) + f(centre + dx);
        kronrod += detail::kKronrodWeights[i] * pair;
        if (i % 2 == 1) gauss += detail::kGaussWeights[i / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss), order};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                           const QuadratureOptions& options) {
    QuadratureResult result;
    if (!(a < b)) return result;

    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Panel> queue;
    std::size_t order = 0;
    double total = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Panel p = apply_rule(f, cuts[i], cuts[i + 1], order++);
        total += p.value;
        error += p.error;
        queue.push(p);
    }

    int panels = static_cast<int>(queue.size());
    while (error > std::max(options.abs_tol, options.rel_tol * std::abs(total))) {
        if (panels >= options.max_panels) {
            result.converged = false;
            break;
        }
        const Panel worst = queue.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Panel too narrow to split in floating point.
            result.converged = false;
            break;
        }
        queue.pop();
        const Panel left = apply_rule(f, worst.a, mid, order++);
        const Panel right = apply_rule(f, mid, worst.b, order++);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++panels;
    }

    // Re-sum from the panels so the running updates leave no drift.
    total = 0.0;
    error = 0.0;
    std::vector<Panel> final_panels;
    final_panels.reserve(queue.size());
    while (!queue.empty()) {
        final_panels.push_back(queue.top());
        queue.pop();
    }
    std::sort(final_panels.begin(), final_panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const Panel& p : final_panels) {
        total += p.value;
        error += p.error;
    }

    result.value = total;
    result.error = error;
    result.panels = panels;
    if (!std::isfinite(total)) result.converged = false;
    return result;
}

QuadratureResult integrate_half_line(const Integrand& g, double w_max, std::span<const double> breakpoints,
                                     const QuadratureOptions& options) {
    if (!(w_max > 0.0)) return {};
    const double u_max = std::isinf(w_max) ? 1.0 : w_max / (1.0 + w_max);
    std::vector<double> cuts;
    cuts.reserve(breakpoints.size());
    for (double w : breakpoints)
        if (w > 0.0 && w < w_max) cuts.push_back(w / (1.0 + w));
    const Integrand mapped = [&](double u) {
        const double one_minus = 1.0 - u;
        const double value = g(u / one_minus);
        return value == 0.0 ? 0.0 : value / (one_minus * one_minus);
    };
    return integrate(mapped, 0.0, u_max, cuts, options);
}

}  // namespace insider
