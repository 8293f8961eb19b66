#pragma once

#include <functional>
#include <span>

namespace insider {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // sum of per-panel |K15 - G7|
    int panels = 0;
    bool converged = true;

    QuadratureResult& operator+=(const QuadratureResult& other) {
        value += other.value;
        error += other.error;
        panels += other.panels;
        converged = converged && other.converged;
        return *this;
    }
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_panels = 10000;
};

using Integrand = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod (7/15) on [a, b]. The interval is first cut
// at every breakpoint strictly inside it; the panel with the largest error is
// bisected until the total error meets max(abs_tol, rel_tol * |value|) or the
// panel budget is spent (converged = false, partial result kept).
QuadratureResult integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints = {},
                           const QuadratureOptions& options = {});

// Integral of g over w in [0, w_max] (w_max may be +inf) through the map
// w = u / (1 - u), which sends the half line onto [0, 1). Breakpoints are
// given in w.
QuadratureResult integrate_half_line(const Integrand& g, double w_max, std::span<const double> breakpoints = {},
                                     const QuadratureOptions& options = {});

}  // namespace insider
