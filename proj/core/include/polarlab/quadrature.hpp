#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace polarlab {

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
    bool converged = false;
};

struct QuadratureOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-10;
    std::size_t max_panels = 4000;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) integration over [a, b] with optional interior
/// breakpoints. The panel with the largest error estimate is bisected until
/// the total estimate drops below max(abs_tol, rel_tol * |value|). Integrable
/// endpoint singularities are handled by repeated bisection; the rule never
/// evaluates the endpoints themselves.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& options = {},
                           std::span<const double> breakpoints = {});

/// A function of (r, t) together with its t-support at each r.
struct Density2D {
    std::function<double(double, double)> density;
    /// Returns [t_lo(r), t_hi(r)]; an empty interval (lo >= hi) means no mass at r.
    std::function<std::pair<double, double>(double)> t_support;
    /// Interior t-points where the density is singular or kinked (for example t = 0).
    std::vector<double> t_breakpoints;
};

/// ∫_{r_lo}^{r_hi} ∫ density(r, t) dt dr, nested adaptive quadrature.
/// r_hi may be +infinity, in which case the outer variable is mapped through
/// r = r_lo - log(1 - w), w in (0, 1).
QuadratureResult integrate_2d(const Density2D& f, double r_lo, double r_hi, double t_lo,
                              double t_hi, const QuadratureOptions& outer = {},
                              const QuadratureOptions& inner = {1e-16, 1e-11, 4000});

}  // namespace polarlab
