#include "polarlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "polarlab/asymptotics.hpp"
#include "polarlab/errors.hpp"

namespace polarlab {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<double> breakpoints_near(double t0, double lo, double hi)
{
    std::vector<double> cuts{t0};
    for (double w = 0.1; w >= 1e-8; w *= 0.1) {
        for (double c : {t0 - w, t0 + w}) {
            if (c > lo && c < hi) {
                cuts.push_back(c);
            }
        }
    }
    return cuts;
}

}  // namespace

QuadratureResult tail_probability_ratio_quadrature(const PolarModel& model, double x,
                                                   Condition condition)
{
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw ParameterError("x must be finite and >= 0");
    }
    const RadialLaw& radial = model.radial();
    const AngularLaw& angular = model.angular();
    const ShapeU& shape = model.shape_u();
    const double log_base = radial.log_survival(x);
    if (!std::isfinite(log_base)) {
        throw NonConvergence("log survival at x=" + fmt(x) + " is not finite");
    }

    auto integrand = [&](double t) {
        const double u = shape.u(t);
        if (!(u > 0.0)) {
            return 0.0;
        }
        const double g = angular.density(t);
        if (g == 0.0) {
            return 0.0;
        }
        const double z = x / u;
        const double log_ratio = radial.log_survival(z) - log_base;
        return std::exp(log_ratio) * g;
    };

    const double lo = condition == Condition::RightSided ? model.t0() : angular.lower();
    const double hi = angular.upper();
    const std::vector<double> cuts = breakpoints_near(model.t0(), lo, hi);
    QuadratureResult r = integrate(integrand, lo, hi, {1e-300, 1e-9, 20000}, cuts);
    if (!r.converged) {
        throw NonConvergence("tail probability quadrature did not converge at x=" + fmt(x) +
                             " (error estimate " + fmt(r.abs_error_estimate) + ")");
    }
    return r;
}

QuadratureResult tail_probability_quadrature(const PolarModel& model, double x,
                                             Condition condition)
{
    QuadratureResult r = tail_probability_ratio_quadrature(model, x, condition);
    const double base = model.radial().survival(x);
    r.value *= base;
    r.abs_error_estimate *= base;
    return r;
}

QuadratureResult density_normalization(const Density2D& density, double r_lo, double r_hi)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    QuadratureResult r =
        integrate_2d(density, r_lo, r_hi, -inf, inf, {1e-13, 1e-10, 4000}, {1e-16, 1e-11, 4000});
    if (!r.converged) {
        throw NonConvergence("density normalization did not converge (error estimate " +
                             fmt(r.abs_error_estimate) + ")");
    }
    return r;
}

SmallTMass small_t_mass_check(const PolarModel& model, double theta, double x)
{
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw ParameterError("theta must be finite and > 0");
    }
    const double tau = model.angular().tau(Side::Plus);
    if (!(tau > -1.0)) {
        throw PreconditionError("tau must be > -1");
    }
    const double phi = compute_phi(model, Side::Plus, x);
    const double t0 = model.t0();
    const double hi = std::min(t0 + theta * phi, model.angular().upper());
    const AngularLaw& angular = model.angular();
    QuadratureResult q =
        integrate([&](double t) { return angular.density(t); }, t0, hi, {1e-300, 1e-12, 4000});
    if (!q.converged) {
        throw NonConvergence("small-t mass quadrature did not converge at x=" + fmt(x));
    }
    SmallTMass out;
    out.lhs = q.value;
    out.rhs = phi * angular.g_tilde(phi) * std::pow(theta, 1.0 + tau) / (1.0 + tau);
    out.ratio = out.lhs / out.rhs;
    return out;
}

}  // namespace polarlab
