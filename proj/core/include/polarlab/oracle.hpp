#pragma once

#include <limits>

#include "polarlab/model.hpp"
#include "polarlab/quadrature.hpp"
#include "polarlab/special_functions.hpp"

namespace polarlab {

/// P{X > x} (and T > t0 for RightSided) as ∫ H̄(x/u(t)) g(t) dt over {u > 0},
/// to relative tolerance 1e-9. The integrand is evaluated as
/// exp(log H̄(x/u) - log H̄(x)) and the result rescaled by H̄(x), so the
/// quadrature itself never sees underflowed values.
/// Throws NonConvergence when the error estimate stays above tolerance.
QuadratureResult tail_probability_quadrature(const PolarModel& model, double x,
                                             Condition condition);

/// Same integral divided by H̄(x): P{X > x; condition} / P{R > x}.
QuadratureResult tail_probability_ratio_quadrature(const PolarModel& model, double x,
                                                   Condition condition);

/// ∫∫ density over r in (r_lo, r_hi) and the density's own t-support.
/// An infinite r_hi is mapped to (0, 1) by r = r_lo - log(1 - w).
QuadratureResult density_normalization(const Density2D& density, double r_lo = 0.0,
                                       double r_hi = std::numeric_limits<double>::infinity());

struct SmallTMass {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

/// lhs = P{0 < T - t0 <= θ φ(x)} by quadrature of g,
/// rhs = φ(x) g̃(φ(x)) θ^{1+τ} / (1 + τ).
SmallTMass small_t_mass_check(const PolarModel& model, double theta, double x);

}  // namespace polarlab
