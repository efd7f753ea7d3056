#pragma once

#include <limits>
#include <optional>
#include <span>

#include "polarlab/model.hpp"

namespace polarlab {

struct PhiOptions {
    /// Upper end of the bisection bracket; NaN selects half the distance from
    /// t0 to the angular support edge on the requested side.
    double s_max = std::numeric_limits<double>::quiet_NaN();
    double s_min = 1e-14;
    int monotonicity_points = 512;
};

struct PhiResult {
    double phi = 0.0;
    /// |ũ(σφ) x / ψ(x) - 1|
    double residual = 0.0;
};

/// Exact root of ũ(σφ) = ψ(x)/x by bisection on (s_min, s_max].
/// Throws BracketError when ψ(x)/x is outside ũ's range on the bracket and
/// MonotonicityError when ũ(σ·) is not increasing on the bracket.
PhiResult solve_phi(const PolarModel& model, Side side, double x, const PhiOptions& options = {});

inline double compute_phi(const PolarModel& model, Side side, double x,
                          const PhiOptions& options = {})
{
    return solve_phi(model, side, x, options).phi;
}

struct Normalizers {
    double x = 0.0;
    double psi_x = 0.0;
    std::optional<double> phi_minus;
    double phi_plus = 0.0;
    double phi_star = 0.0;
    double p_minus = 0.0;
    double p_plus = 1.0;
    double q_minus = 0.0;
    double q_plus = 1.0;
    std::optional<double> residual_minus;
    double residual_plus = 0.0;
};

/// All per-x normalizers. p_σ and q_σ are the finite-x ratios whose limits
/// define the mixture weights; for one-sided models p₊ = q₊ = 1.
Normalizers compute_normalizers(const PolarModel& model, double x, const PhiOptions& options = {});

struct MixtureEstimate {
    double minus = 0.0;
    double plus = 0.0;
    /// Largest change between successive grid points.
    double max_change = 0.0;
};

/// p_σ = φ_σ g̃(σφ_σ) / Σ φ_σ' g̃(σ'φ_σ') evaluated at the largest x of the grid.
/// Throws PreconditionError for one-sided models or a grid with fewer than 4
/// points spanning under 2 decades, NonConvergence if max_change > threshold.
MixtureEstimate mixture_p(const PolarModel& model, std::span<const double> x_grid,
                          double threshold = 0.1);

/// q_σ = φ_σ / φ*, same contract as mixture_p.
MixtureEstimate ratio_q(const PolarModel& model, std::span<const double> x_grid,
                        double threshold = 0.1);

struct MixtureLimits {
    double p_minus = 0.0;
    double p_plus = 1.0;
    double q_minus = 0.0;
    double q_plus = 1.0;
};

/// Limits of p_σ and q_σ from the leading power terms of ũ and g̃. Available
/// for builtin families only; one-sided models give p₊ = q₊ = 1.
std::optional<MixtureLimits> closed_form_mixture(const PolarModel& model);

/// φ_σ(x) g̃(σφ_σ(x)) H̄(x) Γ((1+τ_σ)/κ_σ) / κ_σ, the asymptotic equivalent of
/// P{X > x; sign(T - t0) = σ}.
double tail_asymptotic(const PolarModel& model, Side side, double x,
                       const PhiOptions& options = {});

}  // namespace polarlab
