#include "polarlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "polarlab/errors.hpp"
#include "polarlab/special_functions.hpp"

namespace polarlab {

namespace {

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ũ is only resolvable down to about ε·|u(t0)|; below that the derived value
// collapses to 0 and strict monotonicity cannot be asked of it.
constexpr double kResolution = 1e-13;

void check_monotone(const PolarModel& model, Side side, double s_min, double s_max, int points)
{
    const double sigma = sign_of(side);
    const double lo = std::max(s_min, s_max * 1e-8);
    double previous = model.shape_u().u_tilde(sigma * lo);
    for (int i = 1; i < points; ++i) {
        const double s = lo * std::pow(s_max / lo, static_cast<double>(i) / (points - 1));
        const double value = model.shape_u().u_tilde(sigma * s);
        if (!std::isfinite(value)) {
            throw MonotonicityError("u_tilde is not finite at s=" + num(sigma * s));
        }
        const bool resolved = value > kResolution;
        if (value < previous || (resolved && value <= previous)) {
            throw MonotonicityError(std::string("u_tilde(") + to_string(side) +
                                    "s) is not increasing near s=" + num(s));
        }
        previous = value;
    }
}

}  // namespace

PhiResult solve_phi(const PolarModel& model, Side side, double x, const PhiOptions& options)
{
    if (side == Side::Minus && !model.two_sided()) {
        throw PreconditionError("phi_minus requested for a one-sided model");
    }
    const double sigma = sign_of(side);
    const double s_max = std::isnan(options.s_max) ? 0.5 * model.reach(side) : options.s_max;
    const double s_min = options.s_min;
    if (!(s_max > s_min)) {
        throw BracketError("empty phi bracket on side " + std::string(to_string(side)));
    }
    const double psi = model.radial().aux_psi(x);
    const double target = psi / x;
    const ShapeU& shape = model.shape_u();
    const double top = shape.u_tilde(sigma * s_max);
    if (!(x > 0.0) || !(target > 0.0) || !std::isfinite(target) || !(target < top)) {
        throw BracketError("psi(x)/x = " + num(target) + " at x=" + num(x) +
                           " lies outside u_tilde's range (0, " + num(top) + ") on side " +
                           to_string(side));
    }
    check_monotone(model, side, s_min, s_max, options.monotonicity_points);

    double lo = s_min;
    double hi = s_max;
    if (shape.u_tilde(sigma * lo) >= target) {
        throw BracketError("psi(x)/x = " + num(target) + " at x=" + num(x) +
                           " is below u_tilde at the bracket floor");
    }
    for (int i = 0; i < 400; ++i) {
        // Geometric midpoints while the bracket spans decades, then arithmetic.
        const double mid = (hi > 2.0 * lo) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) {
            break;
        }
        if (shape.u_tilde(sigma * mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double r_lo = std::abs(shape.u_tilde(sigma * lo) / target - 1.0);
    const double r_hi = std::abs(shape.u_tilde(sigma * hi) / target - 1.0);
    PhiResult result = r_lo < r_hi ? PhiResult{lo, r_lo} : PhiResult{hi, r_hi};
    if (result.residual > 1e-10) {
        throw NonConvergence("phi root at x=" + num(x) + " has residual " + num(result.residual) +
                             " (u_tilde unresolved at this scale)");
    }
    return result;
}

Normalizers compute_normalizers(const PolarModel& model, double x, const PhiOptions& options)
{
    Normalizers n;
    n.x = x;
    n.psi_x = model.radial().aux_psi(x);
    const PhiResult plus = solve_phi(model, Side::Plus, x, options);
    n.phi_plus = plus.phi;
    n.residual_plus = plus.residual;
    n.phi_star = plus.phi;
    if (!model.two_sided()) {
        return n;
    }
    const PhiResult minus = solve_phi(model, Side::Minus, x, options);
    n.phi_minus = minus.phi;
    n.residual_minus = minus.residual;
    n.phi_star = minus.phi + plus.phi;

    const double t0 = model.t0();
    const double w_minus = minus.phi * model.angular().density(t0 - minus.phi);
    const double w_plus = plus.phi * model.angular().density(t0 + plus.phi);
    const double w_total = w_minus + w_plus;
    if (!(w_total > 0.0)) {
        throw NonConvergence("angular density vanishes at both phi offsets at x=" + num(x));
    }
    n.p_plus = w_plus / w_total;
    n.p_minus = 1.0 - n.p_plus;
    n.q_plus = plus.phi / n.phi_star;
    n.q_minus = 1.0 - n.q_plus;
    return n;
}

namespace {

MixtureEstimate grid_limit(const PolarModel& model, std::span<const double> x_grid,
                           double threshold, bool use_p, const char* what)
{
    if (!model.two_sided()) {
        throw PreconditionError(std::string(what) + " needs a two-sided model");
    }
    if (x_grid.size() < 4 || !(x_grid.back() >= 100.0 * x_grid.front()) ||
        !std::is_sorted(x_grid.begin(), x_grid.end())) {
        throw PreconditionError(std::string(what) +
                                " needs an increasing grid of >= 4 points spanning >= 2 decades");
    }
    MixtureEstimate estimate;
    double previous = 0.0;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        const Normalizers n = compute_normalizers(model, x_grid[i]);
        const double plus = use_p ? n.p_plus : n.q_plus;
        if (i > 0) {
            estimate.max_change = std::max(estimate.max_change, std::abs(plus - previous));
        }
        previous = plus;
        estimate.plus = plus;
        estimate.minus = use_p ? n.p_minus : n.q_minus;
    }
    if (estimate.max_change > threshold) {
        throw NonConvergence(std::string(what) + ": successive change " +
                             num(estimate.max_change) + " exceeds threshold " + num(threshold) +
                             "; the limit may not exist");
    }
    return estimate;
}

}  // namespace

MixtureEstimate mixture_p(const PolarModel& model, std::span<const double> x_grid,
                          double threshold)
{
    return grid_limit(model, x_grid, threshold, true, "mixture_p");
}

MixtureEstimate ratio_q(const PolarModel& model, std::span<const double> x_grid, double threshold)
{
    return grid_limit(model, x_grid, threshold, false, "ratio_q");
}

std::optional<MixtureLimits> closed_form_mixture(const PolarModel& model)
{
    if (!model.two_sided()) {
        return MixtureLimits{};
    }
    const auto u_minus = model.shape_u().leading(Side::Minus);
    const auto u_plus = model.shape_u().leading(Side::Plus);
    const auto g_minus = model.angular().leading(Side::Minus);
    const auto g_plus = model.angular().leading(Side::Plus);
    if (!u_minus || !u_plus) {
        return std::nullopt;
    }
    // A side without angular mass near t0 contributes nothing.
    const double b_minus = g_minus ? g_minus->coefficient : 0.0;
    const double b_plus = g_plus ? g_plus->coefficient : 0.0;
    const double tau_minus = g_minus ? g_minus->index : model.angular().tau(Side::Minus);
    const double tau_plus = g_plus ? g_plus->index : model.angular().tau(Side::Plus);
    if (b_minus == 0.0 && b_plus == 0.0) {
        return std::nullopt;
    }

    // With y = ψ(x)/x → 0: φ_σ ≈ (y/a_σ)^(1/κ_σ) and φ_σ g̃(σφ_σ) ≈ b_σ (y/a_σ)^e_σ,
    // e_σ = (1+τ_σ)/κ_σ. The side with the smaller exponent dominates.
    constexpr double tol = 1e-12;
    MixtureLimits limits;
    const double e_minus = (1.0 + tau_minus) / u_minus->index;
    const double e_plus = (1.0 + tau_plus) / u_plus->index;
    if (b_minus == 0.0) {
        limits.p_plus = 1.0;
    } else if (b_plus == 0.0) {
        limits.p_plus = 0.0;
    } else if (std::abs(e_minus - e_plus) <= tol) {
        const double c_minus = b_minus * std::pow(u_minus->coefficient, -e_minus);
        const double c_plus = b_plus * std::pow(u_plus->coefficient, -e_plus);
        limits.p_plus = c_plus / (c_minus + c_plus);
    } else {
        limits.p_plus = e_plus < e_minus ? 1.0 : 0.0;
    }
    limits.p_minus = 1.0 - limits.p_plus;

    const double k_minus = u_minus->index;
    const double k_plus = u_plus->index;
    if (std::abs(k_minus - k_plus) <= tol) {
        const double c_minus = std::pow(u_minus->coefficient, -1.0 / k_minus);
        const double c_plus = std::pow(u_plus->coefficient, -1.0 / k_plus);
        limits.q_plus = c_plus / (c_minus + c_plus);
    } else {
        // φ_σ ∝ y^(1/κ_σ): the flatter side (larger κ) has the wider window.
        limits.q_plus = k_plus > k_minus ? 1.0 : 0.0;
    }
    limits.q_minus = 1.0 - limits.q_plus;
    return limits;
}

double tail_asymptotic(const PolarModel& model, Side side, double x, const PhiOptions& options)
{
    const double phi = compute_phi(model, side, x, options);
    const double sigma = sign_of(side);
    const double kappa = model.shape_u().kappa(side);
    const double tau = model.angular().tau(side);
    const double g = model.angular().g_tilde(sigma * phi);
    return phi * g * model.radial().survival(x) * gamma_eval((1.0 + tau) / kappa) / kappa;
}

}  // namespace polarlab
