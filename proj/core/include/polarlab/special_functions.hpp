#pragma once

namespace polarlab {

/// Γ(a) for a > 0, relative error below 1e-13 up to a ≈ 171.
/// Throws ParameterError for a <= 0 or non-finite a.
double gamma_eval(double a);

/// log Γ(a) for a > 0.
double log_gamma(double a);

/// Regularized lower incomplete gamma P(a, x) = γ(a, x) / Γ(a).
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// without cancellation in the upper tail.
double gamma_q(double a, double x);

/// Inverse of P(a, ·): returns x with P(a, x) = p, p in (0, 1).
double gamma_p_inverse(double a, double p);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_survival(double statistic, double dof);

/// Asymptotic Kolmogorov distribution survival function
/// Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² λ²).
double kolmogorov_survival(double lambda);

}  // namespace polarlab
