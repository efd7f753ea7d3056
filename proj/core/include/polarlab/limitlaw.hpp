#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polarlab/model.hpp"
#include "polarlab/quadrature.hpp"
#include "polarlab/random.hpp"

namespace polarlab {

/// Limit pair (𝓡, 𝓣) with density κ/Γ((1+τ)/κ) t^τ e^{-r} on 0 < t < r^{1/κ}.
class LimitLawOneSided {
public:
    LimitLawOneSided(double kappa, double tau);

    double kappa() const { return kappa_; }
    double tau() const { return tau_; }
    /// κ / Γ((1+τ)/κ)
    double norm_const() const { return norm_const_; }
    /// Shape of the Gamma law of 𝓣^κ.
    double gamma_shape() const { return (1.0 + tau_) / kappa_; }

private:
    double kappa_;
    double tau_;
    double norm_const_;
};

double density_one_sided(const LimitLawOneSided& law, double r, double t);

struct SignLaw {
    double prob_minus = 0.0;
    double prob_plus = 1.0;
};

struct SideLimit {
    double kappa = 1.0;
    double tau = 0.0;
    double p = 0.5;
    double q = 0.5;
};

/// P(𝓢 = σ) ∝ (p_σ/κ_σ) Γ((1+τ_σ)/κ_σ).
SignLaw sign_probability(const SideLimit& minus, const SideLimit& plus);

enum class Scaling {
    PerSignNorming,  ///< (𝓡, 𝓢 𝓣_𝓢), T - t0 scaled by φ_S(x)
    StarNorming,     ///< (𝓡, q_𝓢 𝓢 𝓣_𝓢), T - t0 scaled by φ*(x)
};

class LimitLawTwoSided {
public:
    LimitLawTwoSided(SideLimit minus, SideLimit plus, Scaling scaling);

    const SideLimit& side(Side s) const { return s == Side::Plus ? plus_ : minus_; }
    Scaling scaling() const { return scaling_; }
    const SignLaw& sign_law() const { return sign_law_; }
    LimitLawOneSided conditional(Side s) const;
    /// Σ_σ (p_σ/κ_σ) Γ((1+τ_σ)/κ_σ)
    double normalizer() const { return normalizer_; }

private:
    SideLimit minus_;
    SideLimit plus_;
    Scaling scaling_;
    SignLaw sign_law_;
    double normalizer_;
};

/// Two-sided limit density. Under StarNorming the per-sign density is mapped
/// through t -> q_σ t; a side with q_σ = 0 and positive sign mass is a point
/// mass at t = 0 and raises PreconditionError.
double density_two_sided(const LimitLawTwoSided& law, double r, double t);

struct LimitPair {
    double r = 0.0;
    double t = 0.0;
};

struct BivariatePair {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Exact draws: G ~ Gamma((1+τ)/κ), 𝓣 = G^{1/κ}, 𝓡 = G + E with E ~ Exp(1).
std::vector<LimitPair> sample_one_sided(const LimitLawOneSided& law, std::size_t n,
                                        SeedStream seed);

/// Draws 𝓢 from the sign law, then (𝓡, 𝓣_𝓢) from that side's one-sided law.
std::vector<LimitPair> sample_two_sided(const LimitLawTwoSided& law, std::size_t n,
                                        SeedStream seed);

enum class CorollaryKind {
    FS,            ///< (𝓡 - 𝓣^κ, -𝓣^δ)
    DeltaGtKappa,  ///< (𝓡 - 𝓣^κ, ρ 𝓡)
    RatioC,        ///< (𝓡 - 𝓣^κ, C ρ 𝓡 - 𝓣^δ)
    Seifert,       ///< (𝓡 - 𝓣^κ, 𝓣)
    ThetaN,        ///< (𝓡 - 𝓣^κ, 𝓣^n θ^(n)(t0) / n!)
};

const char* to_string(CorollaryKind kind);
CorollaryKind parse_corollary_kind(const std::string& name);

struct CorollaryCase {
    CorollaryKind kind = CorollaryKind::FS;
    std::optional<double> rho;
    std::optional<double> delta;
    std::optional<double> c;
    std::optional<int> n;
    std::optional<double> theta_n_deriv;
};

/// Case parameters read off the model's shape_v (and ratio_limit for C).
CorollaryCase corollary_case_from_model(CorollaryKind kind, const PolarModel& model);

/// Maps limit pairs to the corollary's limit pair. Throws ParameterError naming
/// a missing case parameter, PreconditionError for a pair outside the support.
std::vector<BivariatePair> pushforward_corollary(const CorollaryCase& c, double kappa,
                                                 std::span<const LimitPair> pairs);

/// Limit laws implied by a model: κ₊, τ₊ for one-sided models; closed-form
/// p_σ, q_σ limits for two-sided builtins.
LimitLawOneSided one_sided_limit_for(const PolarModel& model);
LimitLawTwoSided two_sided_limit_for(const PolarModel& model, Scaling scaling);

/// Density and t-support of the one- and two-sided limits, for quadrature.
Density2D as_density(const LimitLawOneSided& law);
Density2D as_density(const LimitLawTwoSided& law);

}  // namespace polarlab
