#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polarlab/random.hpp"

namespace polarlab {

/// Side of the center t0. Equality t == t0 is assigned to Plus.
enum class Side { Minus, Plus };

inline double sign_of(Side side) { return side == Side::Plus ? 1.0 : -1.0; }
inline Side side_of(double offset) { return offset < 0.0 ? Side::Minus : Side::Plus; }
const char* to_string(Side side);

enum class Sidedness { OneSidedRight, TwoSided };

/// Conditioning event: {X > x, T > t0} or {X > x}.
enum class Condition { RightSided, Unrestricted };
const char* to_string(Condition condition);
Condition parse_condition(const std::string& name);

/// f(s) ~ coefficient * s^index as s -> 0+. Builtin families expose the
/// leading term of ũ, ṽ and g̃ so limits such as p_σ and C have closed forms.
struct PowerAsymptote {
    double coefficient = 1.0;
    double index = 0.0;
};

// ---------------------------------------------------------------------------
// Radial law
// ---------------------------------------------------------------------------

struct CustomRadial {
    std::function<double(double)> survival;
    std::function<double(double)> aux_psi;
    /// Quantile of R given R > x_floor, evaluated at probability p.
    std::function<double(double p, double x_floor)> tail_quantile;
    double support_lower = 0.0;
};

/// Distribution of the radial variable R, a member of the Gumbel domain with
/// auxiliary function ψ. Support is [support_lower, ∞) with support_lower >= 0.
class RadialLaw {
public:
    enum class Family { Exponential, WeibullTail, HalfNormal, Custom };

    /// H̄(x) = exp(-rate x).
    static RadialLaw exponential(double rate);
    /// H̄(x) = exp(-x^beta).
    static RadialLaw weibull_tail(double beta);
    /// R = |N(0, 1)|.
    static RadialLaw half_normal();
    static RadialLaw custom(CustomRadial callbacks);

    double survival(double x) const;
    /// log H̄(x); accurate deep in the tail where H̄ underflows.
    double log_survival(double x) const;
    double aux_psi(double x) const;
    double tail_quantile(double p, double x_floor) const;
    double sample(Rng& rng) const;

    Family family() const { return family_; }
    double support_lower() const { return support_lower_; }
    double rate() const { return rate_; }
    double beta() const { return beta_; }
    std::string describe() const;

private:
    RadialLaw() = default;

    Family family_ = Family::Custom;
    double rate_ = 0.0;
    double beta_ = 0.0;
    double support_lower_ = 0.0;
    std::function<double(double)> survival_;
    std::function<double(double)> log_survival_;
    std::function<double(double)> aux_psi_;
    std::function<double(double, double)> tail_quantile_;
};

// ---------------------------------------------------------------------------
// Angular law
// ---------------------------------------------------------------------------

struct CustomAngular {
    std::function<double(double)> density;
    std::function<double(Rng&)> sample;
    double t0 = 0.0;
    double lower = -1.0;
    double upper = 1.0;
    double tau_minus = 0.0;
    double tau_plus = 0.0;
};

class AngularLaw {
public:
    enum class Family { Uniform, SymmetricPower, AsymmetricPower, Custom };

    static AngularLaw uniform(double lower, double upper, double t0);
    /// g(t0 + s) ∝ |s|^tau on |s| < half_width.
    static AngularLaw symmetric_power(double t0, double tau, double half_width);
    /// Mass weight_plus on (t0, t0 + w) with density ∝ s^tau_plus, the rest on
    /// (t0 - w, t0) with density ∝ |s|^tau_minus.
    static AngularLaw asymmetric_power(double t0, double tau_minus, double tau_plus,
                                       double weight_plus, double half_width);
    static AngularLaw custom(CustomAngular callbacks);

    double density(double t) const;
    double g_tilde(double s) const { return density(t0_ + s); }
    double sample(Rng& rng) const;

    double t0() const { return t0_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    double tau(Side side) const { return side == Side::Plus ? tau_plus_ : tau_minus_; }
    std::optional<PowerAsymptote> leading(Side side) const;
    Family family() const { return family_; }
    std::string describe() const;

private:
    AngularLaw() = default;

    Family family_ = Family::Custom;
    double t0_ = 0.0;
    double lower_ = 0.0;
    double upper_ = 0.0;
    double tau_minus_ = 0.0;
    double tau_plus_ = 0.0;
    std::optional<PowerAsymptote> leading_minus_;
    std::optional<PowerAsymptote> leading_plus_;
    std::function<double(double)> density_;
    std::function<double(Rng&)> sample_;
};

// ---------------------------------------------------------------------------
// Shapes
// ---------------------------------------------------------------------------

/// The function u with its peak u(t0) = 1. ũ(s) = u(t0) - u(t0 + s) is always
/// derived from u, never stored separately.
class ShapeU {
public:
    enum class Family { Power, Cosine, Custom };

    /// u(t0 + s) = 1 - scale * |s|^kappa_σ on side σ.
    static ShapeU power(double t0, double kappa_minus, double kappa_plus, double scale);
    /// u(t) = cos(t - t0).
    static ShapeU cosine(double t0);
    static ShapeU custom(double t0, std::function<double(double)> u, double kappa_minus,
                         double kappa_plus);

    double u(double t) const { return u_(t); }
    double u_tilde(double s) const { return u_(t0_) - u_(t0_ + s); }
    double t0() const { return t0_; }
    double kappa(Side side) const { return side == Side::Plus ? kappa_plus_ : kappa_minus_; }
    std::optional<PowerAsymptote> leading(Side side) const;
    Family family() const { return family_; }
    double scale() const { return scale_; }
    std::string describe() const;

private:
    ShapeU() = default;

    Family family_ = Family::Custom;
    double t0_ = 0.0;
    double kappa_minus_ = 0.0;
    double kappa_plus_ = 0.0;
    double scale_ = 1.0;
    std::function<double(double)> u_;
};

/// v = θ·u data for the Taylor-coefficient corollary.
struct ThetaData {
    std::function<double(double)> theta;
    int n = 1;
    double theta_n_deriv_at_t0 = 0.0;
};

class ShapeV {
public:
    enum class Family { Sine, SeifertLinear, Power, ThetaPolynomial, Custom };

    /// v(t) = sin(t - t0): ρ = 0, ṽ(s) = -sin s.
    static ShapeV sine(double t0);
    /// v(t) = (t - t0 + rho) u(t).
    static ShapeV seifert_linear(const ShapeU& shape_u, double rho);
    /// v(t0 + s) = rho - coefficient * |s|^delta.
    static ShapeV power(double t0, double rho, double delta, double coefficient);
    /// v = θ u with θ(t) = theta0 + theta_n_deriv / n! * (t - t0)^n.
    static ShapeV theta_polynomial(const ShapeU& shape_u, double theta0, int n,
                                   double theta_n_deriv);
    /// v_sign is the eventual sign (+1 or -1) of ṽ on 0+.
    static ShapeV custom(double t0, std::function<double(double)> v, double delta, int v_sign,
                         std::optional<ThetaData> theta = std::nullopt);

    double v(double t) const { return v_(t); }
    double v_tilde(double s) const { return rho_ - v_(t0_ + s); }
    double rho() const { return rho_; }
    double t0() const { return t0_; }
    double delta() const { return delta_; }
    int v_sign() const { return v_sign_; }
    const std::optional<ThetaData>& theta_data() const { return theta_; }
    /// Leading term of ṽ on 0+, coefficient signed.
    std::optional<PowerAsymptote> leading() const { return leading_; }
    Family family() const { return family_; }
    std::string describe() const;

private:
    ShapeV() = default;

    Family family_ = Family::Custom;
    double t0_ = 0.0;
    double rho_ = 0.0;
    double delta_ = 0.0;
    int v_sign_ = 1;
    std::optional<PowerAsymptote> leading_;
    std::optional<ThetaData> theta_;
    std::function<double(double)> v_;
};

// ---------------------------------------------------------------------------
// Model
// ---------------------------------------------------------------------------

/// (X, Y) = (R u(T), R v(T)) with R and T independent. Immutable once built.
class PolarModel {
public:
    PolarModel(RadialLaw radial, AngularLaw angular, ShapeU shape_u,
               std::optional<ShapeV> shape_v, Sidedness sidedness);

    const RadialLaw& radial() const { return radial_; }
    const AngularLaw& angular() const { return angular_; }
    const ShapeU& shape_u() const { return shape_u_; }
    const std::optional<ShapeV>& shape_v() const { return shape_v_; }
    Sidedness sidedness() const { return sidedness_; }
    bool two_sided() const { return sidedness_ == Sidedness::TwoSided; }
    double t0() const { return shape_u_.t0(); }

    /// Distance from t0 to the edge of the angular support on the given side.
    double reach(Side side) const;

    /// lim ũ(s)/ṽ(s) as s -> 0+ from the leading terms; nullopt when unknown or infinite.
    std::optional<double> ratio_limit() const;

private:
    RadialLaw radial_;
    AngularLaw angular_;
    ShapeU shape_u_;
    std::optional<ShapeV> shape_v_;
    Sidedness sidedness_;
};

// ---------------------------------------------------------------------------
// Builtin specs
// ---------------------------------------------------------------------------

struct RadialSpec {
    std::string family;
    double rate = 1.0;
    double beta = 1.0;
};

struct AngularSpec {
    std::string family;
    double lower = -1.0;
    double upper = 1.0;
    double tau = 0.0;
    double tau_minus = 0.0;
    double tau_plus = 0.0;
    double weight_plus = 0.5;
    double half_width = 1.0;
};

struct ShapeUSpec {
    std::string family;
    double kappa_minus = 2.0;
    double kappa_plus = 2.0;
    double scale = 1.0;
};

struct ShapeVSpec {
    std::string family = "none";
    double rho = 0.0;
    double delta = 1.0;
    double coefficient = 1.0;
    double theta0 = 0.0;
    int n = 1;
    double theta_deriv = 1.0;
};

struct ModelSpec {
    double t0 = 0.0;
    Sidedness sidedness = Sidedness::OneSidedRight;
    RadialSpec radial;
    AngularSpec angular;
    ShapeUSpec shape_u;
    ShapeVSpec shape_v;
};

/// Builds a model from builtin family names. Throws ParameterError naming the
/// offending field for unknown families or out-of-range parameters.
PolarModel build_builtin_model(const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct ValidationGrid {
    int points_per_decade = 64;
    double slope_s_min = 1e-4;
    double slope_s_max = 1e-2;
    std::vector<double> gamma_x = {20.0, 50.0, 100.0};
    std::vector<double> lambdas = {-1.0, 0.0, 1.0, 2.0};
    double gamma_tolerance = 0.05;
    double slope_tolerance = 0.05;
    std::vector<double> epsilons = {0.05, 0.1, 0.5};
    std::size_t sup_grid_points = 20001;
    double normalization_tolerance = 1e-8;
    /// A sup-outside-ε margin must exceed this to count as strictly below 1.
    double margin_floor = 1e-12;
};

struct ValidationEntry {
    std::string assumption;
    std::string check;
    bool passed = false;
    double measured = 0.0;
    double declared = 0.0;
    double margin = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;
    ValidationGrid grid;

    bool all_passed() const;
    const ValidationEntry* find(const std::string& check) const;
};

/// Grid-based check of the model assumptions. A pass means "not falsified at
/// this resolution". Failures are entries, never exceptions; throws only for
/// a grid with fewer than 64 points per decade.
ValidationReport validate_model(const PolarModel& model, const ValidationGrid& grid = {});

/// Least-squares slope of log|f(s)| against log s on a log grid over [s_min, s_max].
/// Returns NaN if any sample is zero or non-finite.
double log_log_slope(const std::function<double(double)>& f, double s_min, double s_max,
                     int points_per_decade);

}  // namespace polarlab
