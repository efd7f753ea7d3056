#include "polarlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>

#include "polarlab/errors.hpp"
#include "polarlab/quadrature.hpp"

namespace polarlab {

const char* to_string(Condition condition)
{
    return condition == Condition::RightSided ? "right_sided" : "unrestricted";
}

Condition parse_condition(const std::string& name)
{
    if (name == "right_sided") {
        return Condition::RightSided;
    }
    if (name == "unrestricted") {
        return Condition::Unrestricted;
    }
    throw ParameterError("unknown condition '" + name + "' (expected right_sided or unrestricted)");
}

const char* to_string(Side side)
{
    return side == Side::Plus ? "+" : "-";
}

namespace {

void require(bool ok, const std::string& message)
{
    if (!ok) {
        throw ParameterError(message);
    }
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

// Mills ratio m(x) = H̄(x) / h(x) of the half-normal law, i.e. (1 - Φ(x)) / φ(x).
double mills_ratio(double x)
{
    if (x < 5.0) {
        const double density = std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * x * x);
        return std::erfc(x / std::numbers::sqrt2) / density;
    }
    // m(x) = 1 / (x + 1 / (x + 2 / (x + 3 / (x + ...))))
    double tail = x;
    for (int k = 80; k >= 1; --k) {
        tail = x + k / tail;
    }
    return 1.0 / tail;
}

double half_normal_log_survival(double x)
{
    if (x <= 0.0) {
        return 0.0;
    }
    if (x < 5.0) {
        return std::log(std::erfc(x / std::numbers::sqrt2));
    }
    return std::log(std::sqrt(2.0 / std::numbers::pi)) - 0.5 * x * x + std::log(mills_ratio(x));
}

double factorial(int n)
{
    double f = 1.0;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

std::string fmt_double(double v)
{
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// RadialLaw
// ---------------------------------------------------------------------------

RadialLaw RadialLaw::exponential(double rate)
{
    require(finite_positive(rate), "radial.rate must be finite and > 0");
    RadialLaw law;
    law.family_ = Family::Exponential;
    law.rate_ = rate;
    law.log_survival_ = [rate](double x) { return x <= 0.0 ? 0.0 : -rate * x; };
    law.survival_ = [rate](double x) { return x <= 0.0 ? 1.0 : std::exp(-rate * x); };
    law.aux_psi_ = [rate](double) { return 1.0 / rate; };
    law.tail_quantile_ = [rate](double p, double floor) {
        return std::max(floor, 0.0) - std::log1p(-p) / rate;
    };
    return law;
}

RadialLaw RadialLaw::weibull_tail(double beta)
{
    require(finite_positive(beta), "radial.beta must be finite and > 0");
    RadialLaw law;
    law.family_ = Family::WeibullTail;
    law.beta_ = beta;
    law.log_survival_ = [beta](double x) { return x <= 0.0 ? 0.0 : -std::pow(x, beta); };
    law.survival_ = [beta](double x) { return x <= 0.0 ? 1.0 : std::exp(-std::pow(x, beta)); };
    // ψ = H̄ / H̄' = x^(1-β) / β
    law.aux_psi_ = [beta](double x) { return std::pow(x, 1.0 - beta) / beta; };
    law.tail_quantile_ = [beta](double p, double floor) {
        const double base = std::pow(std::max(floor, 0.0), beta);
        return std::pow(base - std::log1p(-p), 1.0 / beta);
    };
    return law;
}

RadialLaw RadialLaw::half_normal()
{
    RadialLaw law;
    law.family_ = Family::HalfNormal;
    law.log_survival_ = half_normal_log_survival;
    law.survival_ = [](double x) { return x <= 0.0 ? 1.0 : std::erfc(x / std::numbers::sqrt2); };
    law.aux_psi_ = [](double x) { return mills_ratio(std::max(x, 0.0)); };
    law.tail_quantile_ = [](double p, double floor) {
        // log H̄ is concave, so Newton from the left overshoots once and then
        // decreases monotonically onto the root.
        const double start = std::max(floor, 0.0);
        const double target = half_normal_log_survival(start) + std::log1p(-p);
        double r = start;
        for (int i = 0; i < 200; ++i) {
            const double step = (half_normal_log_survival(r) - target) * mills_ratio(r);
            const double next = std::max(start, r + step);
            if (std::abs(next - r) <= 1e-15 * std::max(1.0, r)) {
                r = next;
                break;
            }
            r = next;
        }
        return r;
    };
    return law;
}

RadialLaw RadialLaw::custom(CustomRadial callbacks)
{
    require(static_cast<bool>(callbacks.survival), "custom radial law needs a survival function");
    require(static_cast<bool>(callbacks.aux_psi), "custom radial law needs aux_psi");
    require(static_cast<bool>(callbacks.tail_quantile),
            "custom radial law needs a tail quantile");
    require(std::isfinite(callbacks.support_lower) && callbacks.support_lower >= 0.0,
            "radial.support_lower must be >= 0");
    RadialLaw law;
    law.family_ = Family::Custom;
    law.support_lower_ = callbacks.support_lower;
    auto survival = callbacks.survival;
    law.log_survival_ = [survival](double x) { return std::log(survival(x)); };
    law.survival_ = std::move(callbacks.survival);
    law.aux_psi_ = std::move(callbacks.aux_psi);
    law.tail_quantile_ = std::move(callbacks.tail_quantile);
    return law;
}

double RadialLaw::survival(double x) const { return survival_(x); }
double RadialLaw::log_survival(double x) const { return log_survival_(x); }
double RadialLaw::aux_psi(double x) const { return aux_psi_(x); }

double RadialLaw::tail_quantile(double p, double x_floor) const
{
    return tail_quantile_(p, std::max(x_floor, support_lower_));
}

double RadialLaw::sample(Rng& rng) const
{
    return tail_quantile_(rng.uniform(), support_lower_);
}

std::string RadialLaw::describe() const
{
    switch (family_) {
    case Family::Exponential: return "exponential(rate=" + fmt_double(rate_) + ")";
    case Family::WeibullTail: return "weibull_tail(beta=" + fmt_double(beta_) + ")";
    case Family::HalfNormal: return "half_normal";
    case Family::Custom: break;
    }
    return "custom";
}

// ---------------------------------------------------------------------------
// AngularLaw
// ---------------------------------------------------------------------------

AngularLaw AngularLaw::uniform(double lower, double upper, double t0)
{
    require(std::isfinite(lower) && std::isfinite(upper) && lower < upper,
            "angular.lower must be < angular.upper");
    require(t0 >= lower && t0 < upper, "t0 must lie in [angular.lower, angular.upper)");
    AngularLaw law;
    law.family_ = Family::Uniform;
    law.t0_ = t0;
    law.lower_ = lower;
    law.upper_ = upper;
    const double height = 1.0 / (upper - lower);
    law.leading_plus_ = PowerAsymptote{height, 0.0};
    if (t0 > lower) {
        law.leading_minus_ = PowerAsymptote{height, 0.0};
    }
    law.density_ = [=](double t) { return (t >= lower && t <= upper) ? height : 0.0; };
    law.sample_ = [=](Rng& rng) { return lower + (upper - lower) * rng.uniform(); };
    return law;
}

AngularLaw AngularLaw::symmetric_power(double t0, double tau, double half_width)
{
    require(std::isfinite(tau) && tau > -1.0, "angular.tau must be > -1");
    AngularLaw law = asymmetric_power(t0, tau, tau, 0.5, half_width);
    law.family_ = Family::SymmetricPower;
    return law;
}

AngularLaw AngularLaw::asymmetric_power(double t0, double tau_minus, double tau_plus,
                                        double weight_plus, double half_width)
{
    require(std::isfinite(tau_minus) && tau_minus > -1.0, "angular.tau_minus must be > -1");
    require(std::isfinite(tau_plus) && tau_plus > -1.0, "angular.tau_plus must be > -1");
    require(weight_plus >= 0.0 && weight_plus <= 1.0, "angular.weight_plus must lie in [0, 1]");
    require(finite_positive(half_width), "angular.half_width must be > 0");
    require(std::isfinite(t0), "t0 must be finite");
    AngularLaw law;
    law.family_ = Family::AsymmetricPower;
    law.t0_ = t0;
    law.lower_ = t0 - half_width;
    law.upper_ = t0 + half_width;
    law.tau_minus_ = tau_minus;
    law.tau_plus_ = tau_plus;
    const double c_plus = weight_plus * (1.0 + tau_plus) / std::pow(half_width, 1.0 + tau_plus);
    const double c_minus =
        (1.0 - weight_plus) * (1.0 + tau_minus) / std::pow(half_width, 1.0 + tau_minus);
    if (c_plus > 0.0) {
        law.leading_plus_ = PowerAsymptote{c_plus, tau_plus};
    }
    if (c_minus > 0.0) {
        law.leading_minus_ = PowerAsymptote{c_minus, tau_minus};
    }
    law.density_ = [=](double t) {
        const double s = t - t0;
        if (s == 0.0 || std::abs(s) > half_width) {
            // Open support at the center keeps τ < 0 finite.
            return (s == 0.0 && tau_plus == 0.0) ? c_plus : 0.0;
        }
        return s > 0.0 ? c_plus * std::pow(s, tau_plus) : c_minus * std::pow(-s, tau_minus);
    };
    law.sample_ = [=](Rng& rng) {
        const bool plus = rng.uniform() < weight_plus;
        const double tau = plus ? tau_plus : tau_minus;
        const double magnitude = half_width * std::pow(rng.uniform_open(), 1.0 / (1.0 + tau));
        return plus ? t0 + magnitude : t0 - magnitude;
    };
    return law;
}

AngularLaw AngularLaw::custom(CustomAngular callbacks)
{
    require(static_cast<bool>(callbacks.density), "custom angular law needs a density");
    require(static_cast<bool>(callbacks.sample), "custom angular law needs a sampler");
    require(callbacks.lower < callbacks.upper, "angular.lower must be < angular.upper");
    require(callbacks.t0 >= callbacks.lower && callbacks.t0 < callbacks.upper,
            "t0 must lie in [angular.lower, angular.upper)");
    require(callbacks.tau_minus > -1.0 && callbacks.tau_plus > -1.0, "angular tau must be > -1");
    AngularLaw law;
    law.family_ = Family::Custom;
    law.t0_ = callbacks.t0;
    law.lower_ = callbacks.lower;
    law.upper_ = callbacks.upper;
    law.tau_minus_ = callbacks.tau_minus;
    law.tau_plus_ = callbacks.tau_plus;
    law.density_ = std::move(callbacks.density);
    law.sample_ = std::move(callbacks.sample);
    return law;
}

double AngularLaw::density(double t) const { return density_(t); }
double AngularLaw::sample(Rng& rng) const { return sample_(rng); }

std::optional<PowerAsymptote> AngularLaw::leading(Side side) const
{
    return side == Side::Plus ? leading_plus_ : leading_minus_;
}

std::string AngularLaw::describe() const
{
    switch (family_) {
    case Family::Uniform:
        return "uniform(lower=" + fmt_double(lower_) + ", upper=" + fmt_double(upper_) + ")";
    case Family::SymmetricPower:
        return "symmetric_power(tau=" + fmt_double(tau_plus_) + ")";
    case Family::AsymmetricPower:
        return "asymmetric_power(tau_minus=" + fmt_double(tau_minus_) +
               ", tau_plus=" + fmt_double(tau_plus_) + ")";
    case Family::Custom: break;
    }
    return "custom";
}

// ---------------------------------------------------------------------------
// ShapeU
// ---------------------------------------------------------------------------

ShapeU ShapeU::power(double t0, double kappa_minus, double kappa_plus, double scale)
{
    require(finite_positive(kappa_minus), "shape_u.kappa_minus must be > 0");
    require(finite_positive(kappa_plus), "shape_u.kappa_plus must be > 0");
    require(finite_positive(scale), "shape_u.scale must be > 0");
    require(std::isfinite(t0), "t0 must be finite");
    ShapeU shape;
    shape.family_ = Family::Power;
    shape.t0_ = t0;
    shape.kappa_minus_ = kappa_minus;
    shape.kappa_plus_ = kappa_plus;
    shape.scale_ = scale;
    shape.u_ = [=](double t) {
        const double s = t - t0;
        return s >= 0.0 ? 1.0 - scale * std::pow(s, kappa_plus)
                        : 1.0 - scale * std::pow(-s, kappa_minus);
    };
    return shape;
}

ShapeU ShapeU::cosine(double t0)
{
    require(std::isfinite(t0), "t0 must be finite");
    ShapeU shape;
    shape.family_ = Family::Cosine;
    shape.t0_ = t0;
    shape.kappa_minus_ = 2.0;
    shape.kappa_plus_ = 2.0;
    shape.scale_ = 0.5;
    shape.u_ = [t0](double t) { return std::cos(t - t0); };
    return shape;
}

ShapeU ShapeU::custom(double t0, std::function<double(double)> u, double kappa_minus,
                      double kappa_plus)
{
    require(static_cast<bool>(u), "custom shape_u needs a function");
    require(finite_positive(kappa_minus) && finite_positive(kappa_plus),
            "shape_u kappas must be > 0");
    ShapeU shape;
    shape.family_ = Family::Custom;
    shape.t0_ = t0;
    shape.kappa_minus_ = kappa_minus;
    shape.kappa_plus_ = kappa_plus;
    shape.u_ = std::move(u);
    return shape;
}

std::optional<PowerAsymptote> ShapeU::leading(Side side) const
{
    if (family_ == Family::Custom) {
        return std::nullopt;
    }
    return PowerAsymptote{scale_, kappa(side)};
}

std::string ShapeU::describe() const
{
    switch (family_) {
    case Family::Power:
        return "power(kappa_minus=" + fmt_double(kappa_minus_) + ", kappa_plus=" +
               fmt_double(kappa_plus_) + ", scale=" + fmt_double(scale_) + ")";
    case Family::Cosine: return "cosine";
    case Family::Custom: break;
    }
    return "custom";
}

// ---------------------------------------------------------------------------
// ShapeV
// ---------------------------------------------------------------------------

ShapeV ShapeV::sine(double t0)
{
    require(std::isfinite(t0), "t0 must be finite");
    ShapeV shape;
    shape.family_ = Family::Sine;
    shape.t0_ = t0;
    shape.rho_ = 0.0;
    shape.delta_ = 1.0;
    shape.v_sign_ = -1;
    shape.leading_ = PowerAsymptote{-1.0, 1.0};
    shape.v_ = [t0](double t) { return std::sin(t - t0); };
    return shape;
}

ShapeV ShapeV::seifert_linear(const ShapeU& shape_u, double rho)
{
    ShapeV shape = theta_polynomial(shape_u, rho, 1, 1.0);
    shape.family_ = Family::SeifertLinear;
    return shape;
}

ShapeV ShapeV::theta_polynomial(const ShapeU& shape_u, double theta0, int n, double theta_n_deriv)
{
    require(std::isfinite(theta0), "shape_v.theta0 must be finite");
    require(n >= 1, "shape_v.n must be >= 1");
    require(std::isfinite(theta_n_deriv) && theta_n_deriv != 0.0,
            "shape_v.theta_deriv must be finite and nonzero");
    const auto u_leading = shape_u.leading(Side::Plus);
    require(u_leading.has_value(), "theta-polynomial v needs a builtin shape_u");

    const double t0 = shape_u.t0();
    const double c = theta_n_deriv / factorial(n);
    auto theta = [=](double t) { return theta0 + c * std::pow(t - t0, n); };

    // ṽ(s) = θ0 ũ(s) - c s^n (1 - ũ(s)); the leading term decides δ and sign.
    const double kappa = u_leading->index;
    const double a = u_leading->coefficient;
    PowerAsymptote lead;
    if (theta0 == 0.0 || kappa > n) {
        lead = PowerAsymptote{-c, static_cast<double>(n)};
    } else if (kappa < n) {
        lead = PowerAsymptote{theta0 * a, kappa};
    } else {
        const double coefficient = theta0 * a - c;
        require(coefficient != 0.0,
                "shape_v: leading terms of v_tilde cancel (theta0 * scale == theta_deriv / n!)");
        lead = PowerAsymptote{coefficient, kappa};
    }

    ShapeV shape;
    shape.family_ = Family::ThetaPolynomial;
    shape.t0_ = t0;
    shape.rho_ = theta0;
    shape.delta_ = lead.index;
    shape.v_sign_ = lead.coefficient > 0.0 ? 1 : -1;
    shape.leading_ = lead;
    shape.theta_ = ThetaData{theta, n, theta_n_deriv};
    auto u = shape_u;
    shape.v_ = [theta, u](double t) { return theta(t) * u.u(t); };
    return shape;
}

ShapeV ShapeV::power(double t0, double rho, double delta, double coefficient)
{
    require(std::isfinite(rho), "shape_v.rho must be finite");
    require(std::isfinite(delta) && delta >= 0.0, "shape_v.delta must be >= 0");
    require(std::isfinite(coefficient) && coefficient != 0.0,
            "shape_v.coefficient must be finite and nonzero");
    ShapeV shape;
    shape.family_ = Family::Power;
    shape.t0_ = t0;
    shape.rho_ = rho;
    shape.delta_ = delta;
    shape.v_sign_ = coefficient > 0.0 ? 1 : -1;
    shape.leading_ = PowerAsymptote{coefficient, delta};
    shape.v_ = [=](double t) {
        const double s = std::abs(t - t0);
        return s == 0.0 ? rho : rho - coefficient * std::pow(s, delta);
    };
    return shape;
}

ShapeV ShapeV::custom(double t0, std::function<double(double)> v, double delta, int v_sign,
                      std::optional<ThetaData> theta)
{
    require(static_cast<bool>(v), "custom shape_v needs a function");
    require(std::isfinite(delta) && delta >= 0.0, "shape_v.delta must be >= 0");
    require(v_sign == 1 || v_sign == -1, "shape_v.v_sign must be +1 or -1");
    ShapeV shape;
    shape.family_ = Family::Custom;
    shape.t0_ = t0;
    shape.rho_ = v(t0);
    shape.delta_ = delta;
    shape.v_sign_ = v_sign;
    shape.theta_ = std::move(theta);
    shape.v_ = std::move(v);
    return shape;
}

std::string ShapeV::describe() const
{
    switch (family_) {
    case Family::Sine: return "sine";
    case Family::SeifertLinear: return "seifert_linear(rho=" + fmt_double(rho_) + ")";
    case Family::Power:
        return "power(rho=" + fmt_double(rho_) + ", delta=" + fmt_double(delta_) + ")";
    case Family::ThetaPolynomial:
        return "theta_polynomial(theta0=" + fmt_double(rho_) +
               ", n=" + std::to_string(theta_->n) + ")";
    case Family::Custom: break;
    }
    return "custom";
}

// ---------------------------------------------------------------------------
// PolarModel
// ---------------------------------------------------------------------------

PolarModel::PolarModel(RadialLaw radial, AngularLaw angular, ShapeU shape_u,
                       std::optional<ShapeV> shape_v, Sidedness sidedness)
    : radial_(std::move(radial)),
      angular_(std::move(angular)),
      shape_u_(std::move(shape_u)),
      shape_v_(std::move(shape_v)),
      sidedness_(sidedness)
{
    constexpr double tol = 1e-12;
    require(std::abs(angular_.t0() - shape_u_.t0()) <= tol,
            "angular law and shape_u disagree on t0");
    if (shape_v_) {
        require(std::abs(shape_v_->t0() - shape_u_.t0()) <= tol,
                "shape_v and shape_u disagree on t0");
    }
    require(t0() < angular_.upper(), "t0 must lie strictly below the angular support's upper end");
    if (two_sided()) {
        require(t0() > angular_.lower(),
                "two-sided models need angular support on both sides of t0");
    }
}

double PolarModel::reach(Side side) const
{
    return side == Side::Plus ? angular_.upper() - t0() : t0() - angular_.lower();
}

std::optional<double> PolarModel::ratio_limit() const
{
    if (!shape_v_) {
        return std::nullopt;
    }
    const auto u_lead = shape_u_.leading(Side::Plus);
    const auto v_lead = shape_v_->leading();
    if (!u_lead || !v_lead) {
        return std::nullopt;
    }
    constexpr double tol = 1e-12;
    if (v_lead->index < u_lead->index - tol) {
        return 0.0;
    }
    if (std::abs(v_lead->index - u_lead->index) <= tol) {
        return u_lead->coefficient / v_lead->coefficient;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

PolarModel build_builtin_model(const ModelSpec& spec)
{
    require(std::isfinite(spec.t0), "model.t0 must be finite");
    const double t0 = spec.t0;

    std::optional<RadialLaw> radial;
    const auto& r = spec.radial;
    if (r.family == "exponential") {
        radial = RadialLaw::exponential(r.rate);
    } else if (r.family == "weibull_tail") {
        radial = RadialLaw::weibull_tail(r.beta);
    } else if (r.family == "half_normal") {
        radial = RadialLaw::half_normal();
    } else {
        throw ParameterError("unknown radial.family '" + r.family + "'");
    }

    std::optional<AngularLaw> angular;
    const auto& a = spec.angular;
    if (a.family == "uniform") {
        angular = AngularLaw::uniform(a.lower, a.upper, t0);
    } else if (a.family == "symmetric_power") {
        angular = AngularLaw::symmetric_power(t0, a.tau, a.half_width);
    } else if (a.family == "asymmetric_power") {
        angular =
            AngularLaw::asymmetric_power(t0, a.tau_minus, a.tau_plus, a.weight_plus, a.half_width);
    } else {
        throw ParameterError("unknown angular.family '" + a.family + "'");
    }

    std::optional<ShapeU> shape_u;
    const auto& u = spec.shape_u;
    if (u.family == "power") {
        shape_u = ShapeU::power(t0, u.kappa_minus, u.kappa_plus, u.scale);
    } else if (u.family == "cosine") {
        shape_u = ShapeU::cosine(t0);
    } else {
        throw ParameterError("unknown shape_u.family '" + u.family + "'");
    }

    std::optional<ShapeV> shape_v;
    const auto& v = spec.shape_v;
    if (v.family == "none" || v.family.empty()) {
        shape_v = std::nullopt;
    } else if (v.family == "sine") {
        shape_v = ShapeV::sine(t0);
    } else if (v.family == "seifert_linear") {
        shape_v = ShapeV::seifert_linear(*shape_u, v.rho);
    } else if (v.family == "power") {
        shape_v = ShapeV::power(t0, v.rho, v.delta, v.coefficient);
    } else if (v.family == "theta_polynomial") {
        shape_v = ShapeV::theta_polynomial(*shape_u, v.theta0, v.n, v.theta_deriv);
    } else {
        throw ParameterError("unknown shape_v.family '" + v.family + "'");
    }

    return PolarModel(std::move(*radial), std::move(*angular), std::move(*shape_u),
                      std::move(shape_v), spec.sidedness);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

bool ValidationReport::all_passed() const
{
    return std::all_of(entries.begin(), entries.end(),
                       [](const ValidationEntry& e) { return e.passed; });
}

const ValidationEntry* ValidationReport::find(const std::string& check) const
{
    for (const auto& e : entries) {
        if (e.check == check) {
            return &e;
        }
    }
    return nullptr;
}

namespace {

std::vector<double> log_grid(double lo, double hi, int points_per_decade)
{
    const double decades = std::log10(hi / lo);
    const int n = std::max(2, static_cast<int>(std::ceil(decades * points_per_decade)) + 1);
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] =
            lo * std::pow(10.0, decades * static_cast<double>(i) / (n - 1));
    }
    return grid;
}

}  // namespace

double log_log_slope(const std::function<double(double)>& f, double s_min, double s_max,
                     int points_per_decade)
{
    const auto grid = log_grid(s_min, s_max, points_per_decade);
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (double s : grid) {
        const double value = std::abs(f(s));
        if (!std::isfinite(value) || value == 0.0) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double lx = std::log(s);
        const double ly = std::log(value);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n = static_cast<double>(grid.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

class ReportBuilder {
public:
    explicit ReportBuilder(ValidationReport& report) : report_(report) {}

    void add(std::string assumption, std::string check, bool passed, double measured,
             double declared, double margin, std::string detail = {})
    {
        if (!std::isfinite(measured) && passed) {
            passed = false;
            detail = "non-finite evaluation; " + detail;
        }
        report_.entries.push_back(ValidationEntry{std::move(assumption), std::move(check), passed,
                                                  measured, declared, margin, std::move(detail)});
    }

private:
    ValidationReport& report_;
};

void validate_radial(const PolarModel& model, const ValidationGrid& grid, ReportBuilder& out)
{
    const RadialLaw& radial = model.radial();

    {
        const auto xs = log_grid(1e-2, 1e3, grid.points_per_decade);
        bool monotone = true;
        double previous = radial.survival(radial.support_lower());
        for (double x : xs) {
            const double s = radial.survival(x);
            if (!std::isfinite(s) || s > previous || s < 0.0) {
                monotone = false;
            }
            previous = s;
        }
        const double at_floor = radial.survival(radial.support_lower());
        const double at_end = radial.survival(xs.back());
        const bool ok = monotone && std::abs(at_floor - 1.0) <= 1e-12 && at_end < at_floor;
        out.add("radial", "radial.survival_monotone", ok, at_end, 0.0, at_floor - at_end,
                "survival nonincreasing from the support floor, equal to 1 there");
    }

    {
        std::vector<double> errors;
        std::string detail;
        for (double x : grid.gamma_x) {
            const double psi = radial.aux_psi(x);
            const double log_base = radial.log_survival(x);
            double worst = 0.0;
            for (double lambda : grid.lambdas) {
                const double ratio = std::exp(radial.log_survival(x + psi * lambda) - log_base);
                const double err = std::abs(ratio - std::exp(-lambda));
                worst = std::isfinite(err) ? std::max(worst, err)
                                           : std::numeric_limits<double>::infinity();
            }
            errors.push_back(worst);
            detail += "x=" + fmt_double(x) + ":err=" + fmt_double(worst) + " ";
        }
        bool shrinking = true;
        for (std::size_t i = 1; i < errors.size(); ++i) {
            shrinking = shrinking && errors[i] <= errors[i - 1] + 1e-12;
        }
        const double last = errors.empty() ? 0.0 : errors.back();
        out.add("radial", "radial.gamma_psi", shrinking && last <= grid.gamma_tolerance, last,
                0.0, grid.gamma_tolerance - last, detail);
    }

    {
        const auto xs = log_grid(10.0, 1e4, grid.points_per_decade);
        bool decreasing = true;
        double previous = std::numeric_limits<double>::infinity();
        for (double x : xs) {
            const double ratio = radial.aux_psi(x) / x;
            if (!(ratio > 0.0) || !std::isfinite(ratio) || ratio > previous) {
                decreasing = false;
            }
            previous = ratio;
        }
        const double first = radial.aux_psi(xs.front()) / xs.front();
        out.add("radial", "radial.psi_little_o", decreasing && previous < first, previous,
                0.0, first - previous, "psi(x)/x decreasing on [10, 1e4]");
    }
}

void validate_shape_u(const PolarModel& model, const ValidationGrid& grid, ReportBuilder& out,
                      const std::vector<Side>& sides)
{
    const ShapeU& shape = model.shape_u();
    const AngularLaw& angular = model.angular();
    const double t0 = model.t0();

    const double peak = shape.u(t0);
    out.add("shape_u", "shape_u.peak", std::abs(peak - 1.0) <= 1e-12, peak, 1.0,
            1e-12 - std::abs(peak - 1.0));

    const std::size_t n = std::max<std::size_t>(grid.sup_grid_points, 2);
    std::vector<double> ts(n);
    for (std::size_t i = 0; i < n; ++i) {
        ts[i] = angular.lower() +
                (angular.upper() - angular.lower()) * static_cast<double>(i) / (n - 1);
    }

    for (double eps : grid.epsilons) {
        double sup = -std::numeric_limits<double>::infinity();
        bool finite = true;
        bool any = false;
        auto outside = [&](double t) {
            const double offset = t - t0;
            return model.two_sided() ? std::abs(offset) > eps : offset > eps;
        };
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!outside(ts[i])) {
                continue;
            }
            any = true;
            const double value = shape.u(ts[i]);
            if (!std::isfinite(value)) {
                finite = false;
                continue;
            }
            if (value > sup) {
                sup = value;
                best = i;
            }
        }
        if (finite && best < n) {
            // Golden-section refinement between the neighbours of the best grid point.
            double a = ts[best > 0 ? best - 1 : 0];
            double b = ts[best + 1 < n ? best + 1 : n - 1];
            constexpr double g = 0.6180339887498949;
            for (int it = 0; it < 80 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
                const double c = b - g * (b - a);
                const double d = a + g * (b - a);
                const double fc = outside(c) ? shape.u(c) : -std::numeric_limits<double>::infinity();
                const double fd = outside(d) ? shape.u(d) : -std::numeric_limits<double>::infinity();
                if (std::isfinite(fc)) {
                    sup = std::max(sup, fc);
                }
                if (std::isfinite(fd)) {
                    sup = std::max(sup, fd);
                }
                if (fc >= fd) {
                    b = d;
                } else {
                    a = c;
                }
            }
        }
        const std::string check = "shape_u.sup_outside_eps=" + fmt_double(eps);
        if (!finite) {
            out.add("shape_u", check, false, std::numeric_limits<double>::quiet_NaN(), 1.0,
                    0.0, "non-finite u on the grid");
        } else if (!any) {
            out.add("shape_u", check, true, 0.0, 1.0, 1.0, "empty region; vacuous");
        } else {
            const double margin = 1.0 - sup;
            out.add("shape_u", check, margin > grid.margin_floor, sup, 1.0, margin);
        }
    }

    {
        double max_u = -std::numeric_limits<double>::infinity();
        for (double t : ts) {
            max_u = std::max(max_u, shape.u(t));
        }
        out.add("shape_u", "shape_u.upper_bound", max_u <= 1.0 + 1e-12, max_u, 1.0,
                1.0 - max_u, "u <= 1 on the angular support");
    }

    for (Side side : sides) {
        const double sigma = sign_of(side);
        const auto samples = log_grid(grid.slope_s_min, grid.slope_s_max, grid.points_per_decade);
        bool positive = true;
        for (double s : samples) {
            const double value = shape.u_tilde(sigma * s);
            positive = positive && std::isfinite(value) && value > 0.0;
        }
        const double slope =
            log_log_slope([&](double s) { return shape.u_tilde(sigma * s); }, grid.slope_s_min,
                          grid.slope_s_max, grid.points_per_decade);
        const double declared = shape.kappa(side);
        const double err = std::abs(slope - declared);
        out.add(side == Side::Plus ? "shape_u" : "shape_u",
                std::string("shape_u.index_") + (side == Side::Plus ? "plus" : "minus"),
                positive && err <= grid.slope_tolerance, slope, declared,
                grid.slope_tolerance - err, positive ? "" : "u_tilde not positive on the grid");
    }
}

void validate_shape_v(const PolarModel& model, const ValidationGrid& grid, ReportBuilder& out)
{
    const ShapeV& shape = *model.shape_v();
    const double t0 = model.t0();
    const double at_center = shape.v(t0);
    out.add("shape_v", "shape_v.rho", std::abs(at_center - shape.rho()) <= 1e-12, at_center,
            shape.rho(), 1e-12 - std::abs(at_center - shape.rho()));

    const auto samples = log_grid(grid.slope_s_min * 1e-2, grid.slope_s_max, grid.points_per_decade);
    bool sign_ok = true;
    for (double s : samples) {
        const double value = shape.v_tilde(s);
        const int sign = value > 0.0 ? 1 : (value < 0.0 ? -1 : 0);
        sign_ok = sign_ok && sign == shape.v_sign();
    }
    out.add("shape_v", "shape_v.sign", sign_ok, shape.v_sign(), shape.v_sign(), 0.0,
            "eventual sign of v_tilde on (0, 1e-2]");

    const double slope = log_log_slope([&](double s) { return shape.v_tilde(s); },
                                       grid.slope_s_min, grid.slope_s_max, grid.points_per_decade);
    const double err = std::abs(slope - shape.delta());
    out.add("shape_v", "shape_v.index", err <= grid.slope_tolerance, slope, shape.delta(),
            grid.slope_tolerance - err);
}

void validate_angular(const PolarModel& model, const ValidationGrid& grid, ReportBuilder& out,
                      const std::vector<Side>& sides)
{
    const AngularLaw& angular = model.angular();
    {
        const double center[] = {angular.t0()};
        const double mass = integrate([&](double t) { return angular.density(t); },
                                      angular.lower(), angular.upper(), {1e-15, 1e-13, 4000},
                                      center)
                                .value;
        const double err = std::abs(mass - 1.0);
        out.add("angular", "angular.normalization", err <= grid.normalization_tolerance, mass,
                1.0, grid.normalization_tolerance - err);
    }
    for (Side side : sides) {
        const double sigma = sign_of(side);
        const double slope =
            log_log_slope([&](double s) { return angular.g_tilde(sigma * s); }, grid.slope_s_min,
                          grid.slope_s_max, grid.points_per_decade);
        const double declared = angular.tau(side);
        const double err = std::abs(slope - declared);
        out.add(side == Side::Plus ? "angular" : "angular",
                std::string("angular.index_") + (side == Side::Plus ? "plus" : "minus"),
                err <= grid.slope_tolerance, slope, declared, grid.slope_tolerance - err);
    }
}

}  // namespace

ValidationReport validate_model(const PolarModel& model, const ValidationGrid& grid)
{
    if (grid.points_per_decade < 64) {
        throw PreconditionError("validation grid needs at least 64 points per decade");
    }
    ValidationReport report;
    report.grid = grid;
    ReportBuilder out(report);

    std::vector<Side> sides{Side::Plus};
    if (model.two_sided()) {
        sides.insert(sides.begin(), Side::Minus);
    }

    auto guarded = [&](const char* what, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            out.add(what, std::string(what) + ".evaluation", false,
                    std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, e.what());
        }
    };
    guarded("radial", [&] { validate_radial(model, grid, out); });
    guarded("angular", [&] { validate_angular(model, grid, out, sides); });
    guarded("shape_u", [&] { validate_shape_u(model, grid, out, sides); });
    if (model.shape_v()) {
        guarded("shape_v", [&] { validate_shape_v(model, grid, out); });
    }
    return report;
}

}  // namespace polarlab
