#include "polarlab/limitlaw.hpp"

#include <cmath>

#include "polarlab/asymptotics.hpp"
#include "polarlab/errors.hpp"
#include "polarlab/special_functions.hpp"

namespace polarlab {

namespace {

void check_indices(double kappa, double tau)
{
    if (!(std::isfinite(kappa) && kappa > 0.0)) {
        throw ParameterError("kappa must be finite and > 0");
    }
    if (!(std::isfinite(tau) && tau > -1.0)) {
        throw ParameterError("tau must be finite and > -1");
    }
}

double side_weight(const SideLimit& s)
{
    return s.p / s.kappa * gamma_eval((1.0 + s.tau) / s.kappa);
}

double factorial(int n)
{
    double f = 1.0;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

}  // namespace

LimitLawOneSided::LimitLawOneSided(double kappa, double tau) : kappa_(kappa), tau_(tau)
{
    check_indices(kappa, tau);
    norm_const_ = kappa / gamma_eval((1.0 + tau) / kappa);
}

double density_one_sided(const LimitLawOneSided& law, double r, double t)
{
    // Open support: t = 0 is excluded, which keeps τ < 0 finite.
    if (!(t > 0.0) || !(r > 0.0) || !(std::pow(t, law.kappa()) < r)) {
        return 0.0;
    }
    return law.norm_const() * std::pow(t, law.tau()) * std::exp(-r);
}

SignLaw sign_probability(const SideLimit& minus, const SideLimit& plus)
{
    check_indices(minus.kappa, minus.tau);
    check_indices(plus.kappa, plus.tau);
    if (minus.p < 0.0 || plus.p < 0.0 || std::abs(minus.p + plus.p - 1.0) > 1e-12) {
        throw ParameterError("p_minus and p_plus must be nonnegative and sum to 1");
    }
    const double w_minus = side_weight(minus);
    const double w_plus = side_weight(plus);
    SignLaw law;
    law.prob_plus = w_plus / (w_minus + w_plus);
    law.prob_minus = w_minus / (w_minus + w_plus);
    return law;
}

LimitLawTwoSided::LimitLawTwoSided(SideLimit minus, SideLimit plus, Scaling scaling)
    : minus_(minus), plus_(plus), scaling_(scaling)
{
    sign_law_ = sign_probability(minus_, plus_);
    if (scaling_ == Scaling::StarNorming &&
        (minus_.q < 0.0 || plus_.q < 0.0 || std::abs(minus_.q + plus_.q - 1.0) > 1e-12)) {
        throw ParameterError("q_minus and q_plus must be nonnegative and sum to 1");
    }
    normalizer_ = side_weight(minus_) + side_weight(plus_);
}

LimitLawOneSided LimitLawTwoSided::conditional(Side s) const
{
    const SideLimit& lim = side(s);
    return LimitLawOneSided(lim.kappa, lim.tau);
}

double density_two_sided(const LimitLawTwoSided& law, double r, double t)
{
    const Side s = side_of(t);
    const SideLimit& lim = law.side(s);
    double magnitude = std::abs(t);
    double jacobian = 1.0;
    if (law.scaling() == Scaling::StarNorming) {
        if (lim.q == 0.0) {
            if (lim.p > 0.0) {
                throw PreconditionError(
                    "star-normed density is singular on a side with q = 0 and p > 0");
            }
            return 0.0;
        }
        magnitude /= lim.q;
        jacobian = 1.0 / lim.q;
    }
    if (!(magnitude > 0.0) || !(r > 0.0) || !(std::pow(magnitude, lim.kappa) < r)) {
        return 0.0;
    }
    return jacobian * std::pow(magnitude, lim.tau) * std::exp(-r) * lim.p / law.normalizer();
}

std::vector<LimitPair> sample_one_sided(const LimitLawOneSided& law, std::size_t n,
                                        SeedStream seed)
{
    Rng rng(seed);
    std::vector<LimitPair> out;
    out.reserve(n);
    const double shape = law.gamma_shape();
    const double inv_kappa = 1.0 / law.kappa();
    for (std::size_t i = 0; i < n; ++i) {
        const double g = rng.gamma(shape);
        const double e = rng.exponential();
        out.push_back(LimitPair{g + e, std::pow(g, inv_kappa)});
    }
    return out;
}

std::vector<LimitPair> sample_two_sided(const LimitLawTwoSided& law, std::size_t n,
                                        SeedStream seed)
{
    Rng rng(seed);
    std::vector<LimitPair> out;
    out.reserve(n);
    const LimitLawOneSided minus = law.conditional(Side::Minus);
    const LimitLawOneSided plus = law.conditional(Side::Plus);
    const double p_plus = law.sign_law().prob_plus;
    for (std::size_t i = 0; i < n; ++i) {
        const bool is_plus = rng.uniform() < p_plus;
        const LimitLawOneSided& cond = is_plus ? plus : minus;
        const double g = rng.gamma(cond.gamma_shape());
        const double e = rng.exponential();
        double t = std::pow(g, 1.0 / cond.kappa());
        if (law.scaling() == Scaling::StarNorming) {
            t *= law.side(is_plus ? Side::Plus : Side::Minus).q;
        }
        out.push_back(LimitPair{g + e, is_plus ? t : -t});
    }
    return out;
}

const char* to_string(CorollaryKind kind)
{
    switch (kind) {
    case CorollaryKind::FS: return "fs";
    case CorollaryKind::DeltaGtKappa: return "delta_gt_kappa";
    case CorollaryKind::RatioC: return "ratio_c";
    case CorollaryKind::Seifert: return "seifert";
    case CorollaryKind::ThetaN: return "theta_n";
    }
    return "?";
}

CorollaryKind parse_corollary_kind(const std::string& name)
{
    for (CorollaryKind k : {CorollaryKind::FS, CorollaryKind::DeltaGtKappa, CorollaryKind::RatioC,
                            CorollaryKind::Seifert, CorollaryKind::ThetaN}) {
        if (name == to_string(k)) {
            return k;
        }
    }
    throw ParameterError("unknown corollary case '" + name +
                         "' (expected fs, delta_gt_kappa, ratio_c, seifert, theta_n)");
}

CorollaryCase corollary_case_from_model(CorollaryKind kind, const PolarModel& model)
{
    if (!model.shape_v()) {
        throw PreconditionError("corollary cases need a model with shape_v");
    }
    const ShapeV& v = *model.shape_v();
    CorollaryCase c;
    c.kind = kind;
    c.rho = v.rho();
    c.delta = v.delta();
    c.c = model.ratio_limit();
    if (v.theta_data()) {
        c.n = v.theta_data()->n;
        c.theta_n_deriv = v.theta_data()->theta_n_deriv_at_t0;
    }
    return c;
}

namespace {

template <class T>
T need(const std::optional<T>& value, const char* name, CorollaryKind kind)
{
    if (!value) {
        throw ParameterError(std::string("corollary case ") + to_string(kind) +
                             " is missing parameter '" + name + "'");
    }
    return *value;
}

}  // namespace

std::vector<BivariatePair> pushforward_corollary(const CorollaryCase& c, double kappa,
                                                 std::span<const LimitPair> pairs)
{
    if (!(kappa > 0.0)) {
        throw ParameterError("kappa must be > 0");
    }
    double rho = 0.0;
    double delta = 0.0;
    double ratio = 0.0;
    int n = 1;
    double taylor = 0.0;
    switch (c.kind) {
    case CorollaryKind::FS: delta = need(c.delta, "delta", c.kind); break;
    case CorollaryKind::DeltaGtKappa: rho = need(c.rho, "rho", c.kind); break;
    case CorollaryKind::RatioC:
        rho = need(c.rho, "rho", c.kind);
        delta = need(c.delta, "delta", c.kind);
        ratio = need(c.c, "C", c.kind);
        break;
    case CorollaryKind::Seifert: break;
    case CorollaryKind::ThetaN:
        n = need(c.n, "n", c.kind);
        taylor = need(c.theta_n_deriv, "theta_n_deriv", c.kind) / factorial(n);
        break;
    }

    std::vector<BivariatePair> out;
    out.reserve(pairs.size());
    for (const LimitPair& p : pairs) {
        const double tk = std::pow(p.t, kappa);
        if (!(p.t > 0.0) || !(p.r > tk)) {
            throw PreconditionError("pushforward input pair outside the limit support");
        }
        const double first = p.r - tk;
        double second = 0.0;
        switch (c.kind) {
        case CorollaryKind::FS: second = -std::pow(p.t, delta); break;
        case CorollaryKind::DeltaGtKappa: second = rho * p.r; break;
        case CorollaryKind::RatioC: second = ratio * rho * p.r - std::pow(p.t, delta); break;
        case CorollaryKind::Seifert: second = p.t; break;
        case CorollaryKind::ThetaN: second = std::pow(p.t, n) * taylor; break;
        }
        out.push_back(BivariatePair{first, second});
    }
    return out;
}

LimitLawOneSided one_sided_limit_for(const PolarModel& model)
{
    return LimitLawOneSided(model.shape_u().kappa(Side::Plus), model.angular().tau(Side::Plus));
}

LimitLawTwoSided two_sided_limit_for(const PolarModel& model, Scaling scaling)
{
    if (!model.two_sided()) {
        throw PreconditionError("two-sided limit law requested for a one-sided model");
    }
    const auto limits = closed_form_mixture(model);
    if (!limits) {
        throw PreconditionError("no closed-form p/q limits for this model (custom family)");
    }
    SideLimit minus{model.shape_u().kappa(Side::Minus), model.angular().tau(Side::Minus),
                    limits->p_minus, limits->q_minus};
    SideLimit plus{model.shape_u().kappa(Side::Plus), model.angular().tau(Side::Plus),
                   limits->p_plus, limits->q_plus};
    return LimitLawTwoSided(minus, plus, scaling);
}

Density2D as_density(const LimitLawOneSided& law)
{
    Density2D d;
    d.density = [law](double r, double t) { return density_one_sided(law, r, t); };
    d.t_support = [k = law.kappa()](double r) {
        return std::pair<double, double>{0.0, r > 0.0 ? std::pow(r, 1.0 / k) : 0.0};
    };
    return d;
}

Density2D as_density(const LimitLawTwoSided& law)
{
    Density2D d;
    d.density = [law](double r, double t) { return density_two_sided(law, r, t); };
    d.t_support = [law](double r) {
        if (!(r > 0.0)) {
            return std::pair<double, double>{0.0, 0.0};
        }
        auto reach = [&](Side s) {
            const SideLimit& lim = law.side(s);
            if (lim.p == 0.0) {
                return 0.0;
            }
            const double scale = law.scaling() == Scaling::StarNorming ? lim.q : 1.0;
            return scale * std::pow(r, 1.0 / lim.kappa);
        };
        return std::pair<double, double>{-reach(Side::Minus), reach(Side::Plus)};
    };
    d.t_breakpoints = {0.0};
    return d;
}

}  // namespace polarlab
