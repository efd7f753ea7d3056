#include "polarlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "polarlab/asymptotics.hpp"
#include "polarlab/errors.hpp"
#include "polarlab/montecarlo.hpp"
#include "polarlab/oracle.hpp"
#include "polarlab/special_functions.hpp"

namespace polarlab {

namespace {

double ks_p_value(double d, double n_eff)
{
    const double root = std::sqrt(n_eff);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

std::vector<double> sorted_copy(std::span<const double> v, const char* name)
{
    if (v.empty()) {
        throw ParameterError(std::string(name) + " must be nonempty");
    }
    std::vector<double> out(v.begin(), v.end());
    for (double x : out) {
        if (std::isnan(x)) {
            throw ParameterError(std::string(name) + " contains NaN");
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> linear_edges(double lo, double hi, int bins)
{
    std::vector<double> e(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) {
        e[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
    }
    return e;
}

bool strictly_increasing(const std::vector<double>& v)
{
    if (v.size() < 2) {
        return false;
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1]) || !std::isfinite(v[i]) || !std::isfinite(v[i - 1])) {
            return false;
        }
    }
    return true;
}

// Index of the cell containing v, or -1 outside [front, back).
long locate(const std::vector<double>& edges, double v)
{
    if (!(v >= edges.front()) || !(v < edges.back())) {
        return -1;
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return static_cast<long>(it - edges.begin()) - 1;
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b)
{
    const std::vector<double> sa = sorted_copy(a, "first sample");
    const std::vector<double> sb = sorted_copy(b, "second sample");
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        const double v = std::min(sa[i], sb[j]);
        while (i < sa.size() && sa[i] == v) {
            ++i;
        }
        while (j < sb.size() && sb[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult r;
    r.statistic = d;
    r.p_value = ks_p_value(d, na * nb / (na + nb));
    return r;
}

KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf)
{
    const std::vector<double> s = sorted_copy(sample, "sample");
    const double n = static_cast<double>(s.size());
    double d = 0.0;
    double previous = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        if (!(f >= 0.0 && f <= 1.0)) {
            throw ParameterError("cdf value " + num(f) + " at " + num(s[i]) + " is outside [0, 1]");
        }
        if (f < previous) {
            throw ParameterError("cdf decreases near " + num(s[i]));
        }
        previous = f;
        const double k = static_cast<double>(i + 1);
        d = std::max({d, k / n - f, f - (k - 1.0) / n});
    }
    KsResult r;
    r.statistic = d;
    r.p_value = ks_p_value(d, n);
    return r;
}

Binning default_binning(const LimitLawOneSided& law, int r_bins, int t_bins)
{
    if (r_bins < 1 || t_bins < 1) {
        throw ParameterError("bin counts must be >= 1");
    }
    const double a = law.gamma_shape();
    const double r_max = gamma_p_inverse(a + 1.0, 0.999);
    const double t_max = std::pow(gamma_p_inverse(a, 0.999), 1.0 / law.kappa());
    return Binning{linear_edges(0.0, r_max, r_bins), linear_edges(0.0, t_max, t_bins)};
}

Binning default_binning(const LimitLawTwoSided& law, int r_bins, int t_bins_per_side)
{
    if (r_bins < 1 || t_bins_per_side < 1) {
        throw ParameterError("bin counts must be >= 1");
    }
    double r_max = 0.0;
    double reach[2] = {0.0, 0.0};
    for (Side s : {Side::Minus, Side::Plus}) {
        const SideLimit& lim = law.side(s);
        if (lim.p == 0.0) {
            continue;
        }
        const double a = (1.0 + lim.tau) / lim.kappa;
        r_max = std::max(r_max, gamma_p_inverse(a + 1.0, 0.999));
        const double scale = law.scaling() == Scaling::StarNorming ? lim.q : 1.0;
        reach[s == Side::Plus] = scale * std::pow(gamma_p_inverse(a, 0.999), 1.0 / lim.kappa);
    }
    Binning b;
    b.r_edges = linear_edges(0.0, r_max, r_bins);
    if (reach[0] > 0.0) {
        b.t_edges = linear_edges(-reach[0], 0.0, t_bins_per_side);
        b.t_edges.pop_back();
    }
    const std::vector<double> plus =
        reach[1] > 0.0 ? linear_edges(0.0, reach[1], t_bins_per_side) : std::vector<double>{0.0};
    b.t_edges.insert(b.t_edges.end(), plus.begin(), plus.end());
    return b;
}

ChiSquareResult chi_square_2d(std::span<const LimitPair> pairs, const Density2D& density,
                              const Binning& binning)
{
    if (!strictly_increasing(binning.r_edges) || !strictly_increasing(binning.t_edges)) {
        throw ParameterError("binning edges must be finite, strictly increasing, at least 2 each");
    }
    if (pairs.empty()) {
        throw ParameterError("chi_square_2d needs at least one pair");
    }
    const std::size_t nr = binning.r_edges.size() - 1;
    const std::size_t nt = binning.t_edges.size() - 1;
    const double n = static_cast<double>(pairs.size());

    std::vector<double> observed(nr * nt, 0.0);
    double observed_outside = 0.0;
    for (const LimitPair& p : pairs) {
        const long i = locate(binning.r_edges, p.r);
        const long j = locate(binning.t_edges, p.t);
        if (i < 0 || j < 0) {
            observed_outside += 1.0;
        } else {
            observed[static_cast<std::size_t>(i) * nt + static_cast<std::size_t>(j)] += 1.0;
        }
    }

    const QuadratureOptions outer{1e-14, 1e-9, 2000};
    const QuadratureOptions inner{1e-16, 1e-10, 2000};
    std::vector<double> mass(nr * nt, 0.0);
    double grid_mass = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t j = 0; j < nt; ++j) {
            const double m = integrate_2d(density, binning.r_edges[i], binning.r_edges[i + 1],
                                          binning.t_edges[j], binning.t_edges[j + 1], outer, inner)
                                 .value;
            mass[i * nt + j] = std::max(0.0, m);
            grid_mass += mass[i * nt + j];
        }
    }
    const double total_mass =
        std::max(grid_mass, density_normalization(density, 0.0).value);
    if (!(total_mass > 0.0)) {
        throw ParameterError("binning has zero total expected mass");
    }

    double statistic = 0.0;
    int cells = 0;
    double tail_expected = n * std::max(0.0, total_mass - grid_mass) / total_mass;
    double tail_observed = observed_outside;
    for (std::size_t k = 0; k < mass.size(); ++k) {
        const double expected = n * mass[k] / total_mass;
        if (expected < 5.0) {
            tail_expected += expected;
            tail_observed += observed[k];
            continue;
        }
        const double diff = observed[k] - expected;
        statistic += diff * diff / expected;
        ++cells;
    }
    if (tail_expected > 0.0) {
        const double diff = tail_observed - tail_expected;
        statistic += diff * diff / tail_expected;
        ++cells;
    } else if (tail_observed > 0.0) {
        statistic = std::numeric_limits<double>::infinity();
    }
    if (cells < 2) {
        throw ParameterError("binning leaves fewer than 2 cells with expected count >= 5");
    }

    ChiSquareResult r;
    r.statistic = statistic;
    r.dof = cells - 1;
    r.cells = cells;
    r.p_value = std::isinf(statistic) ? 0.0 : chi_square_survival(statistic, r.dof);
    return r;
}

namespace {

[[noreturn]] void rethrow_for_row(double x)
{
    const std::string where = "convergence report row x=" + num(x) + ": ";
    try {
        throw;
    } catch (const BracketError& e) {
        throw BracketError(where + e.what());
    } catch (const MonotonicityError& e) {
        throw MonotonicityError(where + e.what());
    } catch (const BudgetExceeded& e) {
        throw BudgetExceeded(where + e.what());
    } catch (const CaseMismatch& e) {
        throw CaseMismatch(where + e.what());
    } catch (const NonConvergence& e) {
        throw NonConvergence(where + e.what());
    } catch (const NumericError& e) {
        throw NumericError(where + e.what());
    } catch (const ParameterError& e) {
        throw PreconditionError(where + e.what());
    }
}

double tail_ratio(const PolarModel& model, double x, Condition condition)
{
    const double quad = tail_probability_ratio_quadrature(model, x, condition).value;
    double asym = 0.0;
    for (Side s : {Side::Minus, Side::Plus}) {
        if (s == Side::Minus && (condition == Condition::RightSided || !model.two_sided())) {
            continue;
        }
        const double phi = compute_phi(model, s, x);
        const double kappa = model.shape_u().kappa(s);
        const double tau = model.angular().tau(s);
        asym += phi * model.angular().g_tilde(sign_of(s) * phi) *
                gamma_eval((1.0 + tau) / kappa) / kappa;
    }
    return quad / asym;
}

std::vector<double> column(const std::vector<LimitPair>& pairs, bool want_t)
{
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const LimitPair& p : pairs) {
        out.push_back(want_t ? p.t : p.r);
    }
    return out;
}

}  // namespace

ConvergenceReport convergence_report(const PolarModel& model, const ReportConfig& config)
{
    if (config.x_grid.empty()) {
        throw ParameterError("x_grid must be nonempty");
    }
    if (!std::is_sorted(config.x_grid.begin(), config.x_grid.end()) ||
        std::adjacent_find(config.x_grid.begin(), config.x_grid.end()) != config.x_grid.end()) {
        throw ParameterError("x_grid must be strictly increasing");
    }
    if (config.n < 1) {
        throw ParameterError("n must be >= 1");
    }
    const bool two_sided_limit =
        config.condition == Condition::Unrestricted && model.two_sided();
    if (config.corollary && config.condition != Condition::RightSided) {
        throw PreconditionError("corollary checks need condition right_sided");
    }

    SamplerOptions options;
    options.workers = config.workers;
    options.batch_size = config.batch_size;
    options.scale = two_sided_limit ? TScale::PerSign : TScale::PlusSide;

    ConvergenceReport report;
    for (std::size_t k = 0; k < config.x_grid.size(); ++k) {
        const double x = config.x_grid[k];
        try {
            const ConditionalSample mc = sample_conditional(
                model, x, config.n, config.condition, config.seed.substream(2 * k), options);
            options.skip_validation = true;
            const SeedStream limit_seed = config.seed.substream(2 * k + 1);

            std::vector<LimitPair> reference;
            Density2D density;
            Binning binning;
            double kappa = model.shape_u().kappa(Side::Plus);
            if (two_sided_limit) {
                const LimitLawTwoSided law =
                    two_sided_limit_for(model, Scaling::PerSignNorming);
                reference = sample_two_sided(law, config.n, limit_seed);
                density = as_density(law);
                binning = default_binning(law);
            } else {
                const LimitLawOneSided law = one_sided_limit_for(model);
                reference = sample_one_sided(law, config.n, limit_seed);
                density = as_density(law);
                binning = default_binning(law);
                kappa = law.kappa();
            }

            ConvergenceRow row;
            row.x = x;
            row.n = config.n;
            row.ks_r = ks_two_sample(mc.r_norm, column(reference, false)).statistic;
            row.ks_t = ks_two_sample(mc.t_norm, column(reference, true)).statistic;
            row.ks_y = std::numeric_limits<double>::quiet_NaN();
            if (config.corollary) {
                const std::vector<BivariatePair> got = bivariate_normalized(model, *config.corollary, mc);
                const CorollaryCase c = corollary_case_from_model(*config.corollary, model);
                const std::vector<BivariatePair> want = pushforward_corollary(c, kappa, reference);
                std::vector<double> a;
                std::vector<double> b;
                a.reserve(got.size());
                b.reserve(want.size());
                for (const auto& p : got) {
                    a.push_back(p.x2);
                }
                for (const auto& p : want) {
                    b.push_back(p.x2);
                }
                row.ks_y = ks_two_sample(a, b).statistic;
            }
            std::vector<LimitPair> normalized(mc.size());
            for (std::size_t i = 0; i < mc.size(); ++i) {
                normalized[i] = LimitPair{mc.r_norm[i], mc.t_norm[i]};
            }
            row.chi2_p = chi_square_2d(normalized, density, binning).p_value;
            row.acceptance_rate = mc.acceptance.acceptance_rate;
            row.tail_ratio = tail_ratio(model, x, config.condition);
            report.rows.push_back(row);
        } catch (...) {
            rethrow_for_row(x);
        }
    }

    for (std::size_t k = 1; k < report.rows.size(); ++k) {
        const ConvergenceRow& prev = report.rows[k - 1];
        const ConvergenceRow& cur = report.rows[k];
        report.ks_r_monotone = report.ks_r_monotone && cur.ks_r <= prev.ks_r + config.ks_noise;
        report.ks_t_monotone = report.ks_t_monotone && cur.ks_t <= prev.ks_t + config.ks_noise;
        if (config.corollary) {
            report.ks_y_monotone = report.ks_y_monotone && cur.ks_y <= prev.ks_y + config.ks_noise;
        }
        report.tail_ratio_monotone = report.tail_ratio_monotone &&
                                     std::abs(cur.tail_ratio - 1.0) < std::abs(prev.tail_ratio - 1.0);
    }
    return report;
}

}  // namespace polarlab
