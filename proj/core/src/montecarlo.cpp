#include "polarlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "polarlab/errors.hpp"

namespace polarlab {

namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Batch {
    std::vector<double> r;
    std::vector<double> t;
    // Proposal index (within the batch) of each acceptance.
    std::vector<std::uint32_t> at;
    std::uint64_t proposals = 0;
};

Batch run_batch(const PolarModel& model, double x, Condition condition, SeedStream stream,
                std::size_t count)
{
    Rng rng(stream);
    const RadialLaw& radial = model.radial();
    const AngularLaw& angular = model.angular();
    const ShapeU& shape = model.shape_u();
    const double t0 = model.t0();
    const bool right_sided = condition == Condition::RightSided;
    Batch b;
    b.proposals = count;
    for (std::size_t i = 0; i < count; ++i) {
        const double r = radial.tail_quantile(rng.uniform(), x);
        const double t = angular.sample(rng);
        if (r * shape.u(t) > x && (!right_sided || t > t0)) {
            b.r.push_back(r);
            b.t.push_back(t);
            b.at.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return b;
}

// Runs job(k) for k in [first, first + count) on up to `workers` threads.
template <class Job>
void run_parallel(std::size_t first, std::size_t count, unsigned workers, const Job& job)
{
    if (workers <= 1 || count <= 1) {
        for (std::size_t k = first; k < first + count; ++k) {
            job(k);
        }
        return;
    }
    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    std::vector<std::exception_ptr> errors(n_threads);
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t k = first + w; k < first + count; k += n_threads) {
                    job(k);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) {
        th.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

void require_valid(const PolarModel& model, const SamplerOptions& options)
{
    if (options.skip_validation) {
        return;
    }
    const ValidationReport report = validate_model(model);
    if (report.all_passed()) {
        return;
    }
    std::string failed;
    for (const auto& e : report.entries) {
        if (!e.passed) {
            failed += (failed.empty() ? "" : ", ") + e.check;
        }
    }
    throw PreconditionError("model validation failed: " + failed);
}

void check_options(const SamplerOptions& options)
{
    if (options.batch_size == 0 ||
        options.batch_size > std::numeric_limits<std::uint32_t>::max()) {
        throw ParameterError("batch_size must be in [1, 2^32)");
    }
}

}  // namespace

const char* to_string(TScale scale)
{
    switch (scale) {
    case TScale::PlusSide: return "phi_plus";
    case TScale::PerSign: return "per_sign";
    case TScale::Star: return "phi_star";
    }
    return "?";
}

ConditionalSample sample_conditional(const PolarModel& model, double x, std::size_t n_target,
                                     Condition condition, SeedStream seed,
                                     const SamplerOptions& options)
{
    if (n_target < 1) {
        throw ParameterError("n_target must be >= 1");
    }
    check_options(options);
    if (options.scale != TScale::PlusSide && !model.two_sided()) {
        throw PreconditionError(std::string("scale ") + to_string(options.scale) +
                                " needs a two-sided model");
    }
    require_valid(model, options);

    ConditionalSample out;
    out.x = x;
    out.condition = condition;
    out.scale = options.scale;
    out.seed = seed;
    out.normalizers = compute_normalizers(model, x);
    const Normalizers& nz = out.normalizers;
    switch (options.scale) {
    case TScale::PlusSide: out.phi_used = nz.phi_plus; break;
    case TScale::PerSign: out.phi_used = std::numeric_limits<double>::quiet_NaN(); break;
    case TScale::Star: out.phi_used = nz.phi_star; break;
    }

    const std::size_t batch = options.batch_size;
    const std::uint64_t max_batches = (options.proposal_budget + batch - 1) / batch;
    const unsigned wave = std::max(1u, options.workers);

    std::uint64_t proposals = 0;
    std::uint64_t next = 0;
    while (out.r.size() < n_target) {
        if (next >= max_batches) {
            throw BudgetExceeded("proposal budget " + std::to_string(options.proposal_budget) +
                                 " exhausted at x=" + num(x) + " with " +
                                 std::to_string(out.r.size()) + " of " +
                                 std::to_string(n_target) + " accepted");
        }
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(wave, max_batches - next));
        std::vector<Batch> results(count);
        run_parallel(0, count, options.workers, [&](std::size_t i) {
            results[i] = run_batch(model, x, condition, seed.substream(next + i), batch);
        });
        for (const Batch& b : results) {
            const std::size_t need = n_target - out.r.size();
            if (b.r.size() >= need) {
                out.r.insert(out.r.end(), b.r.begin(), b.r.begin() + static_cast<std::ptrdiff_t>(need));
                out.t.insert(out.t.end(), b.t.begin(), b.t.begin() + static_cast<std::ptrdiff_t>(need));
                proposals += b.at[need - 1] + 1;
                break;
            }
            out.r.insert(out.r.end(), b.r.begin(), b.r.end());
            out.t.insert(out.t.end(), b.t.begin(), b.t.end());
            proposals += b.proposals;
        }
        next += count;
        if (options.progress) {
            options.progress(proposals, out.r.size());
        }
    }

    out.acceptance.proposals = proposals;
    out.acceptance.accepted = out.r.size();
    out.acceptance.acceptance_rate =
        static_cast<double>(out.acceptance.accepted) / static_cast<double>(proposals);
    out.acceptance.radial_tail_prob = model.radial().survival(x);

    const double t0 = model.t0();
    out.r_norm.resize(out.r.size());
    out.t_norm.resize(out.r.size());
    for (std::size_t i = 0; i < out.r.size(); ++i) {
        out.r_norm[i] = (out.r[i] - x) / nz.psi_x;
        const double offset = out.t[i] - t0;
        double scale = out.phi_used;
        if (options.scale == TScale::PerSign) {
            scale = side_of(offset) == Side::Plus ? nz.phi_plus : *nz.phi_minus;
        }
        out.t_norm[i] = offset / scale;
    }
    return out;
}

TailEstimate estimate_tail_probability(const PolarModel& model, double x,
                                       std::uint64_t n_proposals, Condition condition,
                                       SeedStream seed, const SamplerOptions& options)
{
    if (n_proposals == 0) {
        throw ParameterError("n_proposals must be >= 1");
    }
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw ParameterError("x must be finite and >= 0");
    }
    check_options(options);
    if (n_proposals > options.proposal_budget) {
        throw BudgetExceeded("n_proposals exceeds the proposal budget");
    }
    require_valid(model, options);

    const std::size_t batch = options.batch_size;
    const std::uint64_t n_batches = (n_proposals + batch - 1) / batch;
    std::vector<std::uint64_t> accepted(static_cast<std::size_t>(n_batches), 0);
    run_parallel(0, static_cast<std::size_t>(n_batches), options.workers, [&](std::size_t k) {
        const std::uint64_t begin = static_cast<std::uint64_t>(k) * batch;
        const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(batch, n_proposals - begin));
        accepted[k] = run_batch(model, x, condition, seed.substream(k), count).r.size();
    });
    std::uint64_t total = 0;
    for (std::uint64_t a : accepted) {
        total += a;
    }

    TailEstimate out;
    const double tail = model.radial().survival(x);
    const double n = static_cast<double>(n_proposals);
    const double rate = static_cast<double>(total) / n;
    out.estimate = tail * rate;
    out.std_error = tail * std::sqrt(rate * (1.0 - rate) / n);
    out.acceptance = AcceptanceStats{n_proposals, total, rate, tail};
    if (options.progress) {
        options.progress(n_proposals, total);
    }
    return out;
}

SignFrequency empirical_sign_freq(const PolarModel& model, double x, std::size_t n,
                                  SeedStream seed, const SamplerOptions& options)
{
    if (!model.two_sided()) {
        throw PreconditionError("empirical_sign_freq needs a two-sided model");
    }
    const ConditionalSample s =
        sample_conditional(model, x, n, Condition::Unrestricted, seed, options);
    std::size_t plus = 0;
    for (double t : s.t) {
        if (side_of(t - model.t0()) == Side::Plus) {
            ++plus;
        }
    }
    SignFrequency f;
    f.n = s.size();
    f.plus = static_cast<double>(plus) / static_cast<double>(f.n);
    f.minus = static_cast<double>(f.n - plus) / static_cast<double>(f.n);
    return f;
}

namespace {

constexpr double kSlopeTolerance = 0.05;
constexpr double kIdentityTolerance = 1e-12;

double ratio_slope(const PolarModel& model)
{
    const ShapeU& u = model.shape_u();
    const ShapeV& v = *model.shape_v();
    return log_log_slope([&](double s) { return u.u_tilde(s) / v.v_tilde(s); }, 1e-4, 1e-2, 64);
}

void check_identity(const PolarModel& model, const std::function<double(double)>& expected,
                    const char* what)
{
    const ShapeV& v = *model.shape_v();
    const double lo = model.angular().lower();
    const double hi = model.angular().upper();
    constexpr int points = 1001;
    for (int i = 0; i < points; ++i) {
        const double t = lo + (hi - lo) * i / (points - 1);
        const double want = expected(t);
        const double got = v.v(t);
        if (std::abs(got - want) > kIdentityTolerance * std::max(1.0, std::abs(want))) {
            throw CaseMismatch(std::string("shape_v is not of the form ") + what + " at t=" +
                               num(t));
        }
    }
}

}  // namespace

void check_corollary_case(const PolarModel& model, CorollaryKind kind)
{
    if (!model.shape_v()) {
        throw PreconditionError("corollary cases need a model with shape_v");
    }
    const ShapeV& v = *model.shape_v();
    const double rho = v.rho();
    const double t0 = model.t0();
    switch (kind) {
    case CorollaryKind::FS: {
        if (rho == 0.0) {
            return;
        }
        const double slope = ratio_slope(model);
        if (!(slope > kSlopeTolerance)) {
            throw CaseMismatch("fs case needs rho*u_tilde/v_tilde -> 0; log-log slope of "
                               "u_tilde/v_tilde is " + num(slope));
        }
        return;
    }
    case CorollaryKind::DeltaGtKappa: {
        const double slope = ratio_slope(model);
        if (rho == 0.0 || !(slope < -kSlopeTolerance)) {
            throw CaseMismatch("delta_gt_kappa case needs rho != 0 and a diverging "
                               "u_tilde/v_tilde; rho=" + num(rho) + ", slope " + num(slope));
        }
        return;
    }
    case CorollaryKind::RatioC: {
        const double slope = ratio_slope(model);
        if (!(std::abs(slope) <= kSlopeTolerance)) {
            throw CaseMismatch("ratio_c case needs a finite nonzero limit of u_tilde/v_tilde; "
                               "log-log slope is " + num(slope));
        }
        return;
    }
    case CorollaryKind::Seifert:
        check_identity(
            model, [&](double t) { return (t - t0 + rho) * model.shape_u().u(t); },
            "(t - t0 + rho) u(t)");
        return;
    case CorollaryKind::ThetaN: {
        const auto& theta = v.theta_data();
        if (!theta || theta->n < 1) {
            throw CaseMismatch("theta_n case needs shape_v built as theta * u with n >= 1");
        }
        check_identity(
            model, [&](double t) { return theta->theta(t) * model.shape_u().u(t); },
            "theta(t) u(t)");
        return;
    }
    }
}

std::vector<BivariatePair> bivariate_normalized(const PolarModel& model, CorollaryKind kind,
                                                const ConditionalSample& sample)
{
    check_corollary_case(model, kind);
    if (sample.condition != Condition::RightSided) {
        throw PreconditionError("corollary normalization needs a right_sided sample");
    }
    const ShapeV& v = *model.shape_v();
    const ShapeU& u = model.shape_u();
    const double x = sample.x;
    const double psi = sample.normalizers.psi_x;
    const double phi = sample.normalizers.phi_plus;
    const double rho = v.rho();
    const double v_tilde_phi = v.v_tilde(phi);
    double theta0 = 0.0;
    int n = 1;
    if (kind == CorollaryKind::ThetaN) {
        theta0 = v.theta_data()->theta(model.t0());
        n = v.theta_data()->n;
    }
    if ((kind == CorollaryKind::FS || kind == CorollaryKind::RatioC) && v_tilde_phi == 0.0) {
        throw NumericError("v_tilde(phi) is zero at x=" + num(x));
    }

    std::vector<BivariatePair> out;
    out.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double big_x = sample.r[i] * u.u(sample.t[i]);
        const double big_y = sample.r[i] * v.v(sample.t[i]);
        BivariatePair p;
        p.x1 = (big_x - x) / psi;
        switch (kind) {
        case CorollaryKind::FS:
        case CorollaryKind::RatioC: p.x2 = (big_y - rho * x) / (x * v_tilde_phi); break;
        case CorollaryKind::DeltaGtKappa: p.x2 = (big_y - rho * x) / psi; break;
        case CorollaryKind::Seifert: p.x2 = (big_y / big_x - rho) / phi; break;
        case CorollaryKind::ThetaN: p.x2 = (big_y / big_x - theta0) / std::pow(phi, n); break;
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace polarlab
