#include "commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>

#include "polarlab/asymptotics.hpp"
#include "polarlab/config.hpp"
#include "polarlab/errors.hpp"
#include "polarlab/limitlaw.hpp"
#include "polarlab/model.hpp"
#include "polarlab/montecarlo.hpp"
#include "polarlab/oracle.hpp"
#include "polarlab/stats.hpp"

namespace polarlab::cli {

namespace {

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<double> x;
    std::string x_grid;
    std::optional<std::uint64_t> n;
    std::string method;
    std::string case_name;
    std::string condition;
    unsigned workers = 1;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string short_num(double v) { return fmt::format("{:g}", v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::vector<std::string> run_keys()
{
    std::vector<std::string> keys = model_config_keys();
    for (const char* k : {"run.x", "run.x_grid", "run.n", "run.seed", "run.method", "run.case",
                          "run.condition", "verify.ks_max", "verify.ks_noise", "verify.tail_tol"}) {
        keys.emplace_back(k);
    }
    return keys;
}

std::vector<double> parse_grid(const std::string& text, const std::string& key)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        KeyValueConfig one;
        one.set(key, item);
        out.push_back(one.get_double(key, 0.0));
    }
    if (out.empty()) {
        throw ParameterError("key '" + key + "' is empty");
    }
    return out;
}

// Wraps an error raised while handling one x so the message names it.
template <class Fn>
auto at_x(double x, Fn&& fn)
{
    const std::string where = "x=" + num(x) + ": ";
    try {
        return fn();
    } catch (const NumericError& e) {
        throw NumericError(where + e.what());
    } catch (const ParameterError& e) {
        throw ParameterError(where + e.what());
    }
}

class Run {
public:
    Run(std::string command, const Flags& flags) : command_(std::move(command)), flags_(flags)
    {
        if (flags.config_path.empty()) {
            throw ParameterError("--config is required");
        }
        config_ = KeyValueConfig::load(flags.config_path);
        config_.check_keys(run_keys());
        if (flags.seed) {
            config_.set("run.seed", std::to_string(*flags.seed));
        }
        if (flags.x) {
            config_.set("run.x", num(*flags.x));
        }
        if (!flags.x_grid.empty()) {
            config_.set("run.x_grid", flags.x_grid);
        }
        if (flags.n) {
            config_.set("run.n", std::to_string(*flags.n));
        }
        if (!flags.method.empty()) {
            config_.set("run.method", flags.method);
        }
        if (!flags.case_name.empty()) {
            config_.set("run.case", flags.case_name);
        }
        if (!flags.condition.empty()) {
            config_.set("run.condition", flags.condition);
        }
        model_.emplace(build_builtin_model(model_spec_from_config(config_)));
    }

    const PolarModel& model() const { return *model_; }
    const KeyValueConfig& config() const { return config_; }
    unsigned workers() const { return flags_.workers; }

    std::uint64_t seed() const
    {
        if (!config_.has("run.seed")) {
            throw ParameterError("--seed is required for " + command_);
        }
        return config_.get_u64("run.seed", 0);
    }

    std::vector<double> xs(const std::string& fallback_grid = "") const
    {
        if (config_.has("run.x_grid")) {
            return parse_grid(*config_.get("run.x_grid"), "run.x_grid");
        }
        if (config_.has("run.x")) {
            return {config_.get_double("run.x", 0.0)};
        }
        if (!fallback_grid.empty()) {
            return parse_grid(fallback_grid, "run.x_grid");
        }
        throw ParameterError("--x or --x-grid is required for " + command_);
    }

    double single_x() const
    {
        if (config_.has("run.x_grid")) {
            throw ParameterError(command_ + " takes a single --x, not --x-grid");
        }
        if (!config_.has("run.x")) {
            throw ParameterError("--x is required for " + command_);
        }
        return config_.get_double("run.x", 0.0);
    }

    std::uint64_t n(std::uint64_t fallback) const
    {
        const std::uint64_t v = config_.get_u64("run.n", fallback);
        if (v == 0) {
            throw ParameterError("key 'run.n' must be >= 1");
        }
        return v;
    }

    Condition condition() const
    {
        return parse_condition(config_.get("run.condition").value_or("right_sided"));
    }

    std::optional<CorollaryKind> corollary() const
    {
        const auto c = config_.get("run.case");
        if (!c || c->empty()) {
            return std::nullopt;
        }
        return parse_corollary_kind(*c);
    }

    /// Metadata block shared by every output file.
    void header(std::ostream& os, bool stochastic) const
    {
        const std::string canonical = config_.canonical();
        os << "# command=" << command_ << "\n";
        os << "# version=" << POLARLAB_VERSION << "\n";
        os << "# config_hash=" << fmt::format("{:016x}", fnv1a(canonical)) << "\n";
        os << "# seed=" << (stochastic ? std::to_string(seed()) : std::string("none")) << "\n";
        const KeyValueConfig sorted = KeyValueConfig::parse(canonical);
        for (const auto& [k, v] : sorted.entries()) {
            os << "# config." << k << "=" << v << "\n";
        }
    }

private:
    std::string command_;
    Flags flags_;
    KeyValueConfig config_;
    std::optional<PolarModel> model_;
};

int cmd_validate(const Run& run, std::ostream& os)
{
    const ValidationReport report = validate_model(run.model());
    run.header(os, false);
    os << "# points_per_decade=" << report.grid.points_per_decade << "\n";
    os << "assumption,check,passed,measured,declared,margin,detail\n";
    for (const auto& e : report.entries) {
        std::string detail = e.detail;
        for (char& c : detail) {
            if (c == ',' || c == '\n') {
                c = ';';
            }
        }
        os << e.assumption << "," << e.check << "," << (e.passed ? 1 : 0) << "," << num(e.measured)
           << "," << num(e.declared) << "," << num(e.margin) << "," << detail << "\n";
    }
    return report.all_passed() ? kOk : kThresholdFailure;
}

int cmd_phi(const Run& run, std::ostream& os)
{
    const std::vector<double> xs = run.xs();
    std::ostringstream body;
    body << "x,psi,phi_minus,phi_plus,phi_star,residual_minus,residual_plus\n";
    for (double x : xs) {
        const Normalizers nz = at_x(x, [&] { return compute_normalizers(run.model(), x); });
        body << num(x) << "," << num(nz.psi_x) << "," << opt_num(nz.phi_minus) << ","
             << num(nz.phi_plus) << "," << num(nz.phi_star) << "," << opt_num(nz.residual_minus)
             << "," << num(nz.residual_plus) << "\n";
    }
    run.header(os, false);
    os << body.str();
    return kOk;
}

double asymptotic_value(const PolarModel& model, double x, Condition condition)
{
    if (condition == Condition::RightSided) {
        return tail_asymptotic(model, Side::Plus, x);
    }
    if (!model.two_sided()) {
        throw PreconditionError("asymptotic tail with condition unrestricted needs a two-sided model");
    }
    return tail_asymptotic(model, Side::Minus, x) + tail_asymptotic(model, Side::Plus, x);
}

int cmd_tailprob(const Run& run, std::ostream& os)
{
    const std::string method = run.config().get("run.method").value_or("quad");
    const Condition condition = run.condition();
    const std::vector<double> xs = run.xs();
    const bool mc = method == "mc";
    if (!mc && method != "quad" && method != "asym") {
        throw ParameterError("key 'run.method': unknown value '" + method +
                             "' (expected mc, quad or asym)");
    }
    std::optional<std::uint64_t> seed;
    std::uint64_t n = 0;
    if (mc) {
        seed = run.seed();
        n = run.n(1'000'000);
    }

    std::ostringstream body;
    body << "x,value,std_error\n";
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double x = xs[k];
        if (mc) {
            SamplerOptions options;
            options.workers = run.workers();
            const TailEstimate est = at_x(x, [&] {
                return estimate_tail_probability(run.model(), x, n, condition,
                                                 SeedStream{*seed, k}, options);
            });
            body << num(x) << "," << num(est.estimate) << "," << num(est.std_error) << "\n";
        } else if (method == "quad") {
            const double v =
                at_x(x, [&] { return tail_probability_quadrature(run.model(), x, condition).value; });
            body << num(x) << "," << num(v) << ",\n";
        } else {
            const double v = at_x(x, [&] { return asymptotic_value(run.model(), x, condition); });
            body << num(x) << "," << num(v) << ",\n";
        }
    }
    run.header(os, mc);
    os << "# method=" << method << "\n";
    os << "# condition=" << to_string(condition) << "\n";
    os << body.str();
    return kOk;
}

int cmd_simulate(const Run& run, std::ostream& os)
{
    const double x = run.single_x();
    const std::uint64_t seed = run.seed();
    const std::uint64_t n = run.n(10'000);
    const Condition condition = run.condition();
    const auto kind = run.corollary();
    const PolarModel& model = run.model();

    SamplerOptions options;
    options.workers = run.workers();
    if (condition == Condition::Unrestricted && model.two_sided()) {
        options.scale = TScale::PerSign;
    }
    const ConditionalSample s = at_x(x, [&] {
        return sample_conditional(model, x, static_cast<std::size_t>(n), condition,
                                  SeedStream{seed, 0}, options);
    });
    std::vector<BivariatePair> pairs;
    if (kind) {
        pairs = at_x(x, [&] { return bivariate_normalized(model, *kind, s); });
    }

    run.header(os, true);
    os << "# x=" << num(x) << "\n";
    os << "# psi=" << num(s.normalizers.psi_x) << "\n";
    if (options.scale == TScale::PerSign) {
        os << "# phi_used=per_sign\n";
        os << "# phi_minus=" << opt_num(s.normalizers.phi_minus) << "\n";
        os << "# phi_plus=" << num(s.normalizers.phi_plus) << "\n";
    } else {
        os << "# phi_used=" << num(s.phi_used) << "\n";
    }
    os << "# condition=" << to_string(condition) << "\n";
    os << "# proposals=" << s.acceptance.proposals << "\n";
    os << "# accepted=" << s.acceptance.accepted << "\n";
    os << "# acceptance_rate=" << num(s.acceptance.acceptance_rate) << "\n";
    if (kind) {
        os << "# case=" << to_string(*kind) << "\n";
    }
    os << "R,T,r_norm,t_norm" << (kind ? ",x1,x2" : "") << "\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        os << num(s.r[i]) << "," << num(s.t[i]) << "," << num(s.r_norm[i]) << ","
           << num(s.t_norm[i]);
        if (kind) {
            os << "," << num(pairs[i].x1) << "," << num(pairs[i].x2);
        }
        os << "\n";
    }
    return kOk;
}

int cmd_limit_sample(const Run& run, std::ostream& os)
{
    const std::uint64_t seed = run.seed();
    const std::uint64_t n = run.n(10'000);
    const Condition condition = run.condition();
    const auto kind = run.corollary();
    const PolarModel& model = run.model();

    std::vector<LimitPair> pairs;
    std::vector<BivariatePair> pushed;
    std::ostringstream meta;
    if (condition == Condition::Unrestricted && model.two_sided()) {
        if (kind) {
            throw PreconditionError("corollary pushforwards need condition right_sided");
        }
        const LimitLawTwoSided law = two_sided_limit_for(model, Scaling::PerSignNorming);
        pairs = sample_two_sided(law, static_cast<std::size_t>(n), SeedStream{seed, 0});
        meta << "# law=two_sided_per_sign\n";
        meta << "# prob_minus=" << num(law.sign_law().prob_minus) << "\n";
        meta << "# prob_plus=" << num(law.sign_law().prob_plus) << "\n";
    } else {
        const LimitLawOneSided law = one_sided_limit_for(model);
        pairs = sample_one_sided(law, static_cast<std::size_t>(n), SeedStream{seed, 0});
        meta << "# law=one_sided\n";
        meta << "# kappa=" << num(law.kappa()) << "\n";
        meta << "# tau=" << num(law.tau()) << "\n";
        if (kind) {
            pushed = pushforward_corollary(corollary_case_from_model(*kind, model), law.kappa(),
                                           pairs);
            meta << "# case=" << to_string(*kind) << "\n";
        }
    }

    run.header(os, true);
    os << meta.str();
    os << "r,t" << (kind ? ",x1,x2" : "") << "\n";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        os << num(pairs[i].r) << "," << num(pairs[i].t);
        if (kind) {
            os << "," << num(pushed[i].x1) << "," << num(pushed[i].x2);
        }
        os << "\n";
    }
    return kOk;
}

int cmd_density(const Run& run, std::ostream& os)
{
    const std::uint64_t points = run.n(64);
    if (points < 2) {
        throw ParameterError("key 'run.n' must be >= 2 grid points for density");
    }
    const PolarModel& model = run.model();
    const Condition condition = run.condition();
    Density2D density;
    Binning range;
    std::ostringstream meta;
    if (condition == Condition::Unrestricted && model.two_sided()) {
        const LimitLawTwoSided law = two_sided_limit_for(model, Scaling::PerSignNorming);
        density = as_density(law);
        range = default_binning(law, 1, 1);
        meta << "# law=two_sided_per_sign\n";
    } else {
        const LimitLawOneSided law = one_sided_limit_for(model);
        density = as_density(law);
        range = default_binning(law, 1, 1);
        meta << "# law=one_sided\n";
        meta << "# kappa=" << num(law.kappa()) << "\n";
        meta << "# tau=" << num(law.tau()) << "\n";
    }
    const QuadratureResult total = density_normalization(density);
    meta << "# normalization=" << num(total.value) << "\n";
    meta << "# normalization_error=" << num(total.abs_error_estimate) << "\n";

    const double r_hi = range.r_edges.back();
    const double t_lo = range.t_edges.front();
    const double t_hi = range.t_edges.back();
    run.header(os, false);
    os << meta.str();
    os << "r,t,density\n";
    for (std::uint64_t i = 1; i <= points; ++i) {
        const double r = r_hi * static_cast<double>(i) / static_cast<double>(points);
        for (std::uint64_t j = 0; j < points; ++j) {
            // Cell midpoints keep t off the boundary t = 0.
            const double t = t_lo + (t_hi - t_lo) * (static_cast<double>(j) + 0.5) /
                                        static_cast<double>(points);
            os << num(r) << "," << num(t) << "," << num(density.density(r, t)) << "\n";
        }
    }
    return kOk;
}

int cmd_verify(const Run& run, std::ostream& os, std::ostream& err)
{
    ReportConfig rc;
    rc.x_grid = run.xs("10,25,50,100");
    rc.n = static_cast<std::size_t>(run.n(50'000));
    rc.seed = SeedStream{run.seed(), 0};
    rc.condition = run.condition();
    rc.corollary = run.corollary();
    rc.workers = run.workers();
    rc.ks_noise = run.config().get_double("verify.ks_noise", 0.01);
    const double ks_max = run.config().get_double("verify.ks_max", 0.03);
    const double tail_tol = run.config().get_double("verify.tail_tol", 0.05);

    const ConvergenceReport report = convergence_report(run.model(), rc);
    const ConvergenceRow& last = report.rows.back();

    struct Check {
        std::string name;
        bool passed;
    };
    std::vector<Check> checks = {
        {"final ks_r <= " + short_num(ks_max), last.ks_r <= ks_max},
        {"final ks_t <= " + short_num(ks_max), last.ks_t <= ks_max},
        {"ks_r trend within noise " + short_num(rc.ks_noise), report.ks_r_monotone},
        {"ks_t trend within noise " + short_num(rc.ks_noise), report.ks_t_monotone},
        {"final |tail_ratio - 1| <= " + short_num(tail_tol), std::abs(last.tail_ratio - 1.0) <= tail_tol},
    };
    if (rc.corollary) {
        checks.push_back({"final ks_y <= " + short_num(ks_max), last.ks_y <= ks_max});
        checks.push_back({"ks_y trend within noise " + short_num(rc.ks_noise), report.ks_y_monotone});
    }

    run.header(os, true);
    os << "# condition=" << to_string(rc.condition) << "\n";
    os << "x,n,ks_r,ks_t,ks_y,chi2_p,acceptance_rate,tail_ratio\n";
    for (const auto& row : report.rows) {
        os << num(row.x) << "," << row.n << "," << num(row.ks_r) << "," << num(row.ks_t) << ","
           << (std::isnan(row.ks_y) ? std::string() : num(row.ks_y)) << "," << num(row.chi2_p)
           << "," << num(row.acceptance_rate) << "," << num(row.tail_ratio) << "\n";
    }
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.passed;
        os << "# check " << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
        err << (c.passed ? "PASS  " : "FAIL  ") << c.name << "\n";
    }
    err << (all ? "verify: all thresholds pass\n" : "verify: threshold failure\n");
    return all ? kOk : kThresholdFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Simulation and numerical checks for polar-representation tail models",
                 "polarlab"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", POLARLAB_VERSION);

    Flags flags;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "model configuration file");
        sub->add_option("--seed", flags.seed, "random seed (required for stochastic commands)");
        sub->add_option("--out", flags.out, "output CSV path (default stdout)");
        sub->add_option("--x", flags.x, "threshold x");
        sub->add_option("--x-grid", flags.x_grid, "comma-separated thresholds");
        sub->add_option("--n", flags.n, "sample size, proposal count or grid points");
        sub->add_option("--method", flags.method, "tailprob method: mc, quad or asym");
        sub->add_option("--case", flags.case_name,
                        "corollary case: fs, delta_gt_kappa, ratio_c, seifert, theta_n");
        sub->add_option("--condition", flags.condition, "right_sided or unrestricted");
        sub->add_option("--workers", flags.workers, "worker threads for Monte Carlo batches")
            ->check(CLI::Range(1u, 256u));
    };

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"validate", "check model assumptions on finite grids"},
        {"phi", "normalizers phi_minus, phi_plus, phi_star"},
        {"tailprob", "tail probability by Monte Carlo, quadrature or asymptotics"},
        {"simulate", "conditional samples of (R, T) given X > x"},
        {"limit-sample", "exact draws from the limit law"},
        {"density", "limit density on a grid"},
        {"verify", "convergence report with pass/fail thresholds"},
    };
    for (const auto& [name, help] : commands) {
        add_common(app.add_subcommand(name, help));
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        Run run(command, flags);
        std::ostringstream buffer;
        int code = kOk;
        if (command == "validate") {
            code = cmd_validate(run, buffer);
        } else if (command == "phi") {
            code = cmd_phi(run, buffer);
        } else if (command == "tailprob") {
            code = cmd_tailprob(run, buffer);
        } else if (command == "simulate") {
            code = cmd_simulate(run, buffer);
        } else if (command == "limit-sample") {
            code = cmd_limit_sample(run, buffer);
        } else if (command == "density") {
            code = cmd_density(run, buffer);
        } else {
            code = cmd_verify(run, buffer, err);
        }
        if (flags.out.empty()) {
            out << buffer.str();
        } else {
            std::ofstream file(flags.out, std::ios::binary);
            if (!file || !(file << buffer.str()) || !file.flush()) {
                err << "error: cannot write '" << flags.out << "'\n";
                return kUsageError;
            }
        }
        return code;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kNumericError;
    }
}

}  // namespace polarlab::cli
