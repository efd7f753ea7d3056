#include "polarlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "polarlab/errors.hpp"

namespace polarlab {

namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Panel {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const Integrand& f, double a, double b, std::size_t& evaluations)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kronrod = 0.0;
    double gauss = 0.0;
    for (std::size_t i = 0; i < kNodes.size(); ++i) {
        const double dx = half * kNodes[i];
        double fsum = 0.0;
        if (i + 1 == kNodes.size()) {
            fsum = f(center);
            ++evaluations;
        } else {
            fsum = f(center - dx) + f(center + dx);
            evaluations += 2;
        }
        if (!std::isfinite(fsum)) {
            throw NonConvergence("integrand returned a non-finite value");
        }
        kronrod += kKronrod[i] * fsum;
        if (i % 2 == 1) {
            gauss += kGauss[i / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    return Panel{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& options,
                           std::span<const double> breakpoints)
{
    if (std::isnan(a) || std::isnan(b) || std::isinf(a) || std::isinf(b)) {
        throw ParameterError("integrate: limits must be finite");
    }
    if (a == b) {
        return QuadratureResult{0.0, 0.0, 0, true};
    }
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    std::vector<double> cuts{a};
    for (double p : breakpoints) {
        if (p > a && p < b) {
            cuts.push_back(p);
        }
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    QuadratureResult result;
    std::priority_queue<Panel> queue;
    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Panel p = evaluate_panel(f, cuts[i], cuts[i + 1], result.evaluations);
        total += p.value;
        total_error += p.error;
        queue.push(p);
    }

    // Panels too narrow to split keep their error in `frozen_error`.
    double frozen_error = 0.0;
    std::size_t panels = queue.size();
    auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };
    while (total_error > target() && !queue.empty() && panels < options.max_panels) {
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(std::abs(worst.a), std::abs(worst.b))) {
            frozen_error += worst.error;
            continue;
        }
        Panel left = evaluate_panel(f, worst.a, mid, result.evaluations);
        Panel right = evaluate_panel(f, mid, worst.b, result.evaluations);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++panels;
    }

    // Re-sum to shed accumulated rounding from the incremental updates.
    double value = 0.0;
    double error = frozen_error;
    while (!queue.empty()) {
        value += queue.top().value;
        error += queue.top().error;
        queue.pop();
    }
    result.value = sign * value;
    result.abs_error_estimate = error;
    result.converged = error <= std::max(options.abs_tol, options.rel_tol * std::abs(value));
    return result;
}

QuadratureResult integrate_2d(const Density2D& f, double r_lo, double r_hi, double t_lo,
                              double t_hi, const QuadratureOptions& outer,
                              const QuadratureOptions& inner)
{
    if (!(r_hi > r_lo)) {
        throw ParameterError("integrate_2d: r interval is empty");
    }
    double worst_inner_relative = 0.0;
    std::size_t inner_evaluations = 0;
    bool inner_converged = true;

    auto inner_integral = [&](double r) {
        auto [lo, hi] = f.t_support(r);
        lo = std::max(lo, t_lo);
        hi = std::min(hi, t_hi);
        if (!(hi > lo)) {
            return 0.0;
        }
        QuadratureResult in = integrate([&](double t) { return f.density(r, t); }, lo, hi, inner,
                                        f.t_breakpoints);
        if (in.value != 0.0) {
            worst_inner_relative =
                std::max(worst_inner_relative, in.abs_error_estimate / std::abs(in.value));
        }
        inner_evaluations += in.evaluations;
        inner_converged = inner_converged && in.converged;
        return in.value;
    };

    QuadratureResult out;
    if (std::isinf(r_hi)) {
        // dr = dw / (1 - w)
        out = integrate(
            [&](double w) {
                const double one_minus_w = 1.0 - w;
                const double r = r_lo - std::log1p(-w);
                return inner_integral(r) / one_minus_w;
            },
            0.0, 1.0, outer);
    } else {
        out = integrate(inner_integral, r_lo, r_hi, outer);
    }
    out.abs_error_estimate += worst_inner_relative * std::abs(out.value);
    out.evaluations += inner_evaluations;
    out.converged = out.converged && inner_converged;
    return out;
}

}  // namespace polarlab
