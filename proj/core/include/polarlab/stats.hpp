#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "polarlab/limitlaw.hpp"
#include "polarlab/model.hpp"
#include "polarlab/quadrature.hpp"
#include "polarlab/random.hpp"

namespace polarlab {

struct KsResult {
    double statistic = 0.0;
    /// Asymptotic Kolmogorov p-value with Stephens' small-sample correction.
    double p_value = 1.0;
};

/// Sup-distance between the empirical CDFs of a and b. Ties are handled by
/// stepping over all equal values before comparing.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// sup_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n). Throws ParameterError for an
/// empty sample or a cdf that leaves [0, 1] or decreases along the sample.
KsResult ks_one_sample(std::span<const double> sample, const std::function<double(double)>& cdf);

/// Rectangular cells [r_edges[i], r_edges[i+1]) x [t_edges[j], t_edges[j+1]).
struct Binning {
    std::vector<double> r_edges;
    std::vector<double> t_edges;
};

/// Equal-width cells covering the 99.9% quantiles of 𝓡 ~ Gamma(1 + a) and
/// 𝓣^κ ~ Gamma(a), a = (1+τ)/κ.
Binning default_binning(const LimitLawOneSided& law, int r_bins = 8, int t_bins = 8);
/// As above, t_edges spanning both signs (scaled by q_σ under StarNorming).
Binning default_binning(const LimitLawTwoSided& law, int r_bins = 8, int t_bins_per_side = 4);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    /// Retained cells plus the merged tail cell, if any.
    int cells = 0;
};

/// Pearson statistic of the pairs against cell masses of a probability density.
/// Cells with expected count below 5 are merged with the mass outside the grid
/// into one tail cell. Throws ParameterError for degenerate binning or zero
/// total expected mass.
ChiSquareResult chi_square_2d(std::span<const LimitPair> pairs, const Density2D& density,
                              const Binning& binning);

struct ConvergenceRow {
    double x = 0.0;
    std::size_t n = 0;
    double ks_r = 0.0;
    double ks_t = 0.0;
    /// Second coordinate against the corollary pushforward; NaN without a case.
    double ks_y = 0.0;
    double chi2_p = 0.0;
    double acceptance_rate = 0.0;
    /// Quadrature tail probability over its asymptotic equivalent.
    double tail_ratio = 0.0;
};

struct ReportConfig {
    std::vector<double> x_grid;
    std::size_t n = 50000;
    SeedStream seed;
    Condition condition = Condition::RightSided;
    std::optional<CorollaryKind> corollary;
    unsigned workers = 1;
    std::size_t batch_size = 65536;
    /// Allowed increase of a KS distance between successive rows.
    double ks_noise = 0.01;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    bool ks_r_monotone = true;
    bool ks_t_monotone = true;
    bool ks_y_monotone = true;
    /// |tail_ratio - 1| strictly decreasing along the grid.
    bool tail_ratio_monotone = true;
};

/// Per-x distances between normalized Monte Carlo samples and exact limit
/// draws. Row k uses seed.substream(2k) for Monte Carlo and seed.substream(2k+1)
/// for the limit sampler. Errors from a row are rethrown naming its x.
ConvergenceReport convergence_report(const PolarModel& model, const ReportConfig& config);

}  // namespace polarlab
