#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "polarlab/asymptotics.hpp"
#include "polarlab/limitlaw.hpp"
#include "polarlab/model.hpp"
#include "polarlab/random.hpp"

namespace polarlab {

/// Scale applied to T - t0 in the normalized pairs.
enum class TScale {
    PlusSide,  ///< φ₊(x)
    PerSign,   ///< φ_S(x) with S = sign(T - t0)
    Star,      ///< φ*(x) = φ₋(x) + φ₊(x)
};

const char* to_string(TScale scale);

struct AcceptanceStats {
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
    double acceptance_rate = 0.0;
    /// P(R > x), the proposal law's mass.
    double radial_tail_prob = 0.0;
};

using ProgressCallback = std::function<void(std::uint64_t proposals, std::uint64_t accepted)>;

struct SamplerOptions {
    /// Proposals per batch. Batch k always draws from seed.substream(k).
    std::size_t batch_size = 65536;
    /// Threads used to generate batches; never affects the output.
    unsigned workers = 1;
    std::uint64_t proposal_budget = 1'000'000'000;
    /// Skip validate_model (test hook for degenerate shapes).
    bool skip_validation = false;
    TScale scale = TScale::PlusSide;
    ProgressCallback progress;
};

struct ConditionalSample {
    double x = 0.0;
    Condition condition = Condition::RightSided;
    TScale scale = TScale::PlusSide;
    Normalizers normalizers;
    /// φ₊ or φ* for PlusSide/Star; NaN for PerSign.
    double phi_used = 0.0;
    std::vector<double> r;
    std::vector<double> t;
    std::vector<double> r_norm;
    std::vector<double> t_norm;
    AcceptanceStats acceptance;
    SeedStream seed;

    std::size_t size() const { return r.size(); }
};

/// Exactly n_target draws of (R, T) given the condition: R from its tail law
/// above x by inversion, T from the angular law, accepted iff R u(T) > x
/// (and T > t0 for RightSided). Throws BudgetExceeded once the proposals
/// needed exceed options.proposal_budget.
ConditionalSample sample_conditional(const PolarModel& model, double x, std::size_t n_target,
                                     Condition condition, SeedStream seed,
                                     const SamplerOptions& options = {});

struct TailEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    AcceptanceStats acceptance;
};

/// H̄(x) × accepted / n_proposals with binomial standard error.
TailEstimate estimate_tail_probability(const PolarModel& model, double x,
                                       std::uint64_t n_proposals, Condition condition,
                                       SeedStream seed, const SamplerOptions& options = {});

struct SignFrequency {
    double minus = 0.0;
    double plus = 0.0;
    std::size_t n = 0;
};

/// Sign frequencies of T - t0 among n draws given {X > x}.
SignFrequency empirical_sign_freq(const PolarModel& model, double x, std::size_t n,
                                  SeedStream seed, const SamplerOptions& options = {});

/// Grid check that the model satisfies the corollary's hypothesis.
/// Throws PreconditionError without shape_v and CaseMismatch on contradiction.
void check_corollary_case(const PolarModel& model, CorollaryKind kind);

/// Corollary-normalized (X, Y) statistics of a RightSided sample, with
/// X = R u(T), Y = R v(T) and normalizers at the sample's x.
std::vector<BivariatePair> bivariate_normalized(const PolarModel& model, CorollaryKind kind,
                                                const ConditionalSample& sample);

}  // namespace polarlab
