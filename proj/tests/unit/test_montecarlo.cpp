#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "polarlab/errors.hpp"
#include "polarlab/montecarlo.hpp"
#include "polarlab/oracle.hpp"

using namespace polarlab;

namespace {

PolarModel with_v(ShapeV v)
{
    return PolarModel(RadialLaw::exponential(1.0), AngularLaw::uniform(-1.0, 1.0, 0.0),
                      ShapeU::power(0.0, 2.0, 2.0, 1.0), std::move(v), Sidedness::OneSidedRight);
}

PolarModel symmetric_two_sided()
{
    return oracles::two_sided_power_model(2.0, 2.0);
}

}  // namespace

TEST(SampleConditional, AcceptanceRateMatchesAsymptotic)
{
    const PolarModel model = oracles::f1_model();
    const double x = 50.0;
    const ConditionalSample s =
        sample_conditional(model, x, 20000, Condition::RightSided, SeedStream{1, 0});
    const double phi = s.normalizers.phi_plus;
    const double predicted = phi * 0.5 * std::tgamma(0.5) / 2.0;
    EXPECT_NEAR(s.acceptance.acceptance_rate / predicted, 1.0, 0.1);
    EXPECT_NEAR(predicted, 0.0626, 5e-4);
}

TEST(SampleConditional, EveryDrawSatisfiesTheEvent)
{
    const PolarModel model = oracles::f1_model();
    const double x = 20.0;
    const ConditionalSample s =
        sample_conditional(model, x, 5000, Condition::RightSided, SeedStream{2, 0});
    ASSERT_EQ(s.size(), 5000u);
    for (std::size_t i = 0; i < s.size(); ++i) {
        ASSERT_GT(s.r[i] * model.shape_u().u(s.t[i]), x);
        ASSERT_GT(s.t[i], 0.0);
        ASSERT_NEAR(s.r_norm[i], (s.r[i] - x) / s.normalizers.psi_x, 1e-12 * s.r_norm[i] + 1e-15);
        ASSERT_NEAR(s.t_norm[i], s.t[i] / s.phi_used, 1e-12 * s.t_norm[i]);
    }
}

TEST(SampleConditional, UnrestrictedDrawsBothSides)
{
    const ConditionalSample s = sample_conditional(symmetric_two_sided(), 20.0, 2000,
                                                   Condition::Unrestricted, SeedStream{3, 0});
    const auto [lo, hi] = std::minmax_element(s.t.begin(), s.t.end());
    EXPECT_LT(*lo, 0.0);
    EXPECT_GT(*hi, 0.0);
}

TEST(SampleConditional, PerSignScaleNeedsTwoSidedModel)
{
    SamplerOptions options;
    options.scale = TScale::PerSign;
    EXPECT_THROW(sample_conditional(oracles::f1_model(), 10.0, 10, Condition::RightSided,
                                    SeedStream{4, 0}, options),
                 PreconditionError);
    const ConditionalSample s = sample_conditional(symmetric_two_sided(), 10.0, 1000,
                                                   Condition::Unrestricted, SeedStream{4, 0},
                                                   options);
    EXPECT_TRUE(std::isnan(s.phi_used));
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double phi = s.t[i] < 0.0 ? *s.normalizers.phi_minus : s.normalizers.phi_plus;
        ASSERT_NEAR(s.t_norm[i], s.t[i] / phi, 1e-12 * std::abs(s.t_norm[i]));
    }
}

TEST(SampleConditional, DeterministicAndIndependentOfWorkers)
{
    const PolarModel model = oracles::f1_model();
    SamplerOptions one;
    one.batch_size = 4096;
    SamplerOptions four = one;
    four.workers = 4;
    const auto a = sample_conditional(model, 30.0, 3000, Condition::RightSided, SeedStream{5, 0}, one);
    const auto b = sample_conditional(model, 30.0, 3000, Condition::RightSided, SeedStream{5, 0}, one);
    const auto c = sample_conditional(model, 30.0, 3000, Condition::RightSided, SeedStream{5, 0}, four);
    EXPECT_EQ(a.r, b.r);
    EXPECT_EQ(a.t, b.t);
    EXPECT_EQ(a.r, c.r);
    EXPECT_EQ(a.t, c.t);
    EXPECT_EQ(a.acceptance.proposals, c.acceptance.proposals);
    const auto d = sample_conditional(model, 30.0, 3000, Condition::RightSided, SeedStream{6, 0}, one);
    EXPECT_NE(a.r, d.r);
}

TEST(SampleConditional, BudgetExceeded)
{
    SamplerOptions options;
    options.batch_size = 1000;
    options.proposal_budget = 5000;
    EXPECT_THROW(sample_conditional(oracles::f1_model(), 100.0, 10000, Condition::RightSided,
                                    SeedStream{7, 0}, options),
                 BudgetExceeded);
}

TEST(SampleConditional, InvalidModelIsRejectedUnlessSkipped)
{
    CustomAngular ang;
    ang.density = [](double t) { return std::abs(t) <= 1.0 ? 0.5 : 0.0; };
    ang.sample = [](Rng& rng) { return 2.0 * rng.uniform() - 1.0; };
    const PolarModel flat(RadialLaw::exponential(1.0), AngularLaw::custom(ang),
                          ShapeU::custom(0.0, [](double) { return 1.0; }, 2.0, 2.0), std::nullopt,
                          Sidedness::OneSidedRight);
    EXPECT_THROW(estimate_tail_probability(flat, 3.0, 1000, Condition::RightSided, SeedStream{8, 0}),
                 PreconditionError);
    SamplerOptions options;
    options.skip_validation = true;
    const TailEstimate e =
        estimate_tail_probability(flat, 3.0, 200000, Condition::RightSided, SeedStream{8, 0}, options);
    const double expect = std::exp(-3.0) / 2.0;
    EXPECT_NEAR(e.estimate, expect, 3.0 * e.std_error);
}

TEST(EstimateTail, AgreesWithF1Oracle)
{
    const TailEstimate e = estimate_tail_probability(oracles::f1_model(), 10.0, 1'000'000,
                                                     Condition::RightSided, SeedStream{9, 0});
    EXPECT_EQ(e.acceptance.proposals, 1'000'000u);
    EXPECT_NEAR(e.estimate, oracles::f1_tail(10.0), 3.0 * e.std_error);
}

TEST(EstimateTail, ZeroProposalsIsAnError)
{
    EXPECT_THROW(estimate_tail_probability(oracles::f1_model(), 10.0, 0, Condition::RightSided,
                                           SeedStream{10, 0}),
                 ParameterError);
}

TEST(EstimateTail, CoverageOverSeeds)
{
    const PolarModel model = oracles::f1_model();
    const double truth = oracles::f1_tail(5.0);
    int inside = 0;
    const int seeds = 200;
    SamplerOptions options;
    options.batch_size = 8192;
    for (int s = 0; s < seeds; ++s) {
        const TailEstimate e = estimate_tail_probability(
            model, 5.0, 20000, Condition::RightSided, SeedStream{1000u + s, 0}, options);
        inside += std::abs(e.estimate - truth) <= 3.0 * e.std_error;
    }
    EXPECT_GE(inside, 198);
}

TEST(SignFrequency, SymmetricModelIsBalanced)
{
    const std::size_t n = 40000;
    const SignFrequency f = empirical_sign_freq(symmetric_two_sided(), 50.0, n, SeedStream{11, 0});
    EXPECT_EQ(f.n, n);
    EXPECT_NEAR(f.plus, 0.5, 3.0 * std::sqrt(0.25 / n));
    EXPECT_NEAR(f.plus + f.minus, 1.0, 1e-15);
}

TEST(SignFrequency, AllMassOnPlusSide)
{
    const PolarModel model(RadialLaw::exponential(1.0),
                           AngularLaw::asymmetric_power(0.0, 0.0, 0.0, 1.0, 1.0),
                           ShapeU::power(0.0, 1.0, 2.0, 1.0), std::nullopt, Sidedness::TwoSided);
    SamplerOptions options;
    options.skip_validation = true;
    const SignFrequency f = empirical_sign_freq(model, 20.0, 5000, SeedStream{12, 0}, options);
    EXPECT_EQ(f.plus, 1.0);
}

TEST(SignFrequency, MatchesQuadratureAtFiniteX)
{
    const PolarModel model = oracles::two_sided_power_model(1.0, 2.0);
    const double x = 100.0;
    const double all = tail_probability_ratio_quadrature(model, x, Condition::Unrestricted).value;
    const double right = tail_probability_ratio_quadrature(model, x, Condition::RightSided).value;
    const double p = right / all;
    const std::size_t n = 20000;
    const SignFrequency f = empirical_sign_freq(model, x, n, SeedStream{13, 0});
    EXPECT_NEAR(f.plus, p, 3.5 * std::sqrt(p * (1.0 - p) / n));
}

TEST(SignFrequency, NeedsTwoSidedModel)
{
    EXPECT_THROW(empirical_sign_freq(oracles::f1_model(), 10.0, 10, SeedStream{14, 0}),
                 PreconditionError);
}

TEST(CorollaryCase, Classification)
{
    const PolarModel fs = with_v(ShapeV::power(0.0, 1.0, 1.0, 1.0));
    const PolarModel ratio = with_v(ShapeV::power(0.0, 1.0, 2.0, 1.0));
    const PolarModel dk = with_v(ShapeV::power(0.0, 1.0, 3.0, 1.0));
    const PolarModel sine = with_v(ShapeV::sine(0.0));

    EXPECT_NO_THROW(check_corollary_case(fs, CorollaryKind::FS));
    EXPECT_NO_THROW(check_corollary_case(sine, CorollaryKind::FS));
    EXPECT_THROW(check_corollary_case(fs, CorollaryKind::DeltaGtKappa), CaseMismatch);
    EXPECT_THROW(check_corollary_case(fs, CorollaryKind::RatioC), CaseMismatch);

    EXPECT_NO_THROW(check_corollary_case(ratio, CorollaryKind::RatioC));
    EXPECT_THROW(check_corollary_case(ratio, CorollaryKind::FS), CaseMismatch);

    EXPECT_NO_THROW(check_corollary_case(dk, CorollaryKind::DeltaGtKappa));
    EXPECT_THROW(check_corollary_case(dk, CorollaryKind::FS), CaseMismatch);

    EXPECT_THROW(check_corollary_case(sine, CorollaryKind::Seifert), CaseMismatch);
    EXPECT_THROW(check_corollary_case(sine, CorollaryKind::ThetaN), CaseMismatch);
    EXPECT_THROW(check_corollary_case(oracles::f1_model(), CorollaryKind::FS), PreconditionError);
}

TEST(Bivariate, SeifertSecondCoordinateIsNormalizedAngle)
{
    const ShapeU u = ShapeU::power(0.0, 2.0, 2.0, 1.0);
    const PolarModel model(RadialLaw::exponential(1.0), AngularLaw::uniform(-1.0, 1.0, 0.0), u,
                           ShapeV::seifert_linear(u, 0.5), Sidedness::OneSidedRight);
    const ConditionalSample s =
        sample_conditional(model, 50.0, 5000, Condition::RightSided, SeedStream{15, 0});
    const auto pairs = bivariate_normalized(model, CorollaryKind::Seifert, s);
    ASSERT_EQ(pairs.size(), s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        ASSERT_NEAR(pairs[i].x2, s.t_norm[i], 1e-12 * std::max(1.0, s.t_norm[i]));
        const double X = s.r[i] * (1.0 - s.t[i] * s.t[i]);
        ASSERT_NEAR(pairs[i].x1, (X - 50.0) / s.normalizers.psi_x, 1e-9);
    }
}

TEST(Bivariate, FSFormulaForSine)
{
    const PolarModel model = with_v(ShapeV::sine(0.0));
    const double x = 40.0;
    const ConditionalSample s =
        sample_conditional(model, x, 2000, Condition::RightSided, SeedStream{16, 0});
    const auto pairs = bivariate_normalized(model, CorollaryKind::FS, s);
    const double psi = s.normalizers.psi_x;
    const double scale = x * std::sin(s.normalizers.phi_plus);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double X = s.r[i] * (1.0 - s.t[i] * s.t[i]);
        const double Y = s.r[i] * std::sin(s.t[i]);
        ASSERT_NEAR(pairs[i].x1, (X - x) / psi, 1e-9);
        ASSERT_NEAR(pairs[i].x2, -Y / scale, 1e-9 * std::max(1.0, std::abs(pairs[i].x2)));
    }
}

TEST(Bivariate, NeedsRightSidedSample)
{
    const PolarModel model = PolarModel(RadialLaw::exponential(1.0),
                                        AngularLaw::uniform(-1.0, 1.0, 0.0),
                                        ShapeU::power(0.0, 2.0, 2.0, 1.0), ShapeV::sine(0.0),
                                        Sidedness::TwoSided);
    const ConditionalSample s =
        sample_conditional(model, 20.0, 100, Condition::Unrestricted, SeedStream{17, 0});
    EXPECT_THROW(bivariate_normalized(model, CorollaryKind::FS, s), PreconditionError);
}
