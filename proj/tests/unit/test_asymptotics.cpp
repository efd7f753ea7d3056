#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "polarlab/asymptotics.hpp"
#include "polarlab/errors.hpp"

using namespace polarlab;

namespace {

PolarModel one_sided(ShapeU u, AngularLaw g = AngularLaw::uniform(-1.0, 1.0, 0.0),
                     RadialLaw r = RadialLaw::exponential(1.0))
{
    return PolarModel(std::move(r), std::move(g), std::move(u), std::nullopt,
                      Sidedness::OneSidedRight);
}

PolarModel two_sided(ShapeU u, AngularLaw g = AngularLaw::uniform(-1.0, 1.0, 0.0))
{
    return PolarModel(RadialLaw::exponential(1.0), std::move(g), std::move(u), std::nullopt,
                      Sidedness::TwoSided);
}

const std::vector<double> kGrid = {1e2, 1e3, 1e4, 1e5, 1e6};

}  // namespace

TEST(ComputePhi, F1AtHundred)
{
    const PhiResult r = solve_phi(oracles::f1_model(), Side::Plus, 100.0);
    EXPECT_NEAR(r.phi, 0.1, 1e-14);
    EXPECT_LE(r.residual, 1e-10);
}

TEST(ComputePhi, LinearShape)
{
    const PolarModel m = one_sided(ShapeU::power(0.0, 1.0, 1.0, 1.0));
    EXPECT_NEAR(compute_phi(m, Side::Plus, 50.0), 0.02, 1e-15);
}

TEST(ComputePhi, CosineShapeAgainstSmallAngleExpansion)
{
    const PolarModel m = one_sided(ShapeU::cosine(0.0));
    const PhiResult r = solve_phi(m, Side::Plus, 200.0);
    EXPECT_LE(r.residual, 1e-10);
    EXPECT_NEAR((1.0 - std::cos(r.phi)) * 200.0, 1.0, 1e-10);
    // 1 - cos φ = φ²/2 - φ⁴/24 + ..., so φ = √(2/200) (1 + φ²/24 + O(φ⁴)).
    const double first_order = std::sqrt(2.0 / 200.0);
    EXPECT_NEAR(r.phi, first_order, 1e-3);
    EXPECT_NEAR(r.phi / first_order - 1.0, first_order * first_order / 24.0, 1e-6);
}

TEST(ComputePhi, ResidualAndMonotoneInXForBuiltins)
{
    const std::vector<PolarModel> models = {
        oracles::f1_model(),
        one_sided(ShapeU::cosine(0.0), AngularLaw::symmetric_power(0.0, 1.0, 1.0),
                  RadialLaw::weibull_tail(2.0)),
        one_sided(ShapeU::power(0.0, 0.5, 0.5, 2.0), AngularLaw::uniform(-1.0, 1.0, 0.0),
                  RadialLaw::half_normal()),
    };
    for (const PolarModel& m : models) {
        double previous = INFINITY;
        for (double x : {10.0, 30.0, 100.0, 1e3}) {
            const PhiResult r = solve_phi(m, Side::Plus, x);
            EXPECT_LE(r.residual, 1e-10) << m.shape_u().describe() << " x=" << x;
            EXPECT_LT(r.phi, previous);
            previous = r.phi;
        }
    }
}

TEST(ComputePhi, UnresolvedShapeIsNonConvergence)
{
    // 1 - cos(s) carries absolute rounding of order 1e-16, so targets near 5e-9
    // cannot be met to relative 1e-10.
    const PolarModel m = one_sided(ShapeU::cosine(0.0), AngularLaw::symmetric_power(0.0, 1.0, 1.0),
                                   RadialLaw::weibull_tail(2.0));
    EXPECT_THROW(solve_phi(m, Side::Plus, 1e4), NonConvergence);
}

TEST(ComputePhi, InfeasibleSmallXIsBracketError)
{
    EXPECT_THROW(compute_phi(oracles::f1_model(), Side::Plus, 0.5), BracketError);
}

TEST(ComputePhi, NonMonotoneShapeIsMonotonicityError)
{
    const PolarModel m = one_sided(ShapeU::custom(
        0.0, [](double t) { return 1.0 - 0.25 * t * t * (2.0 + std::sin(50.0 * t)); }, 2.0, 2.0));
    EXPECT_THROW(compute_phi(m, Side::Plus, 100.0), MonotonicityError);
}

TEST(Normalizers, SumsAndStar)
{
    const PolarModel m = oracles::two_sided_power_model(1.0, 2.0);
    for (double x : {10.0, 100.0, 1e4}) {
        const Normalizers nz = compute_normalizers(m, x);
        ASSERT_TRUE(nz.phi_minus);
        EXPECT_EQ(nz.phi_star, *nz.phi_minus + nz.phi_plus);
        EXPECT_NEAR(nz.p_minus + nz.p_plus, 1.0, 1e-12);
        EXPECT_NEAR(nz.q_minus + nz.q_plus, 1.0, 1e-12);
        EXPECT_NEAR(*nz.phi_minus, 1.0 / x, 1e-12 / x);
        EXPECT_NEAR(nz.phi_plus, 1.0 / std::sqrt(x), 1e-12);
        EXPECT_LE(*nz.residual_minus, 1e-10);
    }
    const Normalizers one = compute_normalizers(oracles::f1_model(), 100.0);
    EXPECT_FALSE(one.phi_minus);
    EXPECT_EQ(one.p_plus, 1.0);
    EXPECT_EQ(one.q_plus, 1.0);
    EXPECT_EQ(one.phi_star, one.phi_plus);
}

TEST(MixtureP, SymmetricFixtureIsHalf)
{
    const MixtureEstimate p = mixture_p(oracles::two_sided_power_model(2.0, 2.0), kGrid);
    EXPECT_NEAR(p.plus, 0.5, 1e-12);
    EXPECT_NEAR(p.minus, 0.5, 1e-12);
    EXPECT_LE(p.max_change, 1e-12);
}

TEST(MixtureP, AsymmetricFixtureMatchesClosedFormRatio)
{
    const PolarModel m = oracles::two_sided_power_model(1.0, 2.0);
    const MixtureEstimate p = mixture_p(m, kGrid);
    const double x = kGrid.back();
    const double expected = std::pow(x, -0.5) / (1.0 / x + std::pow(x, -0.5));
    EXPECT_NEAR(p.plus, expected, 1e-9);
    EXPECT_NEAR(p.minus + p.plus, 1.0, 1e-12);
    EXPECT_GT(p.plus, 0.99);
}

TEST(RatioQ, EqualNormingsGiveHalf)
{
    const MixtureEstimate q = ratio_q(oracles::two_sided_power_model(2.0, 2.0), kGrid);
    EXPECT_NEAR(q.plus, 0.5, 1e-12);
}

TEST(RatioQ, AsymmetricFixtureTendsToOne)
{
    const MixtureEstimate q = ratio_q(oracles::two_sided_power_model(1.0, 2.0), kGrid);
    const double x = kGrid.back();
    EXPECT_NEAR(q.plus, std::pow(x, -0.5) / (1.0 / x + std::pow(x, -0.5)), 1e-9);
    EXPECT_NEAR(q.minus + q.plus, 1.0, 1e-12);
}

TEST(MixtureP, OscillatingShapeDoesNotConverge)
{
    // ũ₊(s) = s² exp(1.5 sin log s) is increasing but not regularly varying.
    auto u = [](double t) {
        if (t == 0.0) {
            return 1.0;
        }
        if (t < 0.0) {
            return 1.0 - t * t;
        }
        return 1.0 - t * t * std::exp(1.5 * std::sin(std::log(t)));
    };
    const PolarModel m = two_sided(ShapeU::custom(0.0, u, 2.0, 2.0));
    std::vector<double> grid;
    for (int k = 2; k <= 8; ++k) {
        grid.push_back(std::pow(10.0, k));
    }
    EXPECT_THROW(mixture_p(m, grid), NonConvergence);
    EXPECT_THROW(ratio_q(m, grid), NonConvergence);
}

TEST(MixtureP, PreconditionErrors)
{
    EXPECT_THROW(mixture_p(oracles::f1_model(), kGrid), PreconditionError);
    const std::vector<double> short_grid = {1e2, 1e3, 1e4};
    EXPECT_THROW(mixture_p(oracles::two_sided_power_model(2.0, 2.0), short_grid), PreconditionError);
    const std::vector<double> narrow = {100.0, 200.0, 300.0, 400.0};
    EXPECT_THROW(ratio_q(oracles::two_sided_power_model(2.0, 2.0), narrow), PreconditionError);
}

TEST(ClosedFormMixture, AgreesWithGridLimits)
{
    const PolarModel m =
        two_sided(ShapeU::power(0.0, 2.0, 2.0, 1.0),
                  AngularLaw::asymmetric_power(0.0, 0.0, 0.0, 0.7, 1.0));
    const auto limits = closed_form_mixture(m);
    ASSERT_TRUE(limits);
    EXPECT_NEAR(limits->p_plus, 0.7, 1e-12);
    EXPECT_NEAR(limits->q_plus, 0.5, 1e-12);
    EXPECT_NEAR(mixture_p(m, kGrid).plus, limits->p_plus, 1e-9);

    const auto asym = closed_form_mixture(oracles::two_sided_power_model(1.0, 2.0));
    ASSERT_TRUE(asym);
    EXPECT_EQ(asym->p_plus, 1.0);
    EXPECT_EQ(asym->q_plus, 1.0);
}

TEST(TailAsymptotic, F1AtHundred)
{
    const double derived = 0.1 * 0.5 * std::exp(-100.0) * 0.5 * std::sqrt(std::numbers::pi);
    const double value = tail_asymptotic(oracles::f1_model(), Side::Plus, 100.0);
    EXPECT_NEAR(value / derived, 1.0, 1e-12);
    EXPECT_NEAR(value, 1.6484e-45, 1e-49);
}

TEST(TailAsymptotic, F1ClosedFormIdentity)
{
    for (double x : {5.0, 10.0, 25.0, 50.0, 100.0, 300.0, 700.0}) {
        EXPECT_NEAR(tail_asymptotic(oracles::f1_model(), Side::Plus, x) /
                        oracles::f1_tail_asymptotic(x),
                    1.0, 1e-12)
            << "x=" << x;
    }
}

TEST(TailAsymptotic, LinearShapeUniformAngleHasNoGammaFactor)
{
    const PolarModel m = one_sided(ShapeU::power(0.0, 1.0, 1.0, 1.0));
    const double x = 40.0;
    const double phi = compute_phi(m, Side::Plus, x);
    EXPECT_NEAR(tail_asymptotic(m, Side::Plus, x) / (phi * 0.5 * std::exp(-x)), 1.0, 1e-14);
}

TEST(TailAsymptotic, PropagatesBracketError)
{
    EXPECT_THROW(tail_asymptotic(oracles::f1_model(), Side::Plus, 1.0), BracketError);
}
