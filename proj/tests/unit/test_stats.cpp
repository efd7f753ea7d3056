#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "polarlab/errors.hpp"
#include "polarlab/random.hpp"
#include "polarlab/stats.hpp"

using namespace polarlab;

TEST(KsTwoSample, Examples)
{
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{1.5, 2.5};
    EXPECT_DOUBLE_EQ(ks_two_sample(a, b).statistic, 0.5);
    EXPECT_DOUBLE_EQ(ks_two_sample(a, a).statistic, 0.0);
    EXPECT_DOUBLE_EQ(ks_two_sample(a, std::vector<double>{5.0, 6.0, 7.0}).statistic, 1.0);
}

TEST(KsTwoSample, TiesAreSteppedTogether)
{
    const std::vector<double> a{1.0, 1.0, 2.0, 2.0};
    const std::vector<double> b{1.0, 2.0};
    EXPECT_DOUBLE_EQ(ks_two_sample(a, b).statistic, 0.0);
}

TEST(KsTwoSample, SymmetricAndInvariantUnderMonotoneMaps)
{
    Rng rng(SeedStream{1, 0});
    std::vector<double> a(500);
    std::vector<double> b(700);
    for (double& v : a) {
        v = rng.normal();
    }
    for (double& v : b) {
        v = 0.1 + rng.normal();
    }
    const KsResult ab = ks_two_sample(a, b);
    const KsResult ba = ks_two_sample(b, a);
    EXPECT_EQ(ab.statistic, ba.statistic);
    EXPECT_EQ(ab.p_value, ba.p_value);
    std::vector<double> ea = a;
    std::vector<double> eb = b;
    for (double& v : ea) {
        v = std::exp(v);
    }
    for (double& v : eb) {
        v = std::exp(v);
    }
    EXPECT_EQ(ks_two_sample(ea, eb).statistic, ab.statistic);
}

TEST(KsTwoSample, PValueMatchesKolmogorovSeries)
{
    const std::vector<double> a{0.1, 0.4, 0.5, 0.9, 1.3, 1.7, 2.2, 2.4};
    const std::vector<double> b{0.2, 0.3, 0.6, 0.7, 0.8, 1.0, 1.1, 3.0, 3.5};
    const KsResult r = ks_two_sample(a, b);
    const double ne = 8.0 * 9.0 / 17.0;
    const double root = std::sqrt(ne);
    EXPECT_NEAR(r.p_value, oracles::kolmogorov_q((root + 0.12 + 0.11 / root) * r.statistic), 1e-10);
}

TEST(KsTwoSample, EmptySampleThrows)
{
    const std::vector<double> a{1.0};
    EXPECT_THROW(ks_two_sample(a, std::vector<double>{}), ParameterError);
}

TEST(KsOneSample, Examples)
{
    const std::vector<double> median{0.5};
    EXPECT_DOUBLE_EQ(ks_one_sample(median, [](double u) { return u; }).statistic, 0.5);
    const std::vector<double> some{0.2, 0.7};
    EXPECT_DOUBLE_EQ(ks_one_sample(some, [](double) { return 0.0; }).statistic, 1.0);
}

TEST(KsOneSample, UniformSamplesPassAtNominalRate)
{
    int rejected = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        Rng rng(SeedStream{100 + s, 0});
        std::vector<double> u(2000);
        for (double& v : u) {
            v = rng.uniform();
        }
        rejected += ks_one_sample(u, [](double x) { return x; }).p_value < 0.01;
    }
    EXPECT_LE(rejected, 8);
}

TEST(KsOneSample, Errors)
{
    const std::vector<double> a{0.1, 0.2};
    EXPECT_THROW(ks_one_sample(std::vector<double>{}, [](double x) { return x; }), ParameterError);
    EXPECT_THROW(ks_one_sample(a, [](double x) { return 2.0 * x + 1.0; }), ParameterError);
    EXPECT_THROW(ks_one_sample(a, [](double x) { return 1.0 - x; }), ParameterError);
}

TEST(ChiSquare, LimitSamplesPassAtNominalRate)
{
    const LimitLawOneSided law(2.0, 0.0);
    const Density2D density = as_density(law);
    const Binning binning = default_binning(law);
    int passed = 0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto pairs = sample_one_sided(law, 5000, SeedStream{300 + s, 0});
        passed += chi_square_2d(pairs, density, binning).p_value > 0.001;
    }
    EXPECT_GE(passed, 198);
}

TEST(ChiSquare, GrossMismatchIsRejected)
{
    const auto pairs = sample_one_sided(LimitLawOneSided(1.0, 0.0), 20000, SeedStream{2, 0});
    const LimitLawOneSided other(2.0, 1.0);
    const ChiSquareResult r = chi_square_2d(pairs, as_density(other), default_binning(other));
    EXPECT_LT(r.p_value, 1e-12);
}

TEST(ChiSquare, PValueMatchesBoost)
{
    const LimitLawOneSided law(1.0, 1.0);
    const auto pairs = sample_one_sided(law, 20000, SeedStream{3, 0});
    const ChiSquareResult r = chi_square_2d(pairs, as_density(law), default_binning(law));
    EXPECT_GT(r.cells, 2);
    EXPECT_EQ(r.dof, r.cells - 1);
    EXPECT_NEAR(r.p_value, oracles::chi_square_q(r.statistic, r.dof), 1e-9);
}

TEST(ChiSquare, TwoSidedBinning)
{
    const LimitLawTwoSided law({1.0, 0.0, 0.5, 0.5}, {2.0, 0.0, 0.5, 0.5}, Scaling::PerSignNorming);
    const Binning b = default_binning(law);
    EXPECT_LT(b.t_edges.front(), 0.0);
    EXPECT_GT(b.t_edges.back(), 0.0);
    const auto pairs = sample_two_sided(law, 20000, SeedStream{4, 0});
    EXPECT_GT(chi_square_2d(pairs, as_density(law), b).p_value, 0.001);
}

TEST(ChiSquare, Errors)
{
    const LimitLawOneSided law(2.0, 0.0);
    const auto pairs = sample_one_sided(law, 100, SeedStream{5, 0});
    Density2D zero = as_density(law);
    zero.density = [](double, double) { return 0.0; };
    EXPECT_THROW(chi_square_2d(pairs, zero, default_binning(law)), ParameterError);
    EXPECT_THROW(chi_square_2d(pairs, as_density(law), Binning{{0.0}, {0.0, 1.0}}), ParameterError);
    EXPECT_THROW(chi_square_2d(pairs, as_density(law), Binning{{0.0, 1.0}, {1.0, 1.0}}),
                 ParameterError);
}

TEST(ConvergenceReport, SingleRow)
{
    ReportConfig cfg;
    cfg.x_grid = {50.0};
    cfg.n = 5000;
    cfg.seed = SeedStream{6, 0};
    const ConvergenceReport r = convergence_report(oracles::f1_model(), cfg);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_EQ(r.rows[0].x, 50.0);
    EXPECT_EQ(r.rows[0].n, 5000u);
    EXPECT_LT(r.rows[0].ks_r, 0.05);
    EXPECT_LT(r.rows[0].ks_t, 0.05);
    EXPECT_TRUE(std::isnan(r.rows[0].ks_y));
    EXPECT_TRUE(r.ks_r_monotone && r.ks_t_monotone && r.tail_ratio_monotone);
}

TEST(ConvergenceReport, CorollaryColumn)
{
    const ShapeU u = ShapeU::power(0.0, 2.0, 2.0, 1.0);
    const PolarModel model(RadialLaw::exponential(1.0), AngularLaw::uniform(-1.0, 1.0, 0.0), u,
                           ShapeV::sine(0.0), Sidedness::OneSidedRight);
    ReportConfig cfg;
    cfg.x_grid = {100.0};
    cfg.n = 5000;
    cfg.seed = SeedStream{7, 0};
    cfg.corollary = CorollaryKind::FS;
    const ConvergenceReport r = convergence_report(model, cfg);
    EXPECT_LT(r.rows[0].ks_y, 0.05);
}

TEST(ConvergenceReport, FailingRowIsNamed)
{
    ReportConfig cfg;
    cfg.x_grid = {1e-9, 50.0};
    cfg.n = 100;
    cfg.seed = SeedStream{8, 0};
    try {
        convergence_report(oracles::two_sided_power_model(1.0, 2.0), cfg);
        FAIL() << "expected an error";
    } catch (const std::exception& e) {
        EXPECT_NE(std::string(e.what()).find("x=1e-09"), std::string::npos) << e.what();
    }
}

TEST(ConvergenceReport, Deterministic)
{
    ReportConfig cfg;
    cfg.x_grid = {20.0, 40.0};
    cfg.n = 2000;
    cfg.seed = SeedStream{9, 0};
    const auto a = convergence_report(oracles::f1_model(), cfg);
    cfg.workers = 3;
    const auto b = convergence_report(oracles::f1_model(), cfg);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].ks_r, b.rows[i].ks_r);
        EXPECT_EQ(a.rows[i].ks_t, b.rows[i].ks_t);
        EXPECT_EQ(a.rows[i].chi2_p, b.rows[i].chi2_p);
    }
}
