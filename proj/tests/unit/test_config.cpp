#include <gtest/gtest.h>

#include <functional>
#include <string>

#include "polarlab/config.hpp"
#include "polarlab/errors.hpp"

using namespace polarlab;

namespace {

std::string error_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const ParameterError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(KeyValueConfig, SectionsAndComments)
{
    const auto c = KeyValueConfig::parse("# top\n[radial]\nfamily = exponential\n\nrate=2 \n"
                                         "[angular]\n  family = uniform\nmodel.t0 = 0\n");
    EXPECT_EQ(c.require("radial.family"), "exponential");
    EXPECT_EQ(c.get_double("radial.rate", 0.0), 2.0);
    EXPECT_EQ(c.require("angular.family"), "uniform");
    EXPECT_TRUE(c.has("angular.model.t0"));
    EXPECT_FALSE(c.has("model.t0"));
}

TEST(KeyValueConfig, LaterValuesWinAndCanonicalIsSorted)
{
    auto c = KeyValueConfig::parse("b = 1\na = 2\nb = 3\n");
    EXPECT_EQ(c.require("b"), "3");
    EXPECT_EQ(c.canonical(), "a=2\nb=3\n");
    c.set("c", "x");
    EXPECT_EQ(c.entries().back().first, "c");
}

TEST(KeyValueConfig, ErrorsNameTheKey)
{
    const auto c = KeyValueConfig::parse("run.n = many\nrun.seed = -1\n");
    EXPECT_NE(error_of([&] { c.require("radial.family"); }).find("'radial.family'"),
              std::string::npos);
    EXPECT_NE(error_of([&] { c.get_double("run.n", 0.0); }).find("'run.n'"), std::string::npos);
    EXPECT_NE(error_of([&] { c.get_u64("run.seed", 0); }).find("'run.seed'"), std::string::npos);
    EXPECT_EQ(c.get_int("run.missing", 7), 7);
}

TEST(KeyValueConfig, MalformedLines)
{
    EXPECT_NE(error_of([] { KeyValueConfig::parse("no equals sign", "f.cfg"); }).find("f.cfg"),
              std::string::npos);
    EXPECT_THROW(KeyValueConfig::parse("[open\n"), ParameterError);
    EXPECT_THROW(KeyValueConfig::parse(" = 3\n"), ParameterError);
    EXPECT_THROW(KeyValueConfig::load("/nonexistent/polarlab.cfg"), ParameterError);
}

TEST(KeyValueConfig, UnknownKeys)
{
    const auto c = KeyValueConfig::parse("radial.family = exponential\nradial.rat = 1\n");
    EXPECT_NE(error_of([&] { c.check_keys(model_config_keys()); }).find("'radial.rat'"),
              std::string::npos);
    EXPECT_NO_THROW(c.check_keys({"radial.*"}));
}

TEST(ModelFromConfig, BuildsSpec)
{
    const auto c = KeyValueConfig::parse(
        "[model]\nsidedness = two_sided\nt0 = 0.25\n[radial]\nfamily = weibull_tail\nbeta = 2\n"
        "[angular]\nfamily = uniform\nlower = -0.75\nupper = 1.25\n"
        "[shape_u]\nfamily = power\nkappa_minus = 1\nkappa_plus = 3\n");
    const ModelSpec spec = model_spec_from_config(c);
    EXPECT_EQ(spec.sidedness, Sidedness::TwoSided);
    EXPECT_EQ(spec.t0, 0.25);
    EXPECT_EQ(spec.radial.family, "weibull_tail");
    EXPECT_EQ(spec.radial.beta, 2.0);
    EXPECT_EQ(spec.shape_u.kappa_minus, 1.0);
    EXPECT_EQ(spec.shape_u.kappa_plus, 3.0);
    EXPECT_EQ(spec.shape_v.family, "none");

    const auto k = KeyValueConfig::parse(
        "radial.family = exponential\nangular.family = uniform\nshape_u.family = power\n"
        "shape_u.kappa = 4\n");
    const ModelSpec s2 = model_spec_from_config(k);
    EXPECT_EQ(s2.shape_u.kappa_minus, 4.0);
    EXPECT_EQ(s2.shape_u.kappa_plus, 4.0);
}

TEST(ModelFromConfig, MissingFamily)
{
    const auto c = KeyValueConfig::parse("angular.family = uniform\nshape_u.family = power\n");
    EXPECT_NE(error_of([&] { model_spec_from_config(c); }).find("'radial.family'"),
              std::string::npos);
    const auto bad = KeyValueConfig::parse("radial.family = exponential\nangular.family = uniform\n"
                                           "shape_u.family = power\nmodel.sidedness = both\n");
    EXPECT_NE(error_of([&] { model_spec_from_config(bad); }).find("model.sidedness"),
              std::string::npos);
}

TEST(Fnv1a, KnownValues)
{
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}
