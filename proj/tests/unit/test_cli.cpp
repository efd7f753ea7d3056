#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    Result r;
    r.code = polarlab::cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string config(const std::string& name)
{
    return std::string(POLARLAB_CONFIG_DIR) + "/" + name;
}

std::string write_temp(const std::string& name, const std::string& text)
{
    const std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST(Cli, VerifyPassesOnF1)
{
    const Result r = run({"verify", "--config", config("f1.cfg"), "--seed", "2024"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("verify: all thresholds pass"), std::string::npos);
    EXPECT_NE(r.out.find("# check PASS final ks_r <= 0.03"), std::string::npos) << r.out;
}

TEST(Cli, HeaderFields)
{
    const Result r = run({"phi", "--config", config("f1.cfg"), "--x-grid", "10,100"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("# command=phi\n", 0), 0u);
    EXPECT_NE(r.out.find("# version="), std::string::npos);
    EXPECT_NE(r.out.find("# config_hash="), std::string::npos);
    EXPECT_NE(r.out.find("# seed=none"), std::string::npos);
    EXPECT_NE(r.out.find("# config.radial.family=exponential"), std::string::npos);
    EXPECT_NE(r.out.find("x,psi,phi_minus,phi_plus,phi_star,residual_minus,residual_plus\n"),
              std::string::npos);
    EXPECT_NE(r.out.find("\n100,1,"), std::string::npos);
}

TEST(Cli, MissingFamilyIsUsageError)
{
    const std::string path =
        write_temp("no_radial.cfg", "[angular]\nfamily = uniform\n[shape_u]\nfamily = power\n");
    const Result r = run({"validate", "--config", path});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("radial.family"), std::string::npos) << r.err;
}

TEST(Cli, UnknownKeyIsUsageError)
{
    const std::string path = write_temp(
        "typo.cfg", "[radial]\nfamily = exponential\nrat = 2\n[angular]\nfamily = uniform\n"
                    "[shape_u]\nfamily = power\n");
    const Result r = run({"phi", "--config", path, "--x", "10"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("radial.rat"), std::string::npos) << r.err;
}

TEST(Cli, StochasticCommandNeedsSeed)
{
    const Result r = run({"simulate", "--config", config("f1.cfg"), "--x", "10"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("seed"), std::string::npos) << r.err;
}

TEST(Cli, InfeasibleXIsNumericError)
{
    const Result r = run({"phi", "--config", config("asymmetric.cfg"), "--x", "0.001"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("x=0.001"), std::string::npos) << r.err;
}

TEST(Cli, BadFlagIsUsageError)
{
    EXPECT_EQ(run({"simulate", "--workers", "0"}).code, 2);
    EXPECT_EQ(run({"nonsense"}).code, 2);
}

TEST(Cli, ValidateReportsFailures)
{
    const Result ok = run({"validate", "--config", config("f1.cfg")});
    EXPECT_EQ(ok.code, 0) << ok.err;
    EXPECT_NE(ok.out.find("assumption,check,passed,measured,declared,margin,detail"),
              std::string::npos);
    const std::string path = write_temp(
        "wide.cfg", "[radial]\nfamily = exponential\n[angular]\nfamily = uniform\n"
                         "lower = -7\nupper = 7\n[shape_u]\nfamily = cosine\n");
    const Result bad = run({"validate", "--config", path});
    EXPECT_EQ(bad.code, 1) << bad.err;
}

TEST(Cli, OutputIsByteIdenticalAcrossWorkers)
{
    auto simulate = [](const char* workers) {
        return run({"simulate", "--config", config("fs_sine.cfg"), "--seed", "7", "--x", "50",
                    "--n", "3000", "--case", "fs", "--workers", workers});
    };
    const Result a = simulate("1");
    const Result b = simulate("4");
    const Result c = simulate("4");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(b.out, c.out);
    EXPECT_NE(a.out.find("R,T,r_norm,t_norm,x1,x2\n"), std::string::npos);
}

TEST(Cli, TailprobMethods)
{
    const Result quad = run({"tailprob", "--config", config("f1.cfg"), "--x-grid", "10"});
    ASSERT_EQ(quad.code, 0) << quad.err;
    EXPECT_NE(quad.out.find("# method=quad"), std::string::npos);
    const Result mc = run({"tailprob", "--config", config("f1.cfg"), "--x-grid", "10", "--method",
                           "mc", "--n", "100000", "--seed", "3"});
    ASSERT_EQ(mc.code, 0) << mc.err;
    EXPECT_NE(mc.out.find("x,value,std_error\n10,"), std::string::npos);
    EXPECT_EQ(run({"tailprob", "--config", config("f1.cfg"), "--method", "bogus"}).code, 2);
}

TEST(Cli, WritesOutFile)
{
    const std::string path = ::testing::TempDir() + "limit.csv";
    const Result r = run({"limit-sample", "--config", config("f1.cfg"), "--seed", "1", "--n", "10",
                          "--out", path});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    EXPECT_NE(text.str().find("r,t\n"), std::string::npos);
}
