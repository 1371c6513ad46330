#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bftavail/cli.hpp"
#include "oracles.hpp"

namespace bftavail {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bftavail");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bftavail_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({"solve", "--n", "3", "--f", "0", "--ratio", "0.015", "--manifest", path("m")}).code, kExitUsage);
  EXPECT_EQ(run({"solve", "--n", "4", "--f", "5", "--ratio", "0.015", "--manifest", path("m")}).code, kExitUsage);
  EXPECT_EQ(run({"solve", "--n", "4", "--f", "0", "--ratio", "-1", "--manifest", path("m")}).code, kExitUsage);
  EXPECT_EQ(run({"solve", "--n", "4", "--f", "0", "--ratio", "0.015", "--solver", "qr", "--manifest", path("m")}).code, kExitUsage);
  EXPECT_EQ(run({"solve", "--n", "4"}).code, kExitUsage);
  EXPECT_EQ(run({"solve", "--n", "4", "--f", "0", "--manifest", path("m")}).code, kExitUsage);
  EXPECT_EQ(run({"simulate", "--n", "7", "--f", "1", "--ratio", "0.015", "--reps", "0", "--manifest", path("m")}).code, kExitUsage);
  EXPECT_EQ(run({"sweep", "--dists", "fig9_x", "--out", path("x.csv"), "--manifest", path("m")}).code,
            kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, kExitUsage);
  EXPECT_FALSE(fs::exists(path("x.csv")));
}

TEST_F(CliTest, HelpSucceeds) { EXPECT_EQ(run({"--help"}).code, kExitOk); }

TEST_F(CliTest, SolveMatchesOracle) {
  const auto r = run({"solve", "--n", "4", "--f", "0", "--ratio", "0.015", "--solver", "both", "--out", path("s.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("availability (svd) = 0.997382140046"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("availability (replaced) = 0.997382140046"), std::string::npos);
  EXPECT_NE(r.out.find("difference = "), std::string::npos);
  EXPECT_TRUE(fs::exists(path("s.csv.manifest")));
  const auto csv = slurp(path("s.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,f,h,xi,eta,solver,availability");
}

TEST_F(CliTest, SolveBeyondToleranceIsZero) {
  const auto r = run({"solve", "--n", "4", "--f", "2", "--ratio", "0.015", "--manifest", path("m"), "--triplets", path("q.txt")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("= 0\n"), std::string::npos) << r.out;
  EXPECT_FALSE(slurp(path("q.txt")).empty());
}

TEST_F(CliTest, SweepIsReproducibleAndPlottable) {
  const std::vector<std::string> args = {"sweep", "--n-min", "4", "--n-max", "20", "--dists",
                                         "fig3_uniform,fig3_poisson,fig3_binomial,fig3_degenerate",
                                         "--solver", "replaced", "--out", path("a.csv")};
  ASSERT_EQ(run(args).code, kExitOk);
  const auto first = slurp(path("a.csv"));
  ASSERT_EQ(run(args).code, kExitOk);
  EXPECT_EQ(slurp(path("a.csv")), first);
  EXPECT_NE(slurp(path("a.csv.manifest")).find("command=sweep"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("a.csv.partial")));

  const auto p = run({"plot", "--csv", path("a.csv"), "--out", path("a.vl.json")});
  ASSERT_EQ(p.code, kExitOk) << p.err;
  EXPECT_NE(slurp(path("a.vl.json")).find("vega-lite"), std::string::npos);
}

TEST_F(CliTest, PlotRejectsEmptyCsv) {
  std::ofstream(path("empty.csv")).close();
  EXPECT_EQ(run({"plot", "--csv", path("empty.csv"), "--out", path("p.json"), "--manifest", path("m")}).code,
            kExitUsage);
  EXPECT_EQ(run({"plot", "--csv", path("missing.csv"), "--out", path("p.json"), "--manifest", path("m")}).code,
            kExitUsage);
  EXPECT_FALSE(fs::exists(path("p.json")));
}

TEST_F(CliTest, RatioSweep) {
  EXPECT_EQ(run({"ratio-sweep", "--n-min", "4", "--n-max", "8", "--ratios", "0.01,0.01", "--dist",
                 "fig3_degenerate", "--out", path("r.csv"), "--manifest", path("m")})
                .code,
            kExitUsage);
  ASSERT_EQ(run({"ratio-sweep", "--n-min", "4", "--n-max", "8", "--ratios", "0.01,0.02", "--dist",
                 "fig3_degenerate", "--out", path("r.csv")})
                .code,
            kExitOk);
  EXPECT_EQ(slurp(path("r.csv")).substr(0, 12), "N,0.01,0.02\n");
}

TEST_F(CliTest, Simulate) {
  const auto r = run({"simulate", "--n", "7", "--f", "1", "--xi", "0.02", "--eta", "1", "--horizon", "5000", "--reps", "4", "--out",
                      path("sim.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("z-score"), std::string::npos);
  const auto csv = slurp(path("sim.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "replication,availability");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

}  // namespace
}  // namespace bftavail
