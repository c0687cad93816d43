#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fpp/cli/commands.hpp"
#include "fpp/cli/config.hpp"
#include "fpp/cli/suites.hpp"
#include "fpp/errors.hpp"

namespace fs = std::filesystem;

namespace fpp::cli {
namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fpp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fpp_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ::setenv("FPP_THREADS", "1", 1);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& sub) const { return (dir_ / sub).string(); }
  fs::path dir_;
};

TEST_F(Cli, RunPointMassMeanIsN) {
  const auto r = cli({"run", "--quantity", "a0n", "--dist", "point_mass:c=1", "--n", "8,16", "--replicas", "4",
                      "--seed", "7", "--out", path("pm")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "pm" / "summary.json"));
  ASSERT_EQ(j["ensembles"].size(), 2u);
  for (const auto& e : j["ensembles"]) {
    EXPECT_EQ(e["mean"].get<double>(), e["n"].get<double>());
    EXPECT_EQ(e["var"].get<double>(), 0.0);
    EXPECT_EQ(e["N"].get<int>(), 4);
    EXPECT_EQ(e["quantity"], "a0n");
    EXPECT_TRUE(e.contains("tails") && e.contains("fit") && e.contains("moments"));
  }
  EXPECT_EQ(j["config"]["seed"].get<int>(), 7);
  EXPECT_EQ(j["config"]["dist"], "point_mass:c=1");
  const std::string csv = slurp(dir_ / "pm" / "ensemble.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "quantity,n,replica,seed,value,path_len,max_edge");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
  const std::string gp = slurp(dir_ / "pm" / "plots.gp");
  EXPECT_NE(gp.find("variance_vs_n.png"), std::string::npos);
  EXPECT_NE(gp.find("tails.png"), std::string::npos);
  EXPECT_NE(gp.find("Azuma"), std::string::npos);
}

TEST_F(Cli, RerunIsByteIdentical) {
  const std::vector<std::string> base{"run", "--dist", "exponential:rate=1", "--n", "8,12", "--replicas", "6"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"--seed", "11", "--out", path("a")});
  b.insert(b.end(), {"--seed", "11", "--out", path("b"), "--threads", "3"});
  c.insert(c.end(), {"--seed", "12", "--out", path("c")});
  ASSERT_EQ(cli(a).code, 0);
  ASSERT_EQ(cli(b).code, 0);
  ASSERT_EQ(cli(c).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "ensemble.csv"), slurp(dir_ / "b" / "ensemble.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "summary.json"), slurp(dir_ / "b" / "summary.json"));
  EXPECT_NE(slurp(dir_ / "a" / "ensemble.csv"), slurp(dir_ / "c" / "ensemble.csv"));
}

TEST_F(Cli, ValidationErrorsExitTwo) {
  EXPECT_EQ(cli({"run", "--dist", "pareto:alpha=0.9,scale=1", "--n", "8", "--out", path("x")}).code, 2);
  EXPECT_EQ(cli({"run", "--epsilon", "7", "--n", "8", "--out", path("x")}).code, 2);
  EXPECT_EQ(cli({"run", "--delta", "1", "--n", "8", "--out", path("x")}).code, 2);
  EXPECT_EQ(cli({"run", "--n", "8,x", "--out", path("x")}).code, 2);
  EXPECT_EQ(cli({"run", "--quantity", "bogus", "--out", path("x")}).code, 2);
  EXPECT_EQ(cli({"run", "--replicas", "0", "--out", path("x")}).code, 2);
  EXPECT_EQ(cli({"run", "--no-such-flag"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
  const auto r = cli({"run", "--dist", "pareto:alpha=0.9,scale=1", "--n", "8", "--out", path("x")});
  EXPECT_NE(r.err.find("alpha"), std::string::npos);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(Cli, CapacityErrorExitsThree) {
  const auto r = cli({"run", "--n", "8,1000", "--replicas", "2", "--max-vertices", "5000", "--out", path("x")});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("n = 1000"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "x" / "ensemble.csv"));
}

TEST_F(Cli, ConfigFileAndOverrides) {
  std::ofstream(dir_ / "exp.cfg") << "# experiment\nn = 8\ndist = point_mass:c=2\nreplicas = 3  # three\nM = 5\n";
  const auto r = cli({"run", "--config", path("exp.cfg"), "--replicas", "2", "--out", path("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "o" / "summary.json"));
  EXPECT_EQ(j["config"]["replicas"].get<int>(), 2);
  EXPECT_EQ(j["config"]["M"].get<double>(), 5.0);
  EXPECT_EQ(j["ensembles"][0]["mean"].get<double>(), 16.0);
  std::ofstream(dir_ / "bad.cfg") << "n = 8\nwhat = 3\n";
  const auto bad = cli({"run", "--config", path("bad.cfg"), "--out", path("o")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("bad.cfg:2"), std::string::npos);
  EXPECT_EQ(cli({"run", "--config", path("missing.cfg")}).code, 2);
}

TEST_F(Cli, ThreadsEnvironmentVariable) {
  ::setenv("FPP_THREADS", "zero", 1);
  EXPECT_EQ(cli({"run", "--n", "8", "--replicas", "2", "--out", path("t")}).code, 2);
  ::setenv("FPP_THREADS", "2", 1);
  EXPECT_EQ(default_threads(), 2u);
  ::unsetenv("FPP_THREADS");
  EXPECT_GE(default_threads(), 1u);
}

TEST_F(Cli, VerifySuites) {
  const auto l2 = cli({"verify", "lemma2", "--n", "32", "--replicas", "10", "--dist", "exponential:rate=1", "--seed",
                       "1"});
  EXPECT_EQ(l2.code, 0) << l2.out;
  EXPECT_NE(l2.out.find("identity: 10/10 pass"), std::string::npos) << l2.out;
  const auto l1 = cli({"verify", "lemma1", "--dist", "point_mass:c=1", "--n", "16", "--replicas", "3"});
  EXPECT_EQ(l1.code, 0);
  EXPECT_NE(l1.out.find("ALL SKIPPED"), std::string::npos);
  const auto unknown = cli({"verify", "lemma4"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("lemma4"), std::string::npos);
  EXPECT_EQ(cli({"verify"}).code, 2);
}

TEST(Suites, EverySuiteRunsAndPasses) {
  ExperimentConfig cfg;
  cfg.n_list = {16};
  cfg.replicas = 4;
  cfg.seed = 5;
  for (const auto& name : suite_names()) {
    const SuiteReport r = verify_suite(name, cfg);
    EXPECT_TRUE(r.passed()) << r.text();
    EXPECT_EQ(r.configurations, 4u);
    EXPECT_FALSE(r.checks.empty());
  }
  EXPECT_THROW(verify_suite("nope", cfg), ConfigError);
  SuiteReport failing;
  failing.checks.push_back(CheckTally{"x", 3, 1, 0, {}});
  EXPECT_EQ(failing.exit_code(), 4);
  EXPECT_FALSE(failing.all_skipped());
  EXPECT_THROW(verify_suite("lemma2", cfg).check("nope"), DomainError);
}

TEST(Suites, Deterministic) {
  ExperimentConfig cfg;
  cfg.n_list = {16};
  cfg.replicas = 5;
  const auto a = verify_suite("sandwich", cfg).text();
  cfg.threads = 2;
  EXPECT_EQ(verify_suite("sandwich", cfg).text(), a);
}

TEST_F(Cli, MartingaleWritesTrace) {
  const auto r = cli({"martingale", "--n", "8", "--replicas", "4", "--inner-replicas", "4", "--seed", "2", "--out",
                      path("m")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "m" / "martingale.json"));
  EXPECT_EQ(j["N"].get<int>(), 4);
  EXPECT_EQ(j["max_telescoping_residual"].get<double>(), 0.0);
  EXPECT_LT(j["collapse"]["max_abs"].get<double>(), 1e-9);
  EXPECT_EQ(j["per_k"][0]["k"].get<int>(), -1);
  const std::string csv = slurp(dir_ / "m" / "martingale.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,replica,seed,k,mean,std_error,frozen_vertices,increment");
  const auto pm = cli({"martingale", "--n", "8", "--replicas", "3", "--inner-replicas", "2", "--dist",
                       "point_mass:c=1", "--out", path("pm")});
  ASSERT_EQ(pm.code, 0) << pm.err;
  const auto jp = nlohmann::json::parse(slurp(dir_ / "pm" / "martingale.json"));
  EXPECT_EQ(jp["max_abs_difference"].get<double>(), 0.0);
  EXPECT_TRUE(jp["azuma"].is_null());
  EXPECT_EQ(cli({"martingale", "--n", "8", "--replicas", "1", "--out", path("m1")}).code, 2);
}

TEST_F(Cli, ReportPointMassAndSweep) {
  ASSERT_EQ(cli({"run", "--dist", "point_mass:c=1", "--n", "8", "--replicas", "3", "--out", path("r/pm")}).code, 0);
  const auto pm = cli({"report", path("r/pm")});
  ASSERT_EQ(pm.code, 0) << pm.err;
  EXPECT_NE(pm.out.find("zero variance"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "r" / "pm" / "report.md"));

  ASSERT_EQ(cli({"run", "--quantity", "T_box", "--dist", "exponential:rate=1", "--n", "8,12,16,24", "--replicas", "30",
                 "--transverse", "10", "--pad-factor", "0.5", "--out", path("r/sweep")})
                .code,
            0);
  const auto sweep = cli({"report", path("r/sweep")});
  ASSERT_EQ(sweep.code, 0) << sweep.err;
  const auto j = nlohmann::json::parse(slurp(dir_ / "r" / "sweep" / "summary.json"));
  ASSERT_FALSE(j["variance_scaling"].is_null());
  const double gamma = j["variance_scaling"]["params"]["gamma"].get<double>();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", gamma);
  EXPECT_NE(sweep.out.find(std::string("| ") + buf + " |"), std::string::npos) << sweep.out;
  EXPECT_NE(sweep.out.find("Tau-equality rates"), std::string::npos);
  EXPECT_FALSE(j["time_constant"].is_null());
  EXPECT_EQ(j["ensembles"][0]["tau_mismatch"]["N"].get<int>(), 30);
}

TEST_F(Cli, ReportErrors) {
  fs::create_directories(dir_ / "empty");
  EXPECT_EQ(cli({"report", path("empty")}).code, 2);
  EXPECT_EQ(cli({"report", path("does-not-exist")}).code, 2);
  fs::create_directories(dir_ / "bad");
  std::ofstream(dir_ / "bad" / "summary.json") << "{\"ensembles\": [";
  const auto r = cli({"report", path("bad")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("summary.json"), std::string::npos);
}

#ifdef FPP_BINARY
int run_binary(const std::string& args) {
  const std::string cmd = std::string(FPP_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(Cli, BinaryExitCodes) {
  EXPECT_EQ(run_binary("run --dist point_mass:c=1 --n 8 --replicas 2 --out " + path("b")), 0);
  EXPECT_EQ(run_binary("run --dist pareto:alpha=0.9,scale=1 --n 8 --out " + path("b")), 2);
  EXPECT_EQ(run_binary("run --n 2000 --replicas 2 --max-vertices 100 --out " + path("b")), 3);
  EXPECT_EQ(run_binary("verify lemma2 --n 16 --replicas 2"), 0);
  EXPECT_EQ(run_binary("verify nope"), 2);
}
#endif

}  // namespace
}  // namespace fpp::cli
