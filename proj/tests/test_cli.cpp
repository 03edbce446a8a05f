#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "folin/io.hpp"
#include "support/paths.hpp"

using namespace folin;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "folin");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("folin_test_" + name)).string();
}

}  // namespace

TEST(Cli, CheckCstrFeasible) {
  const CliResult r = run({"check", data_file("cstr.json"), "--roots=-0.02"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("verdict: feasible"), std::string::npos);
  EXPECT_NE(r.out.find("beta_0: -0.05099999999999"), std::string::npos);
}

TEST(Cli, NegativeNumbersAsValues) {
  EXPECT_EQ(run({"check", data_file("cstr.json"), "--roots", "-0.02"}).code, 0);
}

TEST(Cli, CheckExample75Infeasible) {
  const CliResult r = run({"check", data_file("example75.json"), "--alpha", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("verdict: infeasible"), std::string::npos);
}

TEST(Cli, InputErrors) {
  const std::string bad = temp_path("bad.json");
  std::ofstream(bad) << R"json({"states": ["x"], "dynamics": ["x +"], "outputs": ["x"], "functional": "x",
                           "box": {"lower": [-1], "upper": [1]}})json";
  const CliResult r = run({"check", bad, "--alpha", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("offset 3"), std::string::npos);
  EXPECT_EQ(run({"check", "/nonexistent/file.json", "--alpha", "1"}).code, 1);
  EXPECT_EQ(run({"check", data_file("cstr.json")}).code, 1);
  EXPECT_EQ(run({"check", data_file("cstr.json"), "--roots=-1", "--joint"}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"check", data_file("cstr.json"), "--roots=-1", "--order", "2"}).code, 1);
  std::filesystem::remove(bad);
}

TEST(Cli, DesignCstrWritesObserver) {
  const std::string path = temp_path("cstr_obs.json");
  const CliResult r = run({"design", data_file("cstr.json"), "--roots=-0.02", "--out", path});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const LoadedSystem cstr = load_system(data_file("cstr.json"));
  const auto obs = std::get<ObserverLTI>(load_observer(path, cstr.model));
  const double b = 2 * 0.942 / 160000;
  EXPECT_NEAR(obs.A(0, 0), -0.02, 1e-8 * 0.02);
  EXPECT_NEAR(obs.B(0, 0), -b, 1e-8 * b);
  EXPECT_NEAR(obs.B(0, 1), b, 1e-8 * b);
  EXPECT_NEAR(obs.D(0, 0), -0.051, 1e-8 * 0.051);
  std::filesystem::remove(path);
}

TEST(Cli, DesignInfeasibleWritesNothing) {
  const std::string path = temp_path("none.json");
  std::filesystem::remove(path);
  EXPECT_EQ(run({"design", data_file("example75.json"), "--alpha", "1", "--out", path}).code, 2);
  EXPECT_FALSE(std::filesystem::exists(path));
}

TEST(Cli, DesignJointRecoversRate) {
  const CliResult r = run({"design", data_file("cstr.json"), "--joint", "--order", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("alpha: 0.0200000000"), std::string::npos);
}

TEST(Cli, LtiDoubleIntegrator) {
  const CliResult r = run({"design", data_file("dblint.json"), "--lti", "--roots=-3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("A: -3\n"), std::string::npos);
  EXPECT_NE(r.out.find("B: -9\n"), std::string::npos);
  EXPECT_NE(r.out.find("C: 1\n"), std::string::npos);
  EXPECT_NE(r.out.find("D: 3\n"), std::string::npos);
  EXPECT_EQ(run({"lti", data_file("dblint.json"), "--roots=-3"}).code, 0);
  EXPECT_EQ(run({"lti", data_file("dblint.json"), "--roots=-3,-4"}).code, 0);
  EXPECT_EQ(run({"design", data_file("cstr.json"), "--lti", "--roots=-3"}).code, 1);
}

TEST(Cli, SimulateCstrScenario) {
  const std::string obs = temp_path("cstr_obs2.json");
  const std::string csv = temp_path("cstr.csv");
  ASSERT_EQ(run({"design", data_file("cstr.json"), "--roots=-0.02", "-o", obs}).code, 0);
  const CliResult r = run({"simulate", data_file("cstr.json"), obs, "--scenario", data_file("cstr_startup.json"), "-o", csv});
  EXPECT_EQ(r.code, 0) << r.err;
  std::ifstream in(csv);
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header, "t,x1,x2,x3,x4,y1,y2,z,zhat,err,err_ref");
  EXPECT_EQ(first.substr(0, 2), "0,");
  EXPECT_EQ(second.substr(0, 5), "0.01,");
  EXPECT_EQ(first.substr(first.size() - 4), ",1,1");

  const CliResult c = run({"simulate", data_file("cstr.json"), obs, "--scenario", data_file("cstr_startup.json"),
                     "--consistent", "--t-end", "10"});
  EXPECT_EQ(c.code, 0);
  EXPECT_NE(c.out.find("initial error: 0\n"), std::string::npos);
  std::filesystem::remove(obs);
  std::filesystem::remove(csv);
}

TEST(Cli, SimulateExample77) {
  const CliResult r = run({"simulate", data_file("example75.json"), data_file("example75_general.json"), "--scenario",
                     data_file("example75_run.json")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, SimulateFailureMidRun) {
  const std::string sys = temp_path("blowup.json");
  const std::string obs = temp_path("blowup_obs.json");
  std::ofstream(sys) << R"json({"states": ["x"], "dynamics": ["-1"], "outputs": ["log(x)"], "functional": "x",
                           "box": {"lower": [0.5], "upper": [1]}})json";
  std::ofstream(obs) << R"json({"kind": "lti", "alpha": [1], "beta": [[0], [0]]})json";
  const CliResult r = run({"simulate", sys, obs, "--x0", "1", "--t-end", "2", "--dt", "0.01"});
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("t = 0.99"), std::string::npos);
  std::filesystem::remove(sys);
  std::filesystem::remove(obs);
}

TEST(Cli, VerifyGeneral) {
  EXPECT_EQ(run({"verify-general", data_file("example75.json"), data_file("example75_general.json"), "--tol",
                 "1e-10"})
                .code,
            0);
  const std::string flipped = temp_path("flipped.json");
  std::ofstream(flipped) << R"json({"kind": "general", "alpha": [1], "Z0": "z - y^2", "Z": ["y^3"], "inverse": "zeta + y^2"})json";
  EXPECT_EQ(run({"verify-general", data_file("example75.json"), flipped}).code, 2);
  std::ofstream(flipped) << R"json({"kind": "general", "alpha": [1], "Z0": "z - y^2", "Z": ["-y^3"]})json";
  EXPECT_EQ(run({"verify-general", data_file("example75.json"), flipped}).code, 1);
  std::filesystem::remove(flipped);
}

TEST(Cli, Deterministic) {
  const CliResult a = run({"check", data_file("cstr.json"), "--roots=-0.02", "--seed", "5"});
  const CliResult b = run({"check", data_file("cstr.json"), "--roots=-0.02", "--seed", "5"});
  EXPECT_EQ(a.out, b.out);
}
