#include <fstream>

#include <gtest/gtest.h>

#include "cli_test_util.hpp"

namespace esaloha::test {
namespace {

const std::string kFive = (kSourceDir / "scenarios" / "five_user.json").string();
const std::string kPair = (kSourceDir / "scenarios" / "two_user.json").string();

TEST(Cli, AnalyzeWritesAPerUserTable) {
  const auto out = scratch("analyze.csv");
  const auto r = run_cli({"analyze", "--config", kPair, "--q", "0.25,0.2", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.diagnostics;
  const auto text = slurp(out);
  EXPECT_EQ(text.rfind("user,label,variant,role,p,q,throughput,energy,budget,slack\n", 0), 0u) << text;
  EXPECT_NE(text.find("\n,total,"), std::string::npos);
}

TEST(Cli, EveryCommandSucceedsOnTheFiveUserScenario) {
  const auto out = scratch("cmd.csv").string();
  const std::vector<std::vector<std::string>> commands{
      {"optimize", "--method", "alg1"},
      {"optimize", "--method", "fair"},
      {"optimize", "--method", "alg2"},
      {"optimize", "--method", "oracle", "--oracle-samples", "100"},
      {"game", "--variant", "original"},
      {"game", "--variant", "modified", "--enumerate"},
      {"game", "--variant", "modified", "--dynamics", "--seed-profile", "aggressive"},
      {"simulate", "--variant", "original", "--profile", "alg1", "--frames", "2000"},
      {"simulate", "--variant", "modified", "--profile", "alg2", "--frames", "2000", "--format", "json"},
      {"sweep", "--param", "c2", "--steps", "3"},
  };
  for (auto args : commands) {
    args.insert(args.end(), {"--config", kFive, "--out", out});
    const auto r = run_cli(args);
    EXPECT_EQ(r.code, 0) << args[0] << ": " << r.diagnostics;
    EXPECT_FALSE(slurp(out).empty());
  }
}

TEST(Cli, InvalidInputExitsWithTwo) {
  EXPECT_EQ(run_cli({"analyze", "--config", kPair}).code, 2);  // --q is required
  EXPECT_EQ(run_cli({"analyze", "--config", kPair, "--q", "0.5"}).code, 2);
  EXPECT_EQ(run_cli({"sweep", "--config", kPair, "--param", "c1"}).code, 2);
  EXPECT_EQ(run_cli({"sweep", "--config", kPair, "--steps", "1"}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);

  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{\"c1\": 50, \"c2\": 70, \"energy_budgets\": []}";
  const auto r = run_cli({"analyze", "--config", bad.string(), "--q", "0.1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.diagnostics.find("energy_budgets"), std::string::npos) << r.diagnostics;
}

TEST(Cli, GuardedSolverExitsWithTwoAndAllFailedSweepWithThree) {
  const auto big = scratch("big.json");
  std::ofstream(big) << R"({"c1": 50, "c2": 70, "energy_budgets": [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15]})";
  EXPECT_EQ(run_cli({"optimize", "--config", big.string(), "--method", "alg2"}).code, 2);
  const auto out = scratch("failed.csv");
  const auto r = run_cli({"sweep", "--config", big.string(), "--schemes", "modified_opt", "--steps", "2",
                          "--out", out.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(slurp(out).find(",guard\n"), std::string::npos);
}

TEST(Cli, IoProblemsExitWithFour) {
  EXPECT_EQ(run_cli({"analyze", "--config", "/nonexistent/x.json", "--q", "0.1"}).code, 4);
  EXPECT_EQ(run_cli({"analyze", "--config", kPair, "--q", "0.1,0.1", "--out", "/nonexistent/out.csv"}).code, 4);
}

TEST(Cli, OutputIsReproducibleAndThreadIndependent) {
  const auto a = scratch("sweep1.csv"), b = scratch("sweep4.csv"), c = scratch("sweep1b.csv");
  const std::vector<std::string> base{"sweep", "--config", kFive, "--param", "e1", "--steps", "8"};
  auto with = [&](const std::string& threads, const std::filesystem::path& out) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads, "--out", out.string()});
    return run_cli(args).code;
  };
  ASSERT_EQ(with("1", a), 0);
  ASSERT_EQ(with("4", b), 0);
  ASSERT_EQ(with("1", c), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a), slurp(c));

  const auto s1 = scratch("sim1.csv"), s4 = scratch("sim4.csv");
  for (const auto& [threads, path] : {std::pair{"1", s1}, std::pair{"4", s4}})
    ASSERT_EQ(run_cli({"simulate", "--config", kFive, "--profile", "alg1", "--frames", "5000",
                       "--threads", threads, "--out", path.string()})
                  .code,
              0);
  EXPECT_EQ(slurp(s1), slurp(s4));
}

}  // namespace
}  // namespace esaloha::test
