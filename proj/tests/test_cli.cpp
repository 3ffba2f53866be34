#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <string>

#include "owl/io.hpp"

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result owl_cli(const std::string& args) {
  const std::string cmd = std::string(OWL_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

owl::json report(const Result& r) { return owl::json::parse(r.out); }

}  // namespace

TEST(Cli, VerifySequenceSucceeds) {
  const auto r = owl_cli("verify-seq --height 5 --no-timing");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = report(r);
  EXPECT_EQ(j["command"], "verify-seq");
  EXPECT_EQ(j["result"]["ok"], true);
  EXPECT_EQ(j["result"]["N"], 15);
  EXPECT_EQ(j["exit_code"], 0);
  EXPECT_FALSE(j.contains("timing_ms"));
}

TEST(Cli, PumpFindsCounterexample) {
  const auto r = owl_cli("pump --machine accept_all --height 3 --index 1 --no-timing");
  ASSERT_EQ(r.code, 1) << r.out;
  const auto j = report(r);
  EXPECT_EQ(j["result"]["status"], "counterexample");
  EXPECT_EQ(j["result"]["counterexample"]["t_star"], 1);
}

TEST(Cli, PumpOnSolverFindsNothing) {
  const auto r = owl_cli("pump --machine subset:2 --index 2 --no-timing");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(report(r)["result"]["status"], "not_found");
}

TEST(Cli, MalformedMachineIsRejected) {
  const auto r = owl_cli("run --machine " OWL_TEST_DATA_DIR "/moves_left_off_lend.json --input 2:9");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("delta.s.LEND: moves left off LEND"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(owl_cli("pump --machine subset:2").code, 2);
  EXPECT_EQ(owl_cli("no-such-command").code, 2);
  EXPECT_EQ(owl_cli("run --machine subset:2 --input 3:0").code, 2);
  EXPECT_EQ(owl_cli("pump --machine subset:2 --index 9").code, 2);
}

TEST(Cli, RunSampleMachine) {
  const auto r = owl_cli("run --machine " OWL_SAMPLES_DIR "/machines/sweep_h2.json --input " OWL_SAMPLES_DIR
                         "/string_h2.json --no-timing");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = report(r);
  EXPECT_EQ(j["result"]["decision"], "accept");
  EXPECT_EQ(j["result"]["live"], false);
}

TEST(Cli, FuzzFindsBrokenSolver) {
  const auto r = owl_cli("fuzz --machine broken:2:1 --max-len 3 --exhaustive --no-timing");
  EXPECT_EQ(r.code, 1) << r.out;
  EXPECT_EQ(report(r)["result"]["status"], "counterexample");
}

TEST(Cli, SequenceTextOutput) {
  const auto r = owl_cli("seq --height 5 --kind \"E'\" --index 8 --text");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "00000\n00111\n00000\n00000\n00000\n");
}

TEST(Cli, OutputIsByteIdenticalAcrossRunsAndJobs) {
  for (const std::string args : {"chain --machine subset:2", "pump --machine broken:3:1 --index 2",
                                 "fuzz --machine broken:4:2 --max-len 5 --samples 2000 --seed 3"}) {
    const auto a = owl_cli(args + " --no-timing --jobs 1");
    const auto b = owl_cli(args + " --no-timing --jobs 1");
    EXPECT_EQ(a.out, b.out) << args;
    const auto c = owl_cli(args + " --no-timing --jobs 4");
    auto ja = report(a);
    auto jc = report(c);
    ja["config"].erase("jobs");
    jc["config"].erase("jobs");
    EXPECT_EQ(ja.dump(), jc.dump()) << args;
  }
}
