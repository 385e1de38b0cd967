#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mixsat/instance_io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "mixsat_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& out = "out.txt") {
  const std::string cmd = std::string(MIXSAT_CLI_PATH) + " " + args + " > " + (workdir() / out).string() + " 2> " +
                          (workdir() / "err.txt").string();
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string read(const std::string& name) {
  std::ifstream in(workdir() / name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST(Cli, GenThenSolve) {
  ASSERT_EQ(run("gen -N 100 --alpha 0.6 --beta 0.5 --seed 7 -o " + path("inst.json")), 0);
  const auto inst = mixsat::load_instance(path("inst.json"));
  EXPECT_EQ(inst.n_qubits(), 100u);
  ASSERT_EQ(run("solve " + path("inst.json")), 0);
  const auto out = read("out.txt");
  EXPECT_TRUE(out.rfind("SAT", 0) == 0 || out.rfind("UNSAT", 0) == 0) << out;
  EXPECT_NE(out.find("solver_path="), std::string::npos);
}

TEST(Cli, SameSeedSameInstance) {
  ASSERT_EQ(run("gen -N 50 --alpha 0.8 --beta 0.3 --seed 3", "a.json"), 0);
  ASSERT_EQ(run("gen -N 50 --alpha 0.8 --beta 0.3 --seed 3", "b.json"), 0);
  EXPECT_EQ(read("a.json"), read("b.json"));
}

TEST(Cli, MissingSeedIsReported) {
  ASSERT_EQ(run("gen -N 20 --alpha 0.5 --beta 0.5", "c.json"), 0);
  EXPECT_NE(read("err.txt").find("seed: "), std::string::npos);
}

TEST(Cli, UnsatIsNotAnError) {
  ASSERT_EQ(run("gen -N 500 --alpha 2 --beta 0 --seed 1 -o " + path("hard.json")), 0);
  ASSERT_EQ(run("solve --format json " + path("hard.json")), 0);
  EXPECT_NE(read("out.txt").find("UNSAT"), std::string::npos);
}

TEST(Cli, SnipAndCensus) {
  ASSERT_EQ(run("gen -N 300 --alpha 0.7 --beta 1 --seed 2 -o " + path("q.json")), 0);
  ASSERT_EQ(run("snip " + path("q.json") + " -o " + path("core.json")), 0);
  EXPECT_NE(read("out.txt").find("cyclomatic"), std::string::npos);
  ASSERT_EQ(run("census --core " + path("core.json")), 0);
  const auto rows = lines(read("out.txt"));
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0].rfind("component,", 0), 0u);
}

TEST(Cli, BoundaryTable) {
  ASSERT_EQ(run("theory --boundary --beta-steps 101 -o " + path("boundary.csv")), 0);
  const auto rows = lines(read("boundary.csv"));
  ASSERT_EQ(rows.size(), 102u);
  EXPECT_EQ(rows[0], "beta,alpha_c,lambda_plus");
  EXPECT_EQ(rows[1].substr(0, 4), "0,1,");
  EXPECT_EQ(rows[101].substr(0, 6), "1,0.5,");
}

TEST(Cli, SweepResumeIdentical) {
  std::ofstream(path("sweep.json")) << R"({"betas": [0.0, 1.0], "alphas": [0.4, 0.5, 0.6, 0.7],
    "sizes": [100, 200], "trials": 15, "seed": 8})";
  ASSERT_EQ(run("sweep -q --config " + path("sweep.json") + " -o " + path("full.csv")), 0);
  const auto full = read("full.csv");
  ASSERT_EQ(lines(full).size(), 17u);
  ASSERT_EQ(run("sweep -q --config " + path("sweep.json") + " -o " + path("part.csv")), 0);
  fs::resize_file(path("part.csv"), full.size() / 3);
  ASSERT_EQ(run("sweep -q --resume --config " + path("sweep.json") + " -o " + path("part.csv")), 0);
  EXPECT_EQ(read("part.csv"), full);
}

TEST(Cli, CollapseAndCrossings) {
  std::ofstream(path("c.json")) << R"({"betas": [1.0], "alphas": [0.4, 0.5, 0.6, 0.7, 0.8],
    "sizes": [100, 200, 400], "trials": 40, "seed": 1})";
  ASSERT_EQ(run("sweep -q --config " + path("c.json") + " -o " + path("c.csv")), 0);
  ASSERT_EQ(run("collapse " + path("c.csv") + " --beta 1 --exponent 0.25,0.3333333333,0.5"), 0);
  EXPECT_FALSE(read("out.txt").empty());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("gen --alpha 0.5"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  // p > 1 is a domain error
  EXPECT_EQ(run("gen -N 3 --alpha 5 --beta 0 --seed 1"), 1);
  std::ofstream(path("bad.json")) << "{\"format_version\": 1";
  EXPECT_EQ(run("solve " + path("bad.json")), 1);
  EXPECT_EQ(run("theory --boundary --loops 5"), 2);
}

TEST(Cli, SelftestSubset) {
  EXPECT_EQ(run("selftest --criterion 1,2 --format csv"), 0);
  const auto rows = lines(read("out.txt"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].rfind("1,", 0), 0u);
  EXPECT_NE(rows[1].find(",1,"), std::string::npos);
  EXPECT_EQ(run("selftest --criterion 1"), 0);
  EXPECT_EQ(read("out.txt").rfind("PASS", 0), 0u);
}
