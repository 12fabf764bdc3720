#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "'" BRANCHGRP_CLI_PATH "' " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, f)) out.append(buf, n);
  int status = pclose(f);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string word_file(const std::string& name, const std::string& text) {
  auto dir = std::filesystem::temp_directory_path() / "branchgrp_cli_test";
  std::filesystem::create_directories(dir);
  auto path = dir / name;
  std::ofstream(path) << text;
  return "'" + path.string() + "'";
}

}  // namespace

TEST_CASE("wp") {
  auto r = run("wp " + word_file("empty.w", ""));
  CHECK(r.code == 0);
  CHECK(r.out == "trivial (ℓ=0)\n");

  r = run("wp " + word_file("b.w", "B((x@1 y@1 z@1))\n"));
  CHECK(r.code == 0);
  CHECK(r.out.rfind("nontrivial, witness depth 1", 0) == 0);

  r = run("wp " + word_file("t.w", "H(t|()) "));
  CHECK(r.code == 0);
  CHECK(r.out.find("witness depth 2") != std::string::npos);
  bool under_yz = r.out.find("witness y@1") != std::string::npos || r.out.find("witness z@1") != std::string::npos;
  CHECK(under_yz);

  r = run("wp " + word_file("comm.w", "B((q0@1 q1@1 p@1)) H(t|(x o p)) B((q0@1 q1@1 p@1))' H(t|(x o p))'"));
  CHECK(r.code == 0);
  CHECK(r.out == "trivial (ℓ=4)\n");

  r = run("--format json wp " + word_file("t2.w", "H(t|())"));
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["trivial"] == false);
  CHECK(j["witness"].size() == 2);
}

TEST_CASE("exit codes") {
  CHECK(run("wp " + word_file("bad.w", "H(t|()) B((x@1 y@1")).code == 2);
  CHECK(run("wp " + word_file("odd.w", "B((x@1 y@1))")).code == 2);
  CHECK(run("wp /nonexistent/file").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("--group nosuchgroup chain 1").code == 2);
  CHECK(run("--depth-cap 1 wp " + word_file("t3.w", "H(t|())")).code == 3);
  CHECK(run("wp " + word_file("t4.w", "H(t|())"), "BRANCHGRP_DEPTH_CAP=1").code == 3);
  // the flag wins over the environment
  CHECK(run("--depth-cap 4 wp " + word_file("t5.w", "H(t|())"), "BRANCHGRP_DEPTH_CAP=1").code == 0);
  CHECK(run("verify nosuchsuite").code == 2);
}

TEST_CASE("parse errors name the token") {
  std::string cmd = "'" BRANCHGRP_CLI_PATH "' wp " + word_file("bad2.w", "H(t|()) H(|(x y))") + " 2>&1";
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f != nullptr);
  char buf[512] = {};
  std::size_t n = std::fread(buf, 1, sizeof buf - 1, f);
  pclose(f);
  CHECK(std::string(buf, n).find("token 1") != std::string::npos);
}

TEST_CASE("portrait") {
  std::string w = word_file("xyz.w", "H(|(x y z))");
  auto a = run("portrait --depth 2 " + w);
  CHECK(a.code == 0);
  CHECK(a.out.find("z@1 : (x@2 y@2 z@2)\n") != std::string::npos);
  CHECK(a.out == run("portrait --depth 2 " + w).out);
  auto dot = run("--format dot portrait --depth 2 " + w);
  CHECK(dot.out.rfind("digraph", 0) == 0);
  CHECK(dot.out == run("--format dot portrait --depth 2 " + w).out);

  auto id = run("portrait --depth 2 " + word_file("id.w", "H(t|()) H(t|())'"));
  std::size_t lines = 0, trivial = 0;
  for (std::size_t pos = 0; (pos = id.out.find('\n', pos)) != std::string::npos; ++pos) ++lines;
  for (std::size_t pos = 0; (pos = id.out.find(" : ()\n", pos)) != std::string::npos; ++pos) ++trivial;
  CHECK(lines == trivial + 1);
  CHECK(run("--depth-cap 2 portrait --depth 3 " + w).code == 3);
}

TEST_CASE("conj") {
  auto same = run("conj 't|(x y z)' 't|(x y z)'");
  CHECK(same.code == 0);
  CHECK(same.out.rfind("ConjugateWitness 1", 0) == 0);
  auto inv = run("conj 't|' 'T|'");
  CHECK(inv.out.rfind("ConjugateWitness H(a|())", 0) == 0);
  auto sq = run("--format json conj 't|' 't t|'");
  auto j = nlohmann::json::parse(sq.out);
  CHECK(j["kind"] != "ConjugateWitness");
  CHECK(j["recheck"] == true);
}

TEST_CASE("chain") {
  auto r = run("--group integers chain 1");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("order 2\n", 0) == 0);
  for (int n = 1; n <= 3; ++n) {
    auto c = run("--group integers chain " + std::to_string(n));
    CHECK(c.out.find("kernel check radius " + std::to_string(n) + ": pass") != std::string::npos);
  }
  CHECK(run("chain 4").out.rfind("order 120\n", 0) == 0);
}

TEST_CASE("efrf and section") {
  auto r = run("--group integers efrf " + word_file("eft.w", "H(t|())"));
  CHECK(r.code == 0);
  CHECK(r.out.rfind("depth 2\n", 0) == 0);
  CHECK(run("efrf " + word_file("efe.w", "")).out == "trivial\n");
  auto s = run("section " + word_file("sec.w", "H(t|())") + " 'x@1'");
  CHECK(s.code == 0);
  CHECK(s.out.rfind("level 1\n", 0) == 0);
}

TEST_CASE("verify is seeded and deterministic") {
  auto a = run("--seed 7 verify wp-oracle");
  CHECK(a.code == 0);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["schema"] == 1);
  CHECK(j["passed"] == true);
  CHECK(a.out == run("--seed 7 verify wp-oracle").out);
  CHECK(run("verify wp-oracle", "BRANCHGRP_SEED=7").out == a.out);
  auto bi = nlohmann::json::parse(run("verify branch-identities").out);
  CHECK(bi["suites"][0]["notes"]["instances"] == "20");
}
