// Acceptance run: one line per criterion, nonzero exit if any fails.
// A criterion passes when every check agrees exactly and it finishes inside
// its time budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "branchgrp/suites.hpp"

using namespace branchgrp;

namespace {

constexpr std::uint64_t kSeed = 20240917;

struct Criterion {
  int number;
  std::string title;
  double budget_seconds;
  std::function<std::vector<SuiteResult>()> run;
};

std::string summary(const std::vector<SuiteResult>& results) {
  std::string s;
  for (const auto& r : results) {
    if (!s.empty()) s += "; ";
    s += r.name + " " + std::to_string(r.checked - r.failed) + "/" + std::to_string(r.checked);
    for (const auto& [k, v] : r.notes) s += " " + k + "=" + v;
  }
  return s;
}

}  // namespace

int main() {
  Tower dinf(make_infinite_dihedral());
  Tower ints(make_integers());
  auto both = [&](auto suite) {
    return [&, suite] { return std::vector<SuiteResult>{suite(dinf), suite(ints)}; };
  };

  std::vector<Criterion> criteria{
      {1, "word problem decider vs brute force", 60,
       both([](const Tower& t) { return suite_wp_oracle(t, kSeed, 200); })},
      {2, "section formula", 30, both([](const Tower& t) { return suite_sections(t, kSeed, 100); })},
      {3, "contraction", 20, both([](const Tower& t) { return suite_contraction(t, kSeed, 100); })},
      {4, "tilde homomorphism and injectivity", 60,
       both([](const Tower& t) { return suite_tilde(t, kSeed, 50); })},
      {5, "branch identities", 30,
       both([](const Tower& t) { return suite_branch_identities(t, kSeed, 20); })},
      {6, "quotient chain", 30, both([](const Tower& t) { return suite_chain(t); })},
      {7, "conjugacy certificates (D_inf)", 30,
       [&] { return std::vector<SuiteResult>{suite_frattini(dinf, kSeed, 20, 10)}; }},
      {8, "phi/psi parity", 10, both([](const Tower& t) { return suite_parity(t, kSeed, 500); })},
      {9, "alternating generation", 30,
       [] { return std::vector<SuiteResult>{suite_alternating_generation(kSeed, 50)}; }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::vector<SuiteResult> results;
    std::string error;
    try {
      results = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool ok = error.empty() && secs <= c.budget_seconds;
    for (const auto& r : results) ok = ok && r.passed;
    failures += !ok;
    std::printf("[%s] criterion %d: %s (%.2fs, budget %.0fs) %s\n", ok ? "PASS" : "FAIL", c.number,
                c.title.c_str(), secs, c.budget_seconds, error.empty() ? summary(results).c_str() : error.c_str());
    for (const auto& r : results)
      for (const auto& x : r.counterexamples) std::printf("    %s: %s\n", r.name.c_str(), x.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
