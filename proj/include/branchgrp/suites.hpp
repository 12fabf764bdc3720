#pragma once

// Seeded verification suites. The CLI `verify` command and the acceptance
// binary run the same code.

#include <cstdint>
#include <string>
#include <vector>

#include "branchgrp/gammacalc.hpp"

namespace branchgrp {

struct SuiteResult {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::size_t failed = 0;
  std::vector<std::string> counterexamples;  // first few only
  std::vector<std::pair<std::string, std::string>> notes;
  double seconds = 0;
};

/// perm | alphabet | sections | contraction | tilde | branch-identities |
/// chain | wp-oracle | frattini
const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite name.
SuiteResult run_suite(const std::string& name, const Tower& tower, std::uint64_t seed);

SuiteResult suite_alternating_generation(std::uint64_t seed, std::size_t instances = 50);
SuiteResult suite_parity(const Tower& tower, std::uint64_t seed, std::size_t samples = 500);
SuiteResult suite_sections(const Tower& tower, std::uint64_t seed, std::size_t pairs = 100);
SuiteResult suite_contraction(const Tower& tower, std::uint64_t seed, std::size_t words = 100);
SuiteResult suite_tilde(const Tower& tower, std::uint64_t seed, std::size_t pairs = 50);
SuiteResult suite_branch_identities(const Tower& tower, std::uint64_t seed, std::size_t samples = 20);
SuiteResult suite_chain(const Tower& tower);
SuiteResult suite_wp_oracle(const Tower& tower, std::uint64_t seed, std::size_t random_words = 200);
SuiteResult suite_frattini(const Tower& tower, std::uint64_t seed, std::size_t conjugate_pairs = 20,
                           std::size_t other_pairs = 10);

/// A random instance satisfying every precondition of check_alternating_generation.
AlternatingGenerationInput random_alternating_instance(std::mt19937_64& rng, std::size_t max_degree = 8);

}  // namespace branchgrp
