#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "branchgrp/errors.hpp"
#include "branchgrp/perm.hpp"

using namespace branchgrp;

namespace {

Perm random_perm(const AlphabetPtr& alpha, std::mt19937_64& rng) {
  std::vector<Point> images(alpha->size());
  std::iota(images.begin(), images.end(), Point{0});
  std::shuffle(images.begin(), images.end(), rng);
  return Perm(alpha, images);
}

// Parity by counting inversions, independent of the cycle decomposition.
int inversion_sign(const Perm& p) {
  std::size_t inv = 0;
  for (Point i = 0; i < p.degree(); ++i)
    for (Point j = i + 1; j < p.degree(); ++j)
      if (p(i) > p(j)) ++inv;
  return inv % 2 ? -1 : 1;
}

}  // namespace

TEST_CASE("composition applies the right factor first") {
  auto alpha = IndexedAlphabet::numeric(3);
  Perm p = Perm::from_cycles(alpha, {{0, 1}});
  Perm q = Perm::from_cycles(alpha, {{1, 2}});
  Perm pq = compose(p, q);
  CHECK(pq(1) == p(q(1)));
  CHECK(pq(1) == 2);
  CHECK(to_cycle_string(pq) == "(0 1 2)");
}

TEST_CASE("identity and inverse") {
  auto alpha = IndexedAlphabet::numeric(7);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    Perm p = random_perm(alpha, rng);
    CHECK((p * inverse(p)).is_identity());
    CHECK((inverse(p) * p).is_identity());
  }
  CHECK(to_cycle_string(Perm(alpha)) == "()");
}

TEST_CASE("sign agrees with inversion count and is multiplicative") {
  auto alpha = IndexedAlphabet::numeric(8);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Perm p = random_perm(alpha, rng), q = random_perm(alpha, rng);
    CHECK(sign(p) == inversion_sign(p));
    CHECK(sign(p * q) == sign(p) * sign(q));
  }
}

TEST_CASE("cycle type includes fixed points") {
  auto alpha = IndexedAlphabet::numeric(6);
  Perm p = Perm::from_cycles(alpha, {{0, 1, 2}, {3, 4}});
  CHECK(cycle_type(p) == std::vector<std::size_t>{1, 2, 3});
  CHECK(p.fixed_point_count() == 1);
  CHECK(cycle_type(conjugate(p, Perm::from_cycles(alpha, {{0, 5}}))) == cycle_type(p));
}

TEST_CASE("cycle notation round trip over labels") {
  auto alpha = std::make_shared<IndexedAlphabet>(std::vector<std::string>{"x", "y", "z", "o", "p", "q"});
  Perm p = parse_cycles(alpha, "(x y z)(p q o)");
  CHECK(p(0) == 1);
  CHECK(p(5) == 3);
  CHECK(parse_cycles(alpha, to_cycle_string(p)) == p);
  CHECK(parse_cycles(alpha, "()").is_identity());
  CHECK(parse_cycles(alpha, "").is_identity());
  CHECK_THROWS_AS(parse_cycles(alpha, "(x w)"), ParseError);
  CHECK_THROWS_AS(parse_cycles(alpha, "(x y x)"), ParseError);
  CHECK_THROWS_AS(parse_cycles(alpha, "(x y"), ParseError);
}

TEST_CASE("constructor rejects non-bijections") {
  auto alpha = IndexedAlphabet::numeric(3);
  CHECK_THROWS(Perm(alpha, {0, 0, 1}));
  CHECK_THROWS(Perm(alpha, {0, 1}));
}

TEST_CASE("alternating generation on small instances") {
  // Ω = {0..6}, A = {0,1,2,3} with ω = 3, B = {3,4,5,6}; a 4-cycle on B fixes 0, 1, 2
  // but is odd, so use a 3-cycle on {4,5,6} together with the double transposition.
  auto omega = IndexedAlphabet::numeric(7);
  AlternatingGenerationInput in;
  in.omega = omega;
  in.a_part = {0, 1, 2, 3};
  in.b_part = {3, 4, 5, 6};
  in.generators = {Perm::from_cycles(omega, {{3, 4, 5}}), Perm::from_cycles(omega, {{4, 5, 6}})};
  CHECK(check_alternating_generation(in));

  auto bad = in;
  bad.generators = {Perm::from_cycles(omega, {{3, 4}})};
  CHECK_THROWS_AS(check_alternating_generation(bad), PreconditionError);

  auto not_transitive = in;
  not_transitive.generators = {Perm::from_cycles(omega, {{4, 5, 6}})};
  CHECK_THROWS_AS(check_alternating_generation(not_transitive), PreconditionError);
}
