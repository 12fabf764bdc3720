#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "branchgrp/errors.hpp"
#include "branchgrp/resfin.hpp"

using namespace branchgrp;

namespace {

std::size_t lcm_upto(std::size_t n) {
  std::size_t l = 1;
  for (std::size_t k = 2; k <= n; ++k) l = std::lcm(l, k);
  return l;
}

// Independent normal form for D∞ = Z ⋊ Z/2: element t^m a^f as (m, f).
std::pair<long, int> dihedral_nf(const GWord& w) {
  long m = 0;
  int f = 0;
  // Read right to left: w = s_1 ... s_k acts as s_1(s_2(...)). Left-multiply.
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    switch (*it) {
      case 0: m = -m; f ^= 1; break;      // a · t^m a^f = t^{-m} a^{f+1}
      case 1: m += 1; break;              // t
      default: m -= 1; break;             // T
    }
  }
  return {m, f};
}

GWord random_word(std::mt19937_64& rng, std::size_t gens, std::size_t max_len) {
  GWord w;
  std::size_t len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) w.letters.push_back(static_cast<Generator>(rng() % gens));
  return w;
}

}  // namespace

TEST_CASE("bundled families: word problem matches an independent normal form") {
  auto d = make_infinite_dihedral();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    GWord w = random_word(rng, 3, 10);
    auto [m, f] = dihedral_nf(w);
    CHECK(d->is_trivial(w) == (m == 0 && f == 0));
  }
  auto z = make_integers();
  CHECK(z->is_trivial(z->parse_word("t T T t")));
  CHECK_FALSE(z->is_trivial(z->parse_word("t t")));
}

TEST_CASE("quotient orders of the chain") {
  // Frozen from lcm(2..n+1) (integers) and twice that (D∞).
  auto z = make_integers();
  auto d = make_infinite_dihedral();
  QuotientChain cz(z), cd(d);
  const std::size_t zexp[] = {2, 6, 12, 60};
  const std::size_t dexp[] = {4, 12, 24, 120};
  for (std::size_t n = 1; n <= 4; ++n) {
    CHECK(lcm_upto(n + 1) == zexp[n - 1]);
    CHECK(cz.level(n).quotient.order() == zexp[n - 1]);
    CHECK(cd.level(n).quotient.order() == dexp[n - 1]);
  }
}

TEST_CASE("efrf query detects every nontrivial short word") {
  for (auto g : {make_integers(), make_infinite_dihedral()}) {
    for (const auto& w : words_up_to(*g, 4)) {
      auto ans = efrf_query(*g, w);
      REQUIRE(std::holds_alternative<DetectingQuotient>(ans));
      CHECK(std::get<DetectingQuotient>(ans).image != 0);
    }
    CHECK(std::holds_alternative<TrivialMarker>(efrf_query(*g, GWord{})));
  }
}

TEST_CASE("kernel check and decide_wp_G") {
  auto d = make_infinite_dihedral();
  QuotientChain chain(d);
  for (std::size_t n = 1; n <= 4; ++n) {
    auto rep = kernel_min_length_check(*d, chain.level(n), n);
    CHECK(rep.passed);
    CHECK(rep.checked > 0);
  }
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    GWord w = random_word(rng, 3, 8);
    CHECK(decide_wp_G(chain, w) == d->is_trivial(w));
  }
  CHECK_THROWS_AS(kernel_min_length_check(*d, chain.level(2), 3), PreconditionError);
}

TEST_CASE("build_level_map preconditions") {
  auto z = make_integers();
  CHECK_THROWS_AS(build_level_map(*z, 0), PreconditionError);
  CHECK_NOTHROW(build_level_map(*z, 3));
}

TEST_CASE("closure is reproducible and well formed") {
  auto d = make_infinite_dihedral();
  auto a = build_level_map(*d, 3);
  auto b = build_level_map(*d, 3);
  REQUIRE(a.quotient.order() == b.quotient.order());
  for (Generator s = 0; s < 3; ++s) CHECK(a.quotient.generator_image(s) == b.quotient.generator_image(s));
  const auto& q = a.quotient;
  for (FiniteQuotient::Element i = 0; i < q.order(); ++i) {
    CHECK(q.evaluate(q.word_of(i)) == i);
    CHECK(q.multiply(i, q.inverse(i)) == 0);
  }
}

TEST_CASE("conjugacy in D∞") {
  auto d = make_infinite_dihedral();
  auto t = d->parse_word("t");
  auto T = d->parse_word("T");
  auto ans = conjugate_in_G(*d, t, T);
  REQUIRE(std::holds_alternative<GWord>(ans));
  GWord c = std::get<GWord>(ans);
  CHECK(d->is_trivial(concat(concat(d->inverse(c), t), concat(c, d->inverse(T)))));
  CHECK(std::holds_alternative<NotConjugate>(conjugate_in_G(*d, t, d->parse_word("t t"))));
  CHECK(std::holds_alternative<NotConjugate>(conjugate_in_G(*d, d->parse_word("a"), d->parse_word("t a"))));
  auto ta = conjugate_in_G(*d, d->parse_word("a"), d->parse_word("t t a"));
  REQUIRE(std::holds_alternative<GWord>(ta));
}

TEST_CASE("selectors and descriptors") {
  CHECK(make_group("integers")->generator_count() == 2);
  CHECK(make_group("dihedral_infinite")->generator_count() == 3);
  CHECK(make_group("finite:cyclic:5")->is_trivial(make_group("finite:5")->parse_word("t t t t t")));
  CHECK(make_group("product:integers,dihedral_infinite")->generator_count() == 5);
  CHECK_THROWS(make_group("nope"));
  auto d = make_infinite_dihedral();
  auto again = load_group_descriptor(d->descriptor());
  CHECK(again->generator_names() == d->generator_names());
  CHECK_THROWS_AS(load_group_descriptor("group g\ngenerators a b\nfamily integers\n"), ParseError);
}

TEST_CASE("homomorphism text format") {
  auto z = make_integers();
  auto text = format_homomorphism(*z, build_level_map(*z, 1).quotient);
  CHECK(text.rfind("order 2\n", 0) == 0);
  CHECK(text.find("t -> (0 1)") != std::string::npos);
}
