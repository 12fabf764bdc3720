#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "branchgrp/errors.hpp"
#include "branchgrp/gammacalc.hpp"

using namespace branchgrp;

namespace {

Perm cyc(const Tower& t, std::size_t level, std::string_view text) {
  return parse_cycles(t.alphabet(level + 1).letters(), text);
}

}  // namespace

TEST_CASE("normal form merges and elides") {
  Tower t(make_infinite_dihedral());
  const auto& G = t.oracle();
  GammaWord e = normal_form(t, 0, {});
  CHECK(h_count(e) == 0);
  CHECK(e.b.size() == 1);
  CHECK(e.b[0].is_identity());

  HElem h = parse_helem(G, "t|(x y z)");
  CHECK(h_count(normal_form(t, 0, {Token::helem(h), Token::helem(h, true)})) == 0);

  Perm b = cyc(t, 0, "(x@1 y@1 z@1)");
  Perm b2 = cyc(t, 0, "(q0@1 p@1 q@1)");
  HElem h2 = parse_helem(G, "a|()");
  std::vector<Token> toks{Token::rooted(b), Token::helem(h), Token::helem(h2), Token::rooted(b2)};
  GammaWord w = normal_form(t, 0, toks);
  CHECK(h_count(w) == 1);
  CHECK(w.b.front() == b);
  CHECK(w.b.back() == b2);
  CHECK(equal_to_depth(t, pr(w), pr(0, toks), 3));

  // b h h⁻¹ b⁻¹ collapses completely
  CHECK(h_count(normal_form(t, 0, {Token::rooted(b), Token::helem(h), Token::helem(h, true),
                                   Token::rooted(b, true)})) == 0);
  CHECK_THROWS_AS(normal_form(t, 0, {Token::rooted(cyc(t, 0, "(x@1 y@1)"))}), PreconditionError);
  CHECK(sigma_length(toks) == 4);
  CHECK(sigma_length({Token::helem(parse_helem(G, "t t a|()"))}) == 3);
}

TEST_CASE("normalization preserves the image") {
  Tower t(make_integers());
  std::mt19937_64 rng(31);
  for (int i = 0; i < 60; ++i) {
    std::vector<Token> toks;
    std::size_t len = rng() % 7;
    for (std::size_t j = 0; j < len; ++j) toks.push_back(random_token(t, 0, rng, 2));
    CHECK(equal_to_depth(t, pr(0, toks), pr(normal_form(t, 0, toks)), 4));
  }
}

TEST_CASE("fragmented subwords") {
  std::vector<int> w{1, 2, 3};
  CHECK(is_fragmented_subword(std::vector<int>{}, w));
  CHECK(is_fragmented_subword(w, w));
  CHECK(is_fragmented_subword(std::vector<int>{1, 3}, w));
  CHECK_FALSE(is_fragmented_subword(std::vector<int>{3, 1}, w));
  CHECK_FALSE(is_fragmented_subword(std::vector<int>{1, 2, 3, 4}, w));
}

TEST_CASE("base-case sections of b1 h b2") {
  Tower t(make_infinite_dihedral());
  const auto& X = t.alphabet(1);
  HElem h = parse_helem(t.oracle(), "t|(x o p)");
  Perm b1 = cyc(t, 0, "(q1@1 q2@1 q3@1)");
  Perm b2 = cyc(t, 0, "(x@1 y@1 z@1)");
  GammaWord w{0, {b1, b2}, {h}};
  // b2(z) = x
  GammaWord sx = section_word(t, w, X.z());
  REQUIRE(h_count(sx) == 1);
  CHECK(sx.h[0] == h);
  CHECK(sx.b.front().is_identity());
  // b2(x) = y
  GammaWord sy = section_word(t, w, X.x());
  CHECK(h_count(sy) == 0);
  CHECK(sy.b.front() == t.phi(2, h));
  GammaWord so = section_word(t, w, X.o());
  CHECK(h_count(so) == 0);
  CHECK(so.b.front().is_identity());
}

TEST_CASE("contraction and semantic agreement") {
  for (auto g : {make_integers(), make_infinite_dihedral()}) {
    Tower t(g);
    std::mt19937_64 rng(77);
    for (int i = 0; i < 30; ++i) {
      std::size_t n = 1 + rng() % 6;
      GammaWord w = random_normal_word(t, 0, n, rng);
      TreeAut a = pr(w);
      for (Point d = 0; d < t.alphabet(1).size(); ++d) {
        SectionTrace s = section_word_traced(t, w, d);
        CHECK(h_count(s.word) <= (n + 1) / 2);
        std::vector<std::size_t> flat;
        for (const auto& o : s.origins) flat.insert(flat.end(), o.begin(), o.end());
        std::vector<std::size_t> all(n);
        for (std::size_t k = 0; k < n; ++k) all[k] = k;
        CHECK(std::is_sorted(flat.begin(), flat.end()));
        CHECK(is_fragmented_subword(flat, all));
        if (i < 10) CHECK(equal_to_depth(t, pr(s.word), section(t, a, d), 3));
      }
    }
  }
}

TEST_CASE("decider on small examples") {
  Tower t(make_infinite_dihedral());
  const auto& X = t.alphabet(1);
  CHECK(decide_wp_Gamma(t, std::vector<Token>{}).trivial);
  auto r = decide_wp_Gamma(t, parse_word_file(t, 0, "B((x@1 y@1 z@1))"));
  CHECK_FALSE(r.trivial);
  CHECK(r.witness->depth() == 1);

  auto z = decide_wp_Gamma(t, parse_word_file(t, 0, "H(|(x y z))"));
  CHECK_FALSE(z.trivial);
  REQUIRE(z.witness);
  CHECK(z.witness->depth() == 2);
  CHECK(z.witness->letters[0] == X.z());

  auto ty = decide_wp_Gamma(t, parse_word_file(t, 0, "H(t|())"));
  CHECK_FALSE(ty.trivial);
  CHECK(ty.witness->depth() == 2);
  CHECK((ty.witness->letters[0] == X.y() || ty.witness->letters[0] == X.z()));

  // a rooted letter fixing x, y, z commutes with every tilde
  auto c = parse_word_file(t, 0, "B((q0@1 q1@1 p@1)) H(t|(x o p)) B((q0@1 q1@1 p@1))' H(t|(x o p))'");
  auto rc = decide_wp_Gamma(t, c);
  CHECK(rc.ell == 4);
  CHECK(rc.trivial);
  CHECK_FALSE(brute_force_moved_vertex(t, pr(0, c), 8));
  auto nc = parse_word_file(t, 0, "B((x@1 q1@1 p@1)) H(t|(x o p)) B((x@1 q1@1 p@1))' H(t|(x o p))'");
  CHECK_FALSE(decide_wp_Gamma(t, nc).trivial);
}

TEST_CASE("decider agrees with brute force on random words") {
  for (auto g : {make_integers(), make_infinite_dihedral()}) {
    Tower t(g);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 60; ++i) {
      std::vector<Token> toks;
      std::size_t len = rng() % 4;
      for (std::size_t j = 0; j < len; ++j) toks.push_back(random_token(t, 0, rng));
      auto r = decide_wp_Gamma(t, toks);
      auto b = brute_force_moved_vertex(t, pr(0, toks), r.depth);
      CHECK(r.trivial == !b.has_value());
      if (r.witness) {
        CHECK(eval_vertex(t, pr(0, toks), *r.witness) != *r.witness);
      }
      if (r.trivial) CHECK(fixes_to_depth(t, pr(0, toks), r.depth + 2));
    }
  }
}

TEST_CASE("portraits from section words") {
  Tower t(make_infinite_dihedral());
  auto toks = parse_word_file(t, 0, "H(|(x y z))");
  GammaWord w = normal_form(t, 0, toks);
  Portrait p = word_portrait(t, w, 2);
  CHECK(format_portrait_text(t, p) == format_portrait_text(t, portrait(t, pr(w), 2)));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    GammaWord r = random_normal_word(t, 0, 3, rng);
    CHECK(format_portrait_text(t, word_portrait(t, r, 3)) ==
          format_portrait_text(t, portrait(t, pr(r), 3)));
  }
}

TEST_CASE("efrf output") {
  Tower t(make_integers());
  CHECK(std::holds_alternative<TrivialMarker>(efrf_output_Gamma(t, {})));
  auto toks = parse_word_file(t, 0, "B((x@1 y@1 z@1))");
  auto ans = efrf_output_Gamma(t, toks);
  REQUIRE(std::holds_alternative<EfrfGammaOutput>(ans));
  const auto& out = std::get<EfrfGammaOutput>(ans);
  CHECK(out.depth == 2);
  CHECK(out.degree == 7 * 11);
  REQUIRE(out.images.size() == 1);
  const Perm& img = *out.images[0].image;
  std::size_t wi = vertex_index(t, out.witness);
  CHECK(img(wi) != wi);
  // first letter moves, second letter rides along
  CHECK(img(0) == 0);
  Vertex v{0, {t.alphabet(1).x(), 3}};
  CHECK(vertex_at(t, 0, 2, img(vertex_index(t, v))).letters[0] == t.alphabet(1).y());
  CHECK(vertex_at(t, 0, 2, img(vertex_index(t, v))).letters[1] == 3);
  CHECK(format_efrf_output(t, out).rfind("depth 2\ndegree 77\n", 0) == 0);

  TowerLimits tiny;
  tiny.vertex_cap = 10;
  Tower small(make_integers(), tiny);
  auto deg = std::get<EfrfGammaOutput>(efrf_output_Gamma(small, parse_word_file(small, 0, "H(t|())")));
  CHECK(deg.degraded);
  CHECK(eval_vertex(small, pr(0, parse_word_file(small, 0, "H(t|())")), deg.witness) != deg.witness);
}

TEST_CASE("conjugacy certificates in D∞") {
  Tower t(make_infinite_dihedral());
  const auto& G = t.oracle();
  HElem tt{G.parse_word("t"), AElem{}};
  auto same = conjugacy_certificate(t, tt, tt);
  CHECK(same.kind == Certificate::Kind::ConjugateWitness);
  CHECK(h_count(same.witness) == 0);

  auto inv = conjugacy_certificate(t, tt, HElem{G.parse_word("T"), AElem{}});
  REQUIRE(inv.kind == Certificate::Kind::ConjugateWitness);
  CHECK(inv.witness.h.at(0).g == G.parse_word("a"));
  CHECK(recheck_certificate(t, tt, HElem{G.parse_word("T"), AElem{}}, inv));

  HElem t2{G.parse_word("t t"), AElem{}};
  auto far = conjugacy_certificate(t, tt, t2);
  CHECK(far.kind == Certificate::Kind::NotConjugateAtLevel);
  CHECK(far.level == 2);
  CHECK(recheck_certificate(t, tt, t2, far));
}

TEST_CASE("h ball") {
  Tower t(make_integers());
  auto ball = h_ball(t, 1);
  // identity, t, T and the eight 3-cycles (x y k)^±
  CHECK(ball.size() == 11);
  CHECK(ball[0].second == 0);
  auto b2 = h_ball(t, 2);
  for (std::size_t i = 0; i < b2.size(); ++i)
    for (std::size_t j = i + 1; j < b2.size(); ++j) CHECK_FALSE(b2[i].first == b2[j].first);
}

TEST_CASE("branch identities") {
  Tower t(make_infinite_dihedral());
  auto rep = verify_branch_identities(t, 5, 1, 4);
  CHECK(rep.alphabet_size == 9);
  CHECK(rep.passed());
}

TEST_CASE("word file syntax") {
  Tower t(make_infinite_dihedral());
  auto toks = parse_word_file(t, 0, "  B((x@1 y@1 z@1))' H(t a|(x y z))\n# comment\nH(|())");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].inverted);
  CHECK(format_tokens(t, toks) == "B((x@1 y@1 z@1))' H(t a|(x y z)) H(|())");
  CHECK(format_tokens(t, parse_word_file(t, 0, format_tokens(t, toks))) == format_tokens(t, toks));
  CHECK_THROWS_AS(parse_word_file(t, 0, "B((x@1 y@1)"), ParseError);
  CHECK_THROWS_AS(parse_word_file(t, 0, "Q(1)"), ParseError);
  CHECK_THROWS_AS(parse_word_file(t, 0, "B((x@1 y@1))"), ParseError);
  try {
    parse_word_file(t, 0, "H(t|()) H(w|())");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 1);
  }
}
