#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "branchgrp/errors.hpp"
#include "branchgrp/treeauto.hpp"

using namespace branchgrp;

namespace {

HElem random_h(const GroupOracle& g, std::mt19937_64& rng, std::size_t max_len) {
  HElem h;
  std::size_t len = rng() % (max_len + 1);
  for (std::size_t i = 0; i < len; ++i) h.g.letters.push_back(static_cast<Generator>(rng() % g.generator_count()));
  static const char* cycles[] = {"()", "(x y z)", "(x o p)", "(y q z)", "(x y)(o p)", "(z o q p y)"};
  h.a = AElem::parse(cycles[rng() % 6]);
  return h;
}

Perm random_even(const AlphabetPtr& alpha, std::mt19937_64& rng) {
  std::vector<Point> pts(alpha->size());
  for (Point i = 0; i < pts.size(); ++i) pts[i] = i;
  Point a = rng() % pts.size(), b, c;
  do b = rng() % pts.size(); while (b == a);
  do c = rng() % pts.size(); while (c == a || c == b);
  return Perm::from_cycles(alpha, {{a, b, c}});
}

TreeAut random_aut(const Tower& t, std::mt19937_64& rng) {
  std::vector<TreeAut> f;
  std::size_t k = 1 + rng() % 4;
  for (std::size_t i = 0; i < k; ++i) {
    if (rng() % 2) f.push_back(TreeAut::rooted(0, random_even(t.alphabet(1).letters(), rng)));
    else f.push_back(TreeAut::tilde(0, random_h(t.oracle(), rng, 3)));
    if (rng() % 4 == 0) f.back() = f.back().inverse();
  }
  return TreeAut::product(0, f);
}

Vertex random_vertex(const Tower& t, std::size_t base, std::size_t depth, std::mt19937_64& rng) {
  Vertex v{base, {}};
  for (std::size_t i = 0; i < depth; ++i) v.letters.push_back(rng() % t.alphabet(base + i + 1).size());
  return v;
}

}  // namespace

TEST_CASE("tilde evaluation unfolds through x letters") {
  Tower t(make_infinite_dihedral());
  HElem h = parse_helem(t.oracle(), "t|(x y z)");
  TreeAut a = TreeAut::tilde(0, h);
  for (Point c = 0; c < t.alphabet(3).size(); ++c) {
    Vertex v{0, {t.alphabet(1).x(), t.alphabet(2).y(), c}};
    Vertex img = eval_vertex(t, a, v);
    CHECK(img.letters[0] == v.letters[0]);
    CHECK(img.letters[1] == v.letters[1]);
    CHECK(img.letters[2] == t.phi(3, h)(c));
  }
  Vertex z{0, {t.alphabet(1).z(), t.alphabet(2).x()}};
  CHECK(eval_vertex(t, a, z).letters[1] == t.alphabet(2).y());
  Vertex o{0, {0, t.alphabet(2).x()}};
  CHECK(eval_vertex(t, a, o) == o);
  CHECK_THROWS_AS(eval_vertex(t, a, Vertex{1, {}}), LevelMismatch);
}

TEST_CASE("rooted automorphisms move only the first letter") {
  Tower t(make_integers());
  std::mt19937_64 rng(2);
  Perm s = random_even(t.alphabet(1).letters(), rng);
  TreeAut r = TreeAut::rooted(0, s);
  Vertex v = random_vertex(t, 0, 3, rng);
  Vertex img = eval_vertex(t, r, v);
  CHECK(img.letters[0] == s(v.letters[0]));
  CHECK(img.letters[1] == v.letters[1]);
  CHECK(level_perm(t, r, 1) == Perm(level_perm(t, r, 1).alphabet(), std::vector<Point>(s.images().begin(), s.images().end())));
  CHECK(section(t, r, v.letters[0]).is_identity());
}

TEST_CASE("sections satisfy a(d w) = a(d) a_d(w) on random vertices") {
  Tower t(make_infinite_dihedral());
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    TreeAut a = random_aut(t, rng);
    Vertex v = random_vertex(t, 0, 4, rng);
    Vertex img = eval_vertex(t, a, v);
    Vertex head{0, {v.letters[0]}};
    CHECK(eval_vertex(t, a, head).letters[0] == img.letters[0]);
    TreeAut s = section(t, a, v.letters[0]);
    CHECK(eval_vertex(t, s, v.suffix(1)) == img.suffix(1));
    // deep sections compose
    Vertex two{0, {v.letters[0], v.letters[1]}};
    CHECK(eval_vertex(t, section(t, a, two), v.suffix(2)) == img.suffix(2));
  }
}

TEST_CASE("level_perm is a homomorphism") {
  Tower t(make_integers());
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    TreeAut a = random_aut(t, rng), b = random_aut(t, rng);
    for (std::size_t d = 0; d <= 3; ++d) {
      CHECK(level_perm(t, a * b, d) == compose(level_perm(t, a, d), level_perm(t, b, d)));
    }
    CHECK(level_perm(t, TreeAut::tilde(0, random_h(t.oracle(), rng, 3)), 1).is_identity());
  }
  TowerLimits tiny;
  tiny.vertex_cap = 100;
  Tower small(make_integers(), tiny);
  CHECK_THROWS_AS(level_perm(small, TreeAut::identity(0), 3), CapExceeded);
}

TEST_CASE("portrait of the 3-cycle tilde") {
  Tower t(make_infinite_dihedral());
  TreeAut a = TreeAut::tilde(0, parse_helem(t.oracle(), "|(x y z)"));
  Portrait p = portrait(t, a, 2);
  REQUIRE(p.labels.size() == 1 + 9);
  CHECK(p.labels[0].second.is_identity());
  for (const auto& [v, perm] : p.labels) {
    if (v.depth() == 1 && v.letters[0] == t.alphabet(1).z()) {
      CHECK(to_cycle_string(perm) == "(x@2 y@2 z@2)");
    } else {
      CHECK(perm.is_identity());
    }
  }
  std::string text = format_portrait_text(t, p);
  CHECK(text.rfind("portrait depth=2\nroot : ()\n", 0) == 0);
  CHECK(text.find("z@1 : (x@2 y@2 z@2)") != std::string::npos);
  CHECK(text == format_portrait_text(t, portrait(t, a, 2)));
  CHECK(format_portrait_dot(t, p).find("digraph portrait") == 0);
}

TEST_CASE("wreath decomposition round trip") {
  Tower t(make_infinite_dihedral());
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    TreeAut a = random_aut(t, rng);
    auto w = wreath_decompose(t, a);
    TreeAut back = wreath_recompose(0, w);
    CHECK(equal_to_depth(t, a, back, 3));
    for (int j = 0; j < 20; ++j) {
      Vertex v = random_vertex(t, 0, 3, rng);
      CHECK(eval_vertex(t, a, v) == eval_vertex(t, back, v));
    }
  }
  HElem h = parse_helem(t.oracle(), "t|(x o p)");
  auto w = wreath_decompose(t, TreeAut::tilde(0, h));
  const auto& X = t.alphabet(1);
  CHECK(w.root.is_identity());
  CHECK(w.children[X.x()].kind() == TreeAut::Kind::Tilde);
  CHECK(w.children[X.y()].kind() == TreeAut::Kind::Rooted);
  CHECK(w.children[X.y()].perm() == t.phi(2, h));
  CHECK(w.children[X.z()].perm() == t.psi(2, h));
  CHECK(w.children[0].is_identity());
}

TEST_CASE("embed_shift acts below its vertex only") {
  Tower t(make_integers());
  std::mt19937_64 rng(4);
  TreeAut g = TreeAut::tilde(2, random_h(t.oracle(), rng, 2));
  Vertex v{0, {1, 3}};
  TreeAut s = embed_shift(v, g);
  for (int i = 0; i < 100; ++i) {
    Vertex u = random_vertex(t, 0, 5, rng);
    Vertex img = eval_vertex(t, s, u);
    if (u.letters[0] == 1 && u.letters[1] == 3) {
      CHECK(img.suffix(2) == eval_vertex(t, g, u.suffix(2)));
    } else {
      CHECK(img == u);
    }
  }
  CHECK(embed_shift(v, TreeAut::identity(2)).is_identity());
  CHECK_THROWS_AS(embed_shift(v, TreeAut::identity(1)), LevelMismatch);
}

TEST_CASE("tilde is a homomorphism") {
  Tower t(make_infinite_dihedral());
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    HElem u = random_h(t.oracle(), rng, 4), v = random_h(t.oracle(), rng, 4);
    CHECK(equal_to_depth(t, TreeAut::tilde(0, h_mult(u, v)),
                         TreeAut::tilde(0, u) * TreeAut::tilde(0, v), 5));
  }
  HElem aa = parse_helem(t.oracle(), "a a|()");
  CHECK(fixes_to_depth(t, TreeAut::tilde(0, aa), 5));
}

TEST_CASE("moved-vertex searches agree") {
  Tower t(make_integers());
  std::mt19937_64 rng(99);
  for (int i = 0; i < 40; ++i) {
    TreeAut a = random_aut(t, rng);
    if (i % 3 == 0) a = a * a.inverse();
    for (std::size_t d = 1; d <= 3; ++d) {
      auto naive = naive_moved_vertex(t, a, d);
      auto brute = brute_force_moved_vertex(t, a, d);
      auto sym = moved_vertex(t, a, d);
      CHECK(naive.has_value() == brute.has_value());
      CHECK(naive.has_value() == sym.has_value());
      if (brute) CHECK(eval_vertex(t, a, *brute) != *brute);
      if (sym) CHECK(eval_vertex(t, a, *sym) != *sym);
    }
  }
}

TEST_CASE("x1-shift product identity") {
  Tower t(make_infinite_dihedral());
  std::mt19937_64 rng(5);
  const auto& X = t.alphabet(1);
  for (int i = 0; i < 10; ++i) {
    HElem h = random_h(t.oracle(), rng, 4);
    TreeAut lhs = TreeAut::product(
        0, {TreeAut::tilde(0, h), embed_shift(Vertex{0, {X.y()}}, TreeAut::rooted(1, inverse(t.phi(2, h)))),
            embed_shift(Vertex{0, {X.z()}}, TreeAut::rooted(1, inverse(t.psi(2, h))))});
    CHECK(equal_to_depth(t, lhs, embed_shift(Vertex{0, {X.x()}}, TreeAut::tilde(1, h)), 4));
  }
}

TEST_CASE("vertex formatting") {
  Tower t(make_integers());
  Vertex v{0, {t.alphabet(1).x(), 2}};
  CHECK(format_vertex(t, v) == "x@1 q2@2");
  CHECK(parse_vertex(t, 0, "x@1 q2@2") == v);
  CHECK(format_vertex(t, Vertex{0, {}}) == "root");
  CHECK(vertex_at(t, 0, 2, vertex_index(t, v)) == v);
  CHECK_THROWS_AS(parse_vertex(t, 0, "x@2"), ParseError);
}
