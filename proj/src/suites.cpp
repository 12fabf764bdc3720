#include "branchgrp/suites.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <set>
#include <stdexcept>

#include "branchgrp/errors.hpp"

namespace branchgrp {

namespace {

constexpr std::size_t kMaxCounterexamples = 5;

class Recorder {
 public:
  explicit Recorder(std::string name) : start_(std::chrono::steady_clock::now()) {
    result_.name = std::move(name);
  }

  void check(bool ok, const std::string& what) {
    ++result_.checked;
    if (ok) return;
    ++result_.failed;
    result_.passed = false;
    if (result_.counterexamples.size() < kMaxCounterexamples) result_.counterexamples.push_back(what);
  }

  void note(std::string key, std::string value) { result_.notes.emplace_back(std::move(key), std::move(value)); }

  SuiteResult finish() {
    result_.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(result_);
  }

 private:
  SuiteResult result_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<Token> random_tokens(const Tower& t, std::mt19937_64& rng, std::size_t min_len,
                                 std::size_t max_len) {
  std::vector<Token> out;
  std::size_t len = min_len + rng() % (max_len - min_len + 1);
  for (std::size_t i = 0; i < len; ++i) out.push_back(random_token(t, 0, rng));
  return out;
}

std::vector<Token> inverse_tokens(const std::vector<Token>& w) {
  std::vector<Token> out(w.rbegin(), w.rend());
  for (auto& t : out) t.inverted = !t.inverted;
  return out;
}

std::vector<Token> concat_tokens(std::vector<Token> a, const std::vector<Token>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"perm",  "alphabet",          "sections",
                                              "contraction", "tilde", "branch-identities",
                                              "chain", "wp-oracle",         "frattini"};
  return names;
}

SuiteResult run_suite(const std::string& name, const Tower& tower, std::uint64_t seed) {
  if (name == "perm") return suite_alternating_generation(seed);
  if (name == "alphabet") return suite_parity(tower, seed);
  if (name == "sections") return suite_sections(tower, seed);
  if (name == "contraction") return suite_contraction(tower, seed);
  if (name == "tilde") return suite_tilde(tower, seed);
  if (name == "branch-identities") return suite_branch_identities(tower, seed);
  if (name == "chain") return suite_chain(tower);
  if (name == "wp-oracle") return suite_wp_oracle(tower, seed);
  if (name == "frattini") return suite_frattini(tower, seed);
  throw std::invalid_argument("unknown suite '" + name + "'");
}

// ---------------------------------------------------------------------------

AlternatingGenerationInput random_alternating_instance(std::mt19937_64& rng, std::size_t max_degree) {
  for (;;) {
    std::size_t n = 5 + rng() % (max_degree - 4);
    std::vector<Point> pts(n);
    std::iota(pts.begin(), pts.end(), Point{0});
    std::shuffle(pts.begin(), pts.end(), rng);
    std::size_t a_size = 3 + rng() % (n - 3);  // 3 .. n-1, so |B| >= 2
    Point omega = pts[0];
    std::vector<Point> a_part(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(a_size));
    std::vector<Point> b_part{omega};
    b_part.insert(b_part.end(), pts.begin() + static_cast<std::ptrdiff_t>(a_size), pts.end());
    // a_part[1], a_part[2] stay fixed; the rest of A \ {ω} may move.
    std::vector<Point> free(a_part.begin() + 3, a_part.end());
    if (b_part.size() == 2 && free.size() < 2) continue;
    auto alpha = IndexedAlphabet::numeric(n);
    std::vector<Perm> gens;
    std::size_t count = 1 + rng() % 3;
    for (std::size_t g = 0; g < count; ++g) {
      std::vector<Point> images(n);
      std::iota(images.begin(), images.end(), Point{0});
      std::vector<Point> bimg = b_part, fimg = free;
      std::shuffle(bimg.begin(), bimg.end(), rng);
      std::shuffle(fimg.begin(), fimg.end(), rng);
      for (std::size_t i = 0; i < b_part.size(); ++i) images[b_part[i]] = bimg[i];
      for (std::size_t i = 0; i < free.size(); ++i) images[free[i]] = fimg[i];
      Perm p(alpha, images);
      if (sign(p) != 1) {
        if (free.size() >= 2) {
          std::swap(images[free[0]], images[free[1]]);
        } else {
          std::swap(images[b_part[0]], images[b_part[1]]);
        }
        p = Perm(alpha, images);
      }
      gens.push_back(std::move(p));
    }
    // transitivity on B
    std::set<Point> orbit{omega};
    std::vector<Point> frontier{omega};
    while (!frontier.empty()) {
      Point x = frontier.back();
      frontier.pop_back();
      for (const auto& g : gens) {
        if (orbit.insert(g(x)).second) frontier.push_back(g(x));
      }
    }
    if (orbit.size() != b_part.size()) continue;
    return AlternatingGenerationInput{alpha, a_part, b_part, gens};
  }
}

SuiteResult suite_alternating_generation(std::uint64_t seed, std::size_t instances) {
  Recorder r("perm");
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    auto in = random_alternating_instance(rng);
    bool ok = false;
    try {
      ok = check_alternating_generation(in);
    } catch (const PreconditionError& e) {
      r.check(false, std::string("instance ") + std::to_string(i) + ": " + e.what());
      continue;
    }
    r.check(ok, "instance " + std::to_string(i) + " of degree " + std::to_string(in.omega->size()));
  }
  // sign is a homomorphism on random pairs
  auto alpha = IndexedAlphabet::numeric(8);
  for (int i = 0; i < 100; ++i) {
    std::vector<Point> a(8), b(8);
    std::iota(a.begin(), a.end(), Point{0});
    std::iota(b.begin(), b.end(), Point{0});
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    Perm p(alpha, a), q(alpha, b);
    r.check(sign(p * q) == sign(p) * sign(q), "sign not multiplicative on " + to_cycle_string(p));
  }
  r.note("instances", std::to_string(instances));
  return r.finish();
}

SuiteResult suite_parity(const Tower& tower, std::uint64_t seed, std::size_t samples) {
  Recorder r("alphabet");
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < samples; ++i) {
    std::size_t n = 1 + rng() % 4;
    HElem h = random_helem(tower, rng, 6);
    std::string what = "n=" + std::to_string(n) + " h=" + format_helem(tower.oracle(), h);
    r.check(sign(tower.phi(n, h)) == 1, "phi odd at " + what);
    r.check(sign(tower.psi(n, h)) == 1, "psi odd at " + what);
  }
  r.note("samples", std::to_string(samples));
  return r.finish();
}

SuiteResult suite_sections(const Tower& tower, std::uint64_t seed, std::size_t pairs) {
  Recorder r("sections");
  std::mt19937_64 rng(seed);
  const Point n = static_cast<Point>(tower.alphabet(1).size());
  for (std::size_t i = 0; i < pairs; ++i) {
    auto alpha = random_tokens(tower, rng, 1, 3), beta = random_tokens(tower, rng, 1, 3);
    TreeAut a = pr(0, alpha), b = pr(0, beta);
    GammaWord w = normal_form(tower, 0, concat_tokens(alpha, beta));
    for (Point d = 0; d < n; ++d) {
      TreeAut symbolic = pr(section_word(tower, w, d));
      // (αβ)_d = α_{β(d)} β_d, assembled from separate sections
      TreeAut formula = TreeAut::product(
          1, {section(tower, a, eval_letter(tower, b, d)), section(tower, b, d)});
      bool ok = equal_to_depth(tower, symbolic, formula, 3);
      r.check(ok, format_tokens(tower, alpha) + " * " + format_tokens(tower, beta) + " at " +
                      tower.alphabet(1).label(d));
    }
  }
  r.note("pairs", std::to_string(pairs));
  return r.finish();
}

SuiteResult suite_contraction(const Tower& tower, std::uint64_t seed, std::size_t words) {
  Recorder r("contraction");
  std::mt19937_64 rng(seed);
  const Point letters = static_cast<Point>(tower.alphabet(1).size());
  const GroupOracle& G = tower.oracle();
  for (std::size_t i = 0; i < words; ++i) {
    std::size_t n = 1 + i % 6;
    GammaWord w = random_normal_word(tower, 0, n, rng);
    std::vector<std::size_t> source(n);
    std::iota(source.begin(), source.end(), std::size_t{0});
    for (Point d = 0; d < letters; ++d) {
      SectionTrace s = section_word_traced(tower, w, d);
      std::string what = format_gamma_word(tower, w) + " at " + tower.alphabet(1).label(d);
      r.check(h_count(s.word) <= (n + 1) / 2, "h_count bound fails for " + what);
      std::vector<std::size_t> flat;
      bool products_ok = true;
      for (std::size_t j = 0; j < s.origins.size(); ++j) {
        HElem prod;
        for (std::size_t o : s.origins[j]) {
          flat.push_back(o);
          prod = h_mult(prod, w.h[o]);
        }
        products_ok = products_ok && tower.is_trivial(h_mult(h_inv(G, s.word.h[j]), prod));
      }
      bool ordered = std::adjacent_find(flat.begin(), flat.end(), std::greater_equal<>()) == flat.end();
      r.check(ordered && is_fragmented_subword(flat, source), "not a fragmented subword: " + what);
      r.check(products_ok, "H letter differs from the product of its origins: " + what);
    }
  }
  r.note("words", std::to_string(words));
  return r.finish();
}

SuiteResult suite_tilde(const Tower& tower, std::uint64_t seed, std::size_t pairs) {
  Recorder r("tilde");
  std::mt19937_64 rng(seed);
  const GroupOracle& G = tower.oracle();
  for (std::size_t i = 0; i < pairs; ++i) {
    HElem u = random_helem(tower, rng, 4), v = random_helem(tower, rng, 4);
    bool ok = equal_to_depth(tower, TreeAut::tilde(0, h_mult(u, v)),
                             TreeAut::tilde(0, u) * TreeAut::tilde(0, v), 5);
    r.check(ok, "tilde(uv) != tilde(u) tilde(v) for u=" + format_helem(G, u) + " v=" + format_helem(G, v));
  }
  auto ball = h_ball(tower, 3);
  std::size_t nontrivial = 0;
  for (const auto& [h, len] : ball) {
    if (tower.is_trivial(h)) continue;
    ++nontrivial;
    for (std::size_t level = 0; level <= 3; ++level) {
      auto v = moved_vertex(tower, TreeAut::tilde(level, h), len + 2);
      r.check(v.has_value(), "tilde(" + format_helem(G, h) + ") at level " + std::to_string(level) +
                                 " fixes depth " + std::to_string(len + 2));
    }
  }
  r.note("homomorphism_pairs", std::to_string(pairs));
  r.note("ball_radius_3_nontrivial", std::to_string(nontrivial));
  return r.finish();
}

SuiteResult suite_branch_identities(const Tower& tower, std::uint64_t seed, std::size_t samples) {
  Recorder r("branch-identities");
  auto rep = verify_branch_identities(tower, samples, seed, 4);
  r.check(rep.alphabet_size >= 7, "|X_1| < 7");
  const GroupOracle& G = tower.oracle();
  for (const auto& inst : rep.instances) {
    std::string what = "h=" + format_helem(G, inst.h) + " k=" + format_helem(G, inst.k);
    r.check(inst.commutator_ok, "commutator identity fails for " + what);
    r.check(inst.shift_ok, "x1-shift identity fails for " + what);
  }
  r.note("alphabet_size", std::to_string(rep.alphabet_size));
  r.note("instances", std::to_string(rep.instances.size()));
  return r.finish();
}

SuiteResult suite_chain(const Tower& tower) {
  Recorder r("chain");
  const GroupOracle& G = tower.oracle();
  std::vector<const QuotientMap*> maps;
  for (std::size_t n = 1; n <= 5; ++n) {
    try {
      maps.push_back(&tower.chain().level(n));
      if (n <= 4) {
        QuotientMap fresh = build_level_map(G, n, tower.limits().max_quotient_order);
        r.check(fresh.quotient.order() == maps.back()->quotient.order(), "rebuild differs at n=" + std::to_string(n));
      }
    } catch (const Error& e) {
      r.check(false, "build_level_map(" + std::to_string(n) + "): " + e.what());
      return r.finish();
    }
  }
  std::string orders;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto rep = kernel_min_length_check(G, *maps[n - 1], n);
    r.check(rep.passed, "kernel check at n=" + std::to_string(n) +
                            (rep.counterexample ? " fails on " + G.format_word(*rep.counterexample) : ""));
    if (n > 1) orders += ' ';
    orders += std::to_string(maps[n - 1]->quotient.order());
  }
  auto ball = G.ball(4);
  for (std::size_t n = 1; n <= 4; ++n) {
    for (const auto& g : ball) {
      bool in_next = maps[n]->image(g) == 0;
      bool in_this = maps[n - 1]->image(g) == 0;
      r.check(!in_next || in_this, "ker f_" + std::to_string(n + 1) + " not inside ker f_" +
                                       std::to_string(n) + " at " + G.format_word(g));
    }
  }
  r.note("orders", orders);
  r.note("ball_radius_4", std::to_string(ball.size()));
  return r.finish();
}

SuiteResult suite_wp_oracle(const Tower& tower, std::uint64_t seed, std::size_t random_words) {
  Recorder r("wp-oracle");
  std::size_t trivial = 0, compared = 0;
  auto compare = [&](const std::vector<Token>& w) {
    WpResult res = decide_wp_Gamma(tower, w);
    auto brute = brute_force_moved_vertex(tower, pr(0, w), res.depth);
    bool ok = res.trivial == !brute.has_value();
    if (ok && res.witness) ok = eval_vertex(tower, pr(0, w), *res.witness) != *res.witness;
    trivial += res.trivial;
    ++compared;
    r.check(ok, "disagreement on " + (w.empty() ? std::string("<empty>") : format_tokens(tower, w)));
  };
  auto desk = desk_tokens(tower);
  compare({});
  for (const auto& a : desk) compare({a});
  for (const auto& a : desk)
    for (const auto& b : desk) compare({a, b});
  std::size_t exhaustive = compared;

  std::mt19937_64 rng(seed);
  const AlphabetLevel& X = tower.alphabet(1);
  for (std::size_t i = 0; i < random_words; ++i) {
    std::vector<Token> w;
    switch (i % 4) {
      case 0:
      case 1:
        w = random_tokens(tower, rng, 1, 4);
        break;
      case 2: {
        auto u = random_tokens(tower, rng, 1, 2);
        w = concat_tokens(u, inverse_tokens(u));
        break;
      }
      default: {
        // b h b⁻¹ h⁻¹; trivial whenever b fixes x₁, y₁ and z₁
        Perm b = rng() % 2 ? Perm::from_cycles(X.letters(), {{X.o(), X.p(), X.q()}})
                           : random_b(tower, 0, rng);
        Token h = Token::helem(random_helem(tower, rng, 1));
        Token hi = h;
        hi.inverted = true;
        w = {Token::rooted(b), h, Token::rooted(b, true), hi};
        break;
      }
    }
    compare(w);
  }
  r.note("exhaustive_words", std::to_string(exhaustive));
  r.note("desk_tokens", std::to_string(desk.size()));
  r.note("random_words", std::to_string(random_words));
  r.note("trivial", std::to_string(trivial));
  return r.finish();
}

SuiteResult suite_frattini(const Tower& tower, std::uint64_t seed, std::size_t conjugate_pairs,
                           std::size_t other_pairs) {
  Recorder r("frattini");
  std::mt19937_64 rng(seed);
  const GroupOracle& G = tower.oracle();
  std::size_t refuted = 0, unknown = 0;
  for (std::size_t i = 0; i < conjugate_pairs; ++i) {
    HElem g = random_helem(tower, rng, 3), c = random_helem(tower, rng, 2);
    HElem k = h_mult(h_mult(h_inv(G, c), g), c);
    k.g = G.reduce(k.g);
    Certificate cert = conjugacy_certificate(tower, g, k);
    std::string what = format_helem(G, g) + " ~ " + format_helem(G, k);
    r.check(cert.kind == Certificate::Kind::ConjugateWitness && cert.verified_depth >= 4,
            "no verified witness for " + what);
    r.check(recheck_certificate(tower, g, k, cert), "witness fails recheck for " + what);
  }
  for (std::size_t i = 0; i < other_pairs; ++i) {
    HElem g, k;
    do {
      g = random_helem(tower, rng, 3);
      k = random_helem(tower, rng, 3);
    } while (!std::holds_alternative<NotConjugate>(conjugate_in_G(G, g.g, k.g)));
    Certificate cert = conjugacy_certificate(tower, g, k);
    std::string what = format_helem(G, g) + " vs " + format_helem(G, k);
    r.check(cert.kind != Certificate::Kind::ConjugateWitness, "false witness for " + what);
    r.check(recheck_certificate(tower, g, k, cert), "certificate fails recheck for " + what);
    refuted += cert.kind == Certificate::Kind::NotConjugateAtLevel;
    unknown += cert.kind == Certificate::Kind::Unknown;
  }
  r.note("conjugate_pairs", std::to_string(conjugate_pairs));
  r.note("non_conjugate_refuted", std::to_string(refuted));
  r.note("non_conjugate_unknown", std::to_string(unknown));
  return r.finish();
}

}  // namespace branchgrp
