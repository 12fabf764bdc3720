#include "branchgrp/gammacalc.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <unordered_map>

#include "branchgrp/errors.hpp"

namespace branchgrp {

Token Token::rooted(Perm b, bool inverted) {
  Token t;
  t.kind = Kind::B;
  t.b = std::move(b);
  t.inverted = inverted;
  return t;
}

Token Token::helem(HElem h, bool inverted) {
  Token t;
  t.kind = Kind::H;
  t.h = std::move(h);
  t.inverted = inverted;
  return t;
}

GammaWord empty_word(const Tower& tower, std::size_t level) {
  return GammaWord{level, {Perm(tower.alphabet(level + 1).letters())}, {}};
}

std::size_t h_count(const GammaWord& w) { return w.h.size(); }

std::size_t sigma_length(const std::vector<Token>& tokens) {
  std::size_t n = 0;
  for (const auto& t : tokens) n += t.kind == Token::Kind::B ? 1 : std::max<std::size_t>(1, t.h.g.length());
  return n;
}

// ---------------------------------------------------------------------------
// Normal forms

namespace {

struct Item {
  bool is_b = false;
  std::optional<Perm> b;
  HElem h;
  std::vector<std::size_t> origin;
};

class Normalizer {
 public:
  Normalizer(const Tower& tower, std::size_t level)
      : tower_(tower), level_(level), alphabet_(tower.alphabet(level + 1).letters()) {}

  void push_b(const Perm& p) {
    if (!stack_.empty() && stack_.back().is_b) {
      Perm merged = compose(*stack_.back().b, p);
      stack_.pop_back();
      if (!merged.is_identity()) stack_.push_back(Item{true, std::move(merged), {}, {}});
      return;
    }
    if (!p.is_identity()) stack_.push_back(Item{true, p, {}, {}});
  }

  void push_h(HElem h, std::vector<std::size_t> origin) {
    h.g = tower_.oracle().reduce(h.g);
    if (!stack_.empty() && !stack_.back().is_b) {
      Item top = std::move(stack_.back());
      stack_.pop_back();
      HElem merged = h_mult(top.h, h);
      merged.g = tower_.oracle().reduce(merged.g);
      if (tower_.is_trivial(merged)) return;
      top.origin.insert(top.origin.end(), origin.begin(), origin.end());
      stack_.push_back(Item{false, std::nullopt, std::move(merged), std::move(top.origin)});
      return;
    }
    if (tower_.is_trivial(h)) return;
    stack_.push_back(Item{false, std::nullopt, std::move(h), std::move(origin)});
  }

  SectionTrace finish() {
    SectionTrace out;
    out.word.level = level_;
    Perm id(alphabet_);
    bool want_b = true;
    for (auto& item : stack_) {
      if (item.is_b) {
        out.word.b.push_back(std::move(*item.b));
        want_b = false;
      } else {
        if (want_b) out.word.b.push_back(id);
        out.word.h.push_back(std::move(item.h));
        out.origins.push_back(std::move(item.origin));
        want_b = true;
      }
    }
    if (want_b) out.word.b.push_back(id);
    return out;
  }

 private:
  const Tower& tower_;
  std::size_t level_;
  AlphabetPtr alphabet_;
  std::vector<Item> stack_;
};

}  // namespace

GammaWord normal_form(const Tower& tower, std::size_t level, const std::vector<Token>& tokens) {
  Normalizer n(tower, level);
  const auto& alpha = tower.alphabet(level + 1).letters();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.kind == Token::Kind::B) {
      if (!t.b || !same_alphabet(t.b->alphabet(), alpha)) {
        throw PreconditionError("B letter " + std::to_string(i) + " does not act on X_" +
                                std::to_string(level + 1));
      }
      if (sign(*t.b) != 1) {
        throw PreconditionError("B letter " + std::to_string(i) + " is odd; B_" +
                                std::to_string(level) + " is the rooted alternating group");
      }
      n.push_b(t.inverted ? inverse(*t.b) : *t.b);
    } else {
      n.push_h(t.inverted ? h_inv(tower.oracle(), t.h) : t.h, {i});
    }
  }
  return n.finish().word;
}

std::vector<Token> tokens_of(const GammaWord& w) {
  std::vector<Token> out;
  for (std::size_t i = 0; i < w.b.size(); ++i) {
    if (!w.b[i].is_identity()) out.push_back(Token::rooted(w.b[i]));
    if (i < w.h.size()) out.push_back(Token::helem(w.h[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sections

SectionTrace section_word_traced(const Tower& tower, const GammaWord& w, Point d) {
  const AlphabetLevel& alpha = tower.alphabet(w.level + 1);
  if (d >= alpha.size()) throw LevelMismatch("section letter is not in X_" + std::to_string(w.level + 1));
  const std::size_t n = w.h.size();
  // c[i]: the first-level letter at which h̃_i is sectioned.
  std::vector<Point> c(n);
  Point cur = w.b[n](d);
  for (std::size_t i = n; i-- > 0;) {
    c[i] = cur;
    cur = w.b[i](cur);
  }
  Normalizer out(tower, w.level + 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (c[i] == alpha.x()) {
      out.push_h(w.h[i], {i});
    } else if (c[i] == alpha.y()) {
      out.push_b(tower.phi(w.level + 2, w.h[i]));
    } else if (c[i] == alpha.z()) {
      out.push_b(tower.psi(w.level + 2, w.h[i]));
    }
  }
  return out.finish();
}

GammaWord section_word(const Tower& tower, const GammaWord& w, Point d) {
  return section_word_traced(tower, w, d).word;
}

Perm word_root_perm(const Tower&, const GammaWord& w) {
  Perm p = w.b.front();
  for (std::size_t i = 1; i < w.b.size(); ++i) p = compose(p, w.b[i]);
  return p;
}

TreeAut pr(const GammaWord& w) {
  std::vector<TreeAut> f;
  for (std::size_t i = 0; i < w.b.size(); ++i) {
    f.push_back(TreeAut::rooted(w.level, w.b[i]));
    if (i < w.h.size()) f.push_back(TreeAut::tilde(w.level, w.h[i]));
  }
  return TreeAut::product(w.level, std::move(f));
}

TreeAut pr(std::size_t level, const std::vector<Token>& tokens) {
  std::vector<TreeAut> f;
  for (const auto& t : tokens) {
    TreeAut a = t.kind == Token::Kind::B ? TreeAut::rooted(level, *t.b) : TreeAut::tilde(level, t.h);
    f.push_back(t.inverted ? a.inverse() : a);
  }
  return TreeAut::product(level, std::move(f));
}

std::string word_key(const Tower& tower, const GammaWord& w) {
  std::string key = "L" + std::to_string(w.level) + ";";
  for (std::size_t i = 0; i < w.b.size(); ++i) {
    key += w.b[i].is_identity() ? "e" : std::to_string(intern_id(w.b[i]));
    key += ';';
    if (i < w.h.size()) {
      key += tower.oracle().normal_form_key(w.h[i].g);
      key += '/';
      for (Point p : w.h[i].a.perm().images()) key += static_cast<char>('0' + p);
      key += ';';
    }
  }
  return key;
}

// ---------------------------------------------------------------------------
// Word problem

namespace {

struct WpCache {
  std::mutex mutex;
  std::unordered_map<std::string, std::optional<std::vector<Point>>> entries;
};

WpCache& wp_cache(const Tower& tower) {
  auto slot = tower.cache_slot("gammacalc.wp", [] { return std::make_shared<WpCache>(); });
  return *static_cast<WpCache*>(slot.get());
}

std::optional<std::vector<Point>> moved_rec(const Tower& tower, const GammaWord& w,
                                            std::size_t depth) {
  if (depth == 0) return std::nullopt;
  Perm root = word_root_perm(tower, w);
  if (!root.is_identity()) {
    for (Point d = 0; d < root.degree(); ++d) {
      if (root(d) != d) return std::vector<Point>{d};
    }
  }
  // A pure-B word with trivial root permutation is the identity.
  if (w.h.empty() || depth == 1) return std::nullopt;
  WpCache& cache = wp_cache(tower);
  std::string key = word_key(tower, w) + "|" + std::to_string(depth);
  {
    std::lock_guard lock(cache.mutex);
    auto it = cache.entries.find(key);
    if (it != cache.entries.end()) return it->second;
  }
  std::optional<std::vector<Point>> result;
  const Point n = static_cast<Point>(tower.alphabet(w.level + 1).size());
  for (Point d = 0; d < n && !result; ++d) {
    GammaWord s = section_word(tower, w, d);
    if (s.h.empty() && s.b.front().is_identity()) continue;
    if (auto r = moved_rec(tower, s, depth - 1)) {
      r->insert(r->begin(), d);
      result = std::move(r);
    }
  }
  std::lock_guard lock(cache.mutex);
  return cache.entries.emplace(std::move(key), std::move(result)).first->second;
}

}  // namespace

std::optional<Vertex> word_moved_vertex(const Tower& tower, const GammaWord& w, std::size_t depth) {
  auto r = moved_rec(tower, w, depth);
  if (!r) return std::nullopt;
  return Vertex{w.level, std::move(*r)};
}

WpResult decide_wp_Gamma(const Tower& tower, const GammaWord& w, std::size_t ell) {
  WpResult out;
  out.ell = ell;
  out.depth = 2 * ell;
  out.witness = word_moved_vertex(tower, w, out.depth);
  out.trivial = !out.witness.has_value();
  return out;
}

WpResult decide_wp_Gamma(const Tower& tower, const std::vector<Token>& tokens) {
  return decide_wp_Gamma(tower, normal_form(tower, 0, tokens), sigma_length(tokens));
}

Portrait word_portrait(const Tower& tower, const GammaWord& w, std::size_t depth) {
  std::size_t cap = tower.limits().vertex_cap;
  std::size_t internal = 0;
  for (std::size_t j = 0; j < depth; ++j) {
    internal += tower.vertex_count(w.level, j, cap);
    if (internal > cap) {
      throw CapExceeded("portrait: more than " + std::to_string(cap) + " labelled vertices");
    }
  }
  Portrait p{w.level, depth, {}};
  std::unordered_map<std::string, Perm> roots;
  auto visit = [&](auto&& self, const Vertex& u, const GammaWord& s) -> void {
    if (u.depth() >= depth) return;
    std::string key = word_key(tower, s);
    auto it = roots.find(key);
    if (it == roots.end()) it = roots.emplace(key, word_root_perm(tower, s)).first;
    p.labels.emplace_back(u, it->second);
    const Point n = static_cast<Point>(tower.alphabet(s.level + 1).size());
    for (Point d = 0; d < n; ++d) self(self, u.child(d), section_word(tower, s, d));
  };
  visit(visit, Vertex{w.level, {}}, w);
  return p;
}

// ---------------------------------------------------------------------------
// Effective residual finiteness for Γ₀

EfrfGammaAnswer efrf_output_Gamma(const Tower& tower, const std::vector<Token>& tokens) {
  WpResult wp = decide_wp_Gamma(tower, tokens);
  if (wp.trivial) return TrivialMarker{};
  EfrfGammaOutput out;
  out.depth = wp.depth;
  out.witness = *wp.witness;
  // Any extension of a moved vertex is moved.
  while (out.witness.depth() < out.depth) out.witness.letters.push_back(0);
  std::size_t cap = tower.limits().vertex_cap;
  std::size_t count = tower.vertex_count(0, out.depth, cap);
  out.degraded = count > cap;
  out.degree = out.degraded ? 0 : count;
  std::set<std::string> seen;
  for (const auto& t : tokens) {
    std::string label = format_token(tower, t);
    if (!seen.insert(label).second) continue;
    GeneratorImage g{label, std::nullopt};
    if (!out.degraded) g.image = level_perm(tower, pr(0, {t}), out.depth);
    out.images.push_back(std::move(g));
  }
  return out;
}

std::string format_efrf_output(const Tower& tower, const EfrfGammaOutput& out) {
  std::string s = "depth " + std::to_string(out.depth) + "\n";
  if (out.degraded) {
    s += "degraded vertex-cap " + std::to_string(tower.limits().vertex_cap) + "\n";
  } else {
    s += "degree " + std::to_string(out.degree) + "\n";
  }
  for (const auto& g : out.images) {
    s += g.token + " -> ";
    s += g.image ? to_cycle_string(*g.image) : std::string("lazy (apply eval_vertex to a vertex)");
    s += '\n';
  }
  s += "witness " + format_vertex(tower, out.witness) + "\n";
  return s;
}

// ---------------------------------------------------------------------------
// Conjugacy testbed

CycleCounts cycle_counts(const Perm& p) {
  CycleCounts out;
  for (std::size_t len : cycle_type(p)) {
    if (!out.empty() && out.back().first == len) {
      ++out.back().second;
    } else {
      out.emplace_back(len, 1);
    }
  }
  return out;
}

std::vector<Perm> default_b_generators(const Tower& tower) {
  const AlphabetLevel& X = tower.alphabet(1);
  const std::vector<Point> pts{X.x(), X.y(), X.z(), X.o(), X.p(), X.q()};
  std::vector<Perm> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (i == j || j == k || i == k) continue;
        // each 3-cycle once, written from its smallest point
        if (!(i < j && i < k)) continue;
        out.push_back(Perm::from_cycles(X.letters(), {{pts[i], pts[j], pts[k]}}));
      }
  return out;
}

std::string certificate_kind_name(Certificate::Kind kind) {
  switch (kind) {
    case Certificate::Kind::ConjugateWitness: return "ConjugateWitness";
    case Certificate::Kind::NotConjugateAtLevel: return "NotConjugateAtLevel";
    case Certificate::Kind::Unknown: break;
  }
  return "Unknown";
}

std::vector<std::pair<HElem, std::size_t>> h_ball(const Tower& tower, std::size_t radius) {
  const GroupOracle& G = tower.oracle();
  // A-part: breadth-first layers of Alt(6) over the 3-cycles (x y k)^±.
  std::vector<AElem> gens;
  for (const char* c : {"(x y z)", "(x y o)", "(x y p)", "(x y q)"}) {
    AElem a = AElem::parse(c);
    gens.push_back(a);
    gens.push_back(inverse(a));
  }
  std::vector<std::pair<AElem, std::size_t>> a_ball{{AElem{}, 0}};
  std::set<std::vector<Point>> seen{{0, 1, 2, 3, 4, 5}};
  for (std::size_t i = 0; i < a_ball.size(); ++i) {
    if (a_ball[i].second >= radius) continue;
    for (const auto& s : gens) {
      AElem next = s * a_ball[i].first;
      auto img = std::vector<Point>(next.perm().images().begin(), next.perm().images().end());
      if (seen.insert(img).second) a_ball.emplace_back(next, a_ball[i].second + 1);
    }
  }
  std::vector<std::pair<HElem, std::size_t>> out;
  auto g_ball = G.ball(radius);
  for (std::size_t total = 0; total <= radius; ++total) {
    for (const auto& g : g_ball) {
      for (const auto& [a, la] : a_ball) {
        if (g.length() + la == total) out.emplace_back(HElem{g, a}, total);
      }
    }
  }
  return out;
}

namespace {

bool same_on_level(const Tower& tower, const Perm& lg, const Perm& lk, const TreeAut& c,
                   std::size_t depth) {
  Perm lc = level_perm(tower, c, depth);
  for (Point i = 0; i < lc.degree(); ++i) {
    if (lg(lc(i)) != lc(lk(i))) return false;
  }
  return true;
}

// Words of Σ₀-length above this are not decided exactly during the search.
constexpr std::size_t kExactEll = 4;

std::vector<Token> conjugation_word(const GammaWord& c, const HElem& g, const HElem& k) {
  // c⁻¹ g̃ c k̃⁻¹
  std::vector<Token> ct = tokens_of(c);
  std::vector<Token> out;
  for (auto it = ct.rbegin(); it != ct.rend(); ++it) {
    Token t = *it;
    t.inverted = !t.inverted;
    out.push_back(t);
  }
  out.push_back(Token::helem(g));
  out.insert(out.end(), ct.begin(), ct.end());
  out.push_back(Token::helem(k, true));
  return out;
}

std::optional<AElem> a_conjugator(const AElem& g, const AElem& k) {
  std::vector<Point> images{0, 1, 2, 3, 4, 5};
  do {
    Perm p(a_alphabet(), images);
    if (sign(p) != 1) continue;
    if (conjugate(g.perm(), p) == k.perm()) return AElem(p);
  } while (std::next_permutation(images.begin(), images.end()));
  return std::nullopt;
}

}  // namespace

Certificate conjugacy_certificate(const Tower& tower, const HElem& g, const HElem& k,
                                  const CertificateBounds& bounds) {
  Certificate cert;
  const GroupOracle& G = tower.oracle();
  TreeAut tg = TreeAut::tilde(0, g), tk = TreeAut::tilde(0, k);
  auto log = [&](std::string line) { cert.transcript.push_back(std::move(line)); };

  // (a) a conjugator in H = G × A maps to one in Γ₀.
  ConjugacyAnswer ans = conjugate_in_G(G, g.g, k.g);
  if (auto* c = std::get_if<GWord>(&ans)) {
    log("G: conjugator " + G.format_word(*c));
    if (auto ac = a_conjugator(g.a, k.a)) {
      HElem ch{*c, *ac};
      GammaWord w = normal_form(tower, 0, {Token::helem(ch)});
      TreeAut pc = pr(w);
      TreeAut lhs = TreeAut::product(0, {pc.inverse(), tg, pc});
      if (equal_to_depth(tower, lhs, tk, bounds.depth)) {
        log("verified c^-1 g c = k to depth " + std::to_string(bounds.depth));
        cert.kind = Certificate::Kind::ConjugateWitness;
        cert.witness = std::move(w);
        cert.verified_depth = bounds.depth;
        return cert;
      }
      log("H-conjugator failed verification");
    } else {
      log("A: parts not conjugate in Alt(6)");
    }
  } else if (std::holds_alternative<NotConjugate>(ans)) {
    log("G: not conjugate");
  } else {
    log("G: conjugacy unsupported");
  }

  // (b) level permutations of conjugate automorphisms have equal cycle types.
  std::size_t cap = tower.limits().vertex_cap;
  std::size_t reachable = 0;
  for (std::size_t d = 1; d <= bounds.depth; ++d) {
    if (tower.vertex_count(0, d, cap) > cap) {
      log("level " + std::to_string(d) + ": beyond vertex cap");
      break;
    }
    reachable = d;
    auto cg = cycle_counts(level_perm(tower, tg, d));
    auto ck = cycle_counts(level_perm(tower, tk, d));
    if (cg != ck) {
      log("level " + std::to_string(d) + ": cycle types differ");
      cert.kind = Certificate::Kind::NotConjugateAtLevel;
      cert.level = d;
      cert.type_g = std::move(cg);
      cert.type_k = std::move(ck);
      return cert;
    }
    log("level " + std::to_string(d) + ": cycle types agree");
  }

  // (c) bounded search over normal-form candidates b_1 h_1 ... h_m b_{m+1}.
  std::vector<Perm> bg = bounds.b_gens.empty() ? default_b_generators(tower) : bounds.b_gens;
  std::vector<Perm> b_any{Perm(tower.alphabet(1).letters())};
  b_any.insert(b_any.end(), bg.begin(), bg.end());
  std::vector<HElem> hs;
  for (auto& [h, len] : h_ball(tower, bounds.h_radius)) {
    if (!tower.is_trivial(h)) hs.push_back(h);
  }
  std::size_t filter = std::min<std::size_t>(2, reachable);
  std::optional<Perm> lg, lk;
  if (filter > 0) {
    lg = level_perm(tower, tg, filter);
    lk = level_perm(tower, tk, filter);
  }
  std::size_t tried = 0, deferred = 0;
  for (std::size_t m = 0; m <= bounds.max_h_count; ++m) {
    if (m > 0 && hs.empty()) break;
    // odometer over (b_1, h_1, ..., h_m, b_{m+1})
    std::vector<std::size_t> bi(m + 1, 0), hi(m, 0);
    if (m == 0) bi[0] = 1;
    for (;;) {
      bool valid = m > 0 || bi[0] > 0;
      for (std::size_t j = 1; j < m; ++j) valid = valid && bi[j] > 0;
      if (valid) {
        GammaWord w{0, {}, {}};
        for (std::size_t j = 0; j <= m; ++j) {
          w.b.push_back(b_any[bi[j]]);
          if (j < m) w.h.push_back(hs[hi[j]]);
        }
        ++tried;
        TreeAut pc = pr(w);
        if (!lg || same_on_level(tower, *lg, *lk, pc, filter)) {
          TreeAut lhs = TreeAut::product(0, {pc.inverse(), tg, pc});
          if (equal_to_depth(tower, lhs, tk, bounds.depth)) {
            auto word = conjugation_word(w, g, k);
            GammaWord nf = normal_form(tower, 0, word);
            std::size_t ell = sigma_length(tokens_of(nf));
            if (ell <= kExactEll && decide_wp_Gamma(tower, nf, ell).trivial) {
              log("candidate " + format_gamma_word(tower, w) + " verified to depth " +
                  std::to_string(bounds.depth) + " and decided exactly at depth " +
                  std::to_string(2 * ell));
              cert.kind = Certificate::Kind::ConjugateWitness;
              cert.witness = std::move(w);
              cert.verified_depth = std::max(bounds.depth, 2 * ell);
              return cert;
            }
            ++deferred;
          }
        }
      }
      // advance
      std::size_t pos = 0;
      const std::size_t slots = 2 * m + 1;
      for (; pos < slots; ++pos) {
        if (pos % 2 == 0) {
          auto& x = bi[pos / 2];
          if (++x < b_any.size()) break;
          x = 0;
        } else {
          auto& x = hi[pos / 2];
          if (++x < hs.size()) break;
          x = 0;
        }
      }
      if (pos == slots) break;
    }
  }
  log("search: " + std::to_string(tried) + " candidates, " + std::to_string(deferred) +
      " agreed to depth " + std::to_string(bounds.depth) + " without an exact check");
  cert.kind = Certificate::Kind::Unknown;
  return cert;
}

bool recheck_certificate(const Tower& tower, const HElem& g, const HElem& k, const Certificate& c) {
  TreeAut tg = TreeAut::tilde(0, g), tk = TreeAut::tilde(0, k);
  switch (c.kind) {
    case Certificate::Kind::ConjugateWitness: {
      TreeAut pc = pr(c.witness);
      return equal_to_depth(tower, TreeAut::product(0, {pc.inverse(), tg, pc}), tk, c.verified_depth);
    }
    case Certificate::Kind::NotConjugateAtLevel: {
      auto cg = cycle_counts(level_perm(tower, tg, c.level));
      auto ck = cycle_counts(level_perm(tower, tk, c.level));
      return cg == c.type_g && ck == c.type_k && cg != ck;
    }
    case Certificate::Kind::Unknown:
      break;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Branch identities

bool BranchIdentityReport::passed() const {
  return std::all_of(instances.begin(), instances.end(),
                     [](const auto& i) { return i.commutator_ok && i.shift_ok; });
}

BranchIdentityReport verify_branch_identities(const Tower& tower, std::size_t sample_count,
                                              std::uint64_t seed, std::size_t depth) {
  const AlphabetLevel& X = tower.alphabet(1);
  BranchIdentityReport report;
  report.alphabet_size = X.size();
  if (X.size() < 7) throw PreconditionError("|X_1| < 7: no displacement σ available");
  // σ fixes z₁ and moves {x₁, y₁} onto {o₁, p₁}.
  Perm sigma = Perm::from_cycles(X.letters(), {{X.x(), X.o()}, {X.y(), X.p()}});
  TreeAut rs = TreeAut::rooted(0, sigma);
  const GroupOracle& G = tower.oracle();
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < sample_count; ++i) {
    BranchIdentityInstance inst{random_helem(tower, rng, 3), random_helem(tower, rng, 3)};
    TreeAut th = TreeAut::tilde(0, inst.h), tk = TreeAut::tilde(0, inst.k);
    TreeAut conj = TreeAut::product(0, {rs.inverse(), th, rs});
    TreeAut comm = TreeAut::product(0, {conj.inverse(), tk.inverse(), conj, tk});
    HElem hk = h_mult(h_mult(h_inv(G, inst.h), h_inv(G, inst.k)), h_mult(inst.h, inst.k));
    TreeAut expect = embed_shift(Vertex{0, {X.z()}}, TreeAut::rooted(1, tower.psi(2, hk)));
    inst.commutator_ok = equal_to_depth(tower, comm, expect, depth);

    TreeAut lhs = TreeAut::product(
        0, {th, embed_shift(Vertex{0, {X.y()}}, TreeAut::rooted(1, inverse(tower.phi(2, inst.h)))),
            embed_shift(Vertex{0, {X.z()}}, TreeAut::rooted(1, inverse(tower.psi(2, inst.h))))});
    TreeAut rhs = embed_shift(Vertex{0, {X.x()}}, TreeAut::tilde(1, inst.h));
    inst.shift_ok = equal_to_depth(tower, lhs, rhs, depth);
    report.instances.push_back(std::move(inst));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Word syntax

std::vector<Token> parse_word_file(const Tower& tower, std::size_t level, std::string_view text) {
  std::vector<Token> out;
  const GroupOracle& G = tower.oracle();
  const auto& alpha = tower.alphabet(level + 1).letters();
  std::size_t i = 0, index = 0;
  while (true) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size() && text[i] == '#') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (i >= text.size()) break;
    char head = text[i];
    if ((head != 'B' && head != 'H') || i + 1 >= text.size() || text[i + 1] != '(') {
      throw ParseError("token " + std::to_string(index) + ": expected B(...) or H(...)", index);
    }
    std::size_t depth = 0, j = i + 1;
    for (; j < text.size(); ++j) {
      if (text[j] == '(') ++depth;
      if (text[j] == ')' && --depth == 0) break;
    }
    if (j >= text.size()) throw ParseError("token " + std::to_string(index) + ": unbalanced parentheses", index);
    std::string_view body = text.substr(i + 2, j - i - 2);
    bool inverted = j + 1 < text.size() && text[j + 1] == '\'';
    try {
      if (head == 'B') {
        Perm p = parse_cycles(alpha, body);
        if (sign(p) != 1) throw ParseError("B letters must be even permutations", 0);
        out.push_back(Token::rooted(std::move(p), inverted));
      } else {
        out.push_back(Token::helem(parse_helem(G, body), inverted));
      }
    } catch (const ParseError& e) {
      throw ParseError("token " + std::to_string(index) + ": " + e.what(), index);
    } catch (const std::invalid_argument& e) {
      throw ParseError("token " + std::to_string(index) + ": " + e.what(), index);
    }
    i = j + 1 + (inverted ? 1 : 0);
    if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
      throw ParseError("token " + std::to_string(index) + ": tokens must be separated by whitespace", index);
    }
    ++index;
  }
  return out;
}

std::string format_token(const Tower& tower, const Token& t) {
  std::string s = t.kind == Token::Kind::B ? "B(" + to_cycle_string(*t.b) + ")"
                                           : "H(" + format_helem(tower.oracle(), t.h) + ")";
  if (t.inverted) s += "'";
  return s;
}

std::string format_tokens(const Tower& tower, const std::vector<Token>& tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s += ' ';
    s += format_token(tower, tokens[i]);
  }
  return s;
}

std::string format_gamma_word(const Tower& tower, const GammaWord& w) {
  auto t = tokens_of(w);
  return t.empty() ? std::string("1") : format_tokens(tower, t);
}

// ---------------------------------------------------------------------------
// Samplers

HElem random_helem(const Tower& tower, std::mt19937_64& rng, std::size_t max_g_length) {
  HElem h;
  std::size_t len = max_g_length ? rng() % (max_g_length + 1) : 0;
  std::size_t gens = tower.oracle().generator_count();
  for (std::size_t i = 0; i < len; ++i) h.g.letters.push_back(static_cast<Generator>(rng() % gens));
  std::vector<Point> images{0, 1, 2, 3, 4, 5};
  std::shuffle(images.begin(), images.end(), rng);
  Perm a(a_alphabet(), images);
  if (sign(a) != 1) std::swap(images[4], images[5]);
  h.a = AElem(Perm(a_alphabet(), images));
  return h;
}

Perm random_b(const Tower& tower, std::size_t level, std::mt19937_64& rng) {
  const auto& alpha = tower.alphabet(level + 1).letters();
  const Point n = static_cast<Point>(alpha->size());
  auto three_cycle = [&] {
    Point a = rng() % n, b, c;
    do b = rng() % n; while (b == a);
    do c = rng() % n; while (c == a || c == b);
    return Perm::from_cycles(alpha, {{a, b, c}});
  };
  Perm p = three_cycle();
  if (rng() % 2) p = compose(p, three_cycle());
  return p;
}

Token random_token(const Tower& tower, std::size_t level, std::mt19937_64& rng,
                   std::size_t max_g_length) {
  bool inverted = rng() % 5 == 0;
  if (rng() % 2) return Token::rooted(random_b(tower, level, rng), inverted);
  return Token::helem(random_helem(tower, rng, max_g_length), inverted);
}

std::vector<Token> desk_tokens(const Tower& tower) {
  const GroupOracle& G = tower.oracle();
  const AlphabetLevel& X = tower.alphabet(1);
  std::vector<Token> base;
  for (Generator s = 0; s < G.generator_count(); ++s) {
    base.push_back(Token::helem(HElem{GWord{{s}}, AElem{}}));
  }
  base.push_back(Token::helem(HElem{GWord{}, AElem::parse("(x y z)")}));
  base.push_back(Token::helem(HElem{GWord{}, AElem::parse("(x y)(z o)")}));
  base.push_back(Token::helem(HElem{GWord{{0}}, AElem::parse("(x o p)")}));
  base.push_back(Token::rooted(Perm::from_cycles(X.letters(), {{X.x(), X.y(), X.z()}})));
  base.push_back(Token::rooted(Perm::from_cycles(X.letters(), {{X.x(), X.o()}, {X.y(), X.p()}})));
  base.push_back(Token::rooted(Perm::from_cycles(X.letters(), {{X.z(), X.p(), X.q()}})));
  std::vector<Token> out = base;
  for (Token t : base) {
    t.inverted = true;
    out.push_back(std::move(t));
  }
  return out;
}

GammaWord random_normal_word(const Tower& tower, std::size_t level, std::size_t n,
                             std::mt19937_64& rng) {
  GammaWord w{level, {}, {}};
  const auto& alpha = tower.alphabet(level + 1).letters();
  for (std::size_t i = 0; i <= n; ++i) {
    bool end = i == 0 || i == n;
    w.b.push_back(end && rng() % 3 == 0 ? Perm(alpha) : random_b(tower, level, rng));
    if (i < n) {
      HElem h;
      do h = random_helem(tower, rng, 2); while (tower.is_trivial(h));
      h.g = tower.oracle().reduce(h.g);
      w.h.push_back(std::move(h));
    }
  }
  return w;
}

}  // namespace branchgrp
