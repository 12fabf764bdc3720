#include "branchgrp/treeauto.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "branchgrp/errors.hpp"

namespace branchgrp {

struct TreeAut::Node {
  Kind kind = Kind::Identity;
  std::size_t level = 0;
  std::optional<Perm> perm;
  std::optional<Perm> perm_inv;
  std::optional<HElem> h;
  Vertex shift;
  std::vector<TreeAut> children;
  std::string key;
};

namespace {

std::string helem_key(const HElem& h) {
  std::string out;
  for (Generator g : h.g.letters) {
    out += std::to_string(g);
    out += '.';
  }
  out += '/';
  for (Point i : h.a.perm().images()) out += static_cast<char>('0' + i);
  return out;
}

std::string vertex_key(const Vertex& v) {
  std::string out;
  for (Point p : v.letters) {
    out += std::to_string(p);
    out += ',';
  }
  return out;
}

struct SectionCache {
  std::mutex mutex;
  std::unordered_map<std::string, TreeAut> entries;
};

struct MovedCache {
  std::mutex mutex;
  std::unordered_map<std::string, std::optional<std::vector<Point>>> entries;
};

SectionCache& section_cache(const Tower& tower) {
  auto slot = tower.cache_slot("treeauto.section", [] { return std::make_shared<SectionCache>(); });
  return *static_cast<SectionCache*>(slot.get());
}

MovedCache& moved_cache(const Tower& tower) {
  auto slot = tower.cache_slot("treeauto.moved", [] { return std::make_shared<MovedCache>(); });
  return *static_cast<MovedCache*>(slot.get());
}

// letters[start..] are read relative to a tree of base level `a.base_level()`.
void act(const Tower& tower, const TreeAut& a, std::vector<Point>& letters, std::size_t start,
         bool inv) {
  if (start >= letters.size()) return;
  switch (a.kind()) {
    case TreeAut::Kind::Identity:
      return;
    case TreeAut::Kind::Rooted:
      letters[start] = inv ? a.perm_inverse()(letters[start]) : a.perm()(letters[start]);
      return;
    case TreeAut::Kind::Tilde: {
      std::size_t i = start;
      std::size_t m = a.base_level() + 1;
      while (i < letters.size() && letters[i] == tower.alphabet(m).x()) {
        ++i;
        ++m;
      }
      if (i + 1 >= letters.size()) return;
      const AlphabetLevel& alpha = tower.alphabet(m);
      if (letters[i] == alpha.y()) {
        letters[i + 1] = tower.phi_image(m + 1, a.helem(), letters[i + 1], inv);
      } else if (letters[i] == alpha.z()) {
        letters[i + 1] = tower.psi_image(m + 1, a.helem().a, letters[i + 1], inv);
      }
      return;
    }
    case TreeAut::Kind::Shifted: {
      const auto& v = a.shift().letters;
      if (letters.size() - start <= v.size()) return;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (letters[start + j] != v[j]) return;
      }
      act(tower, a.inner(), letters, start + v.size(), inv);
      return;
    }
    case TreeAut::Kind::Product: {
      const auto& f = a.factors();
      if (!inv) {
        for (auto it = f.rbegin(); it != f.rend(); ++it) act(tower, *it, letters, start, false);
      } else {
        for (const auto& x : f) act(tower, x, letters, start, true);
      }
      return;
    }
    case TreeAut::Kind::Inverse:
      act(tower, a.inner(), letters, start, !inv);
      return;
  }
}

TreeAut section_uncached(const Tower& tower, const TreeAut& a, Point d) {
  std::size_t next = a.base_level() + 1;
  switch (a.kind()) {
    case TreeAut::Kind::Identity:
    case TreeAut::Kind::Rooted:
      return TreeAut::identity(next);
    case TreeAut::Kind::Tilde: {
      const AlphabetLevel& alpha = tower.alphabet(next);
      if (d == alpha.x()) return TreeAut::tilde(next, a.helem());
      if (d == alpha.y()) return TreeAut::rooted(next, tower.phi(next + 1, a.helem()));
      if (d == alpha.z()) return TreeAut::rooted(next, tower.psi(next + 1, a.helem()));
      return TreeAut::identity(next);
    }
    case TreeAut::Kind::Shifted:
      if (a.shift().letters.front() != d) return TreeAut::identity(next);
      return TreeAut::shifted(a.shift().suffix(1), a.inner());
    case TreeAut::Kind::Product: {
      const auto& f = a.factors();
      std::vector<TreeAut> parts(f.size(), TreeAut::identity(next));
      Point c = d;
      for (std::size_t i = f.size(); i-- > 0;) {
        parts[i] = section(tower, f[i], c);
        c = eval_letter(tower, f[i], c);
      }
      return TreeAut::product(next, std::move(parts));
    }
    case TreeAut::Kind::Inverse: {
      Point c = eval_letter(tower, a.inner(), d, true);
      return section(tower, a.inner(), c).inverse();
    }
  }
  return TreeAut::identity(next);
}

void check_level(const Tower& tower, const TreeAut& a, Point letter) {
  if (letter >= tower.alphabet(a.base_level() + 1).size()) {
    throw std::out_of_range("letter outside X_" + std::to_string(a.base_level() + 1));
  }
}

}  // namespace

Vertex Vertex::child(Point letter) const {
  Vertex v = *this;
  v.letters.push_back(letter);
  return v;
}

Vertex Vertex::suffix(std::size_t k) const {
  Vertex v;
  v.base_level = base_level + k;
  v.letters.assign(letters.begin() + static_cast<std::ptrdiff_t>(std::min(k, letters.size())),
                   letters.end());
  return v;
}

bool Vertex::extends(const Vertex& prefix) const {
  if (prefix.base_level != base_level || prefix.letters.size() > letters.size()) return false;
  return std::equal(prefix.letters.begin(), prefix.letters.end(), letters.begin());
}

std::string format_vertex(const Tower& tower, const Vertex& v) {
  if (v.letters.empty()) return "root";
  std::string out;
  for (std::size_t i = 0; i < v.letters.size(); ++i) {
    if (i) out += ' ';
    out += tower.alphabet(v.base_level + i + 1).label(v.letters[i]);
  }
  return out;
}

Vertex parse_vertex(const Tower& tower, std::size_t base_level, std::string_view text) {
  Vertex v{base_level, {}};
  std::istringstream in{std::string(text)};
  std::string token;
  std::size_t offset = 0;
  while (in >> token) {
    if (v.letters.empty() && token == "root") continue;
    auto idx = tower.alphabet(base_level + v.letters.size() + 1).letters()->index_of(token);
    if (!idx) throw ParseError("'" + token + "' is not a letter of X_" +
                                   std::to_string(base_level + v.letters.size() + 1),
                               offset);
    v.letters.push_back(*idx);
    ++offset;
  }
  return v;
}

TreeAut TreeAut::identity(std::size_t base_level) {
  auto n = std::make_shared<Node>();
  n->level = base_level;
  n->key = "I" + std::to_string(base_level);
  return TreeAut(std::move(n));
}

TreeAut TreeAut::rooted(std::size_t base_level, Perm sigma) {
  if (sigma.is_identity()) return identity(base_level);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Rooted;
  n->level = base_level;
  n->key = "R" + std::to_string(base_level) + "#" + std::to_string(intern_id(sigma));
  n->perm_inv = branchgrp::inverse(sigma);
  n->perm = std::move(sigma);
  return TreeAut(std::move(n));
}

TreeAut TreeAut::tilde(std::size_t base_level, HElem h) {
  if (h.g.empty() && h.a.is_identity()) return identity(base_level);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Tilde;
  n->level = base_level;
  n->key = "T" + std::to_string(base_level) + ":" + helem_key(h);
  n->h = std::move(h);
  return TreeAut(std::move(n));
}

TreeAut TreeAut::shifted(Vertex v, TreeAut inner) {
  if (inner.base_level() != v.base_level + v.depth()) {
    throw LevelMismatch("shifted automorphism must live at level " +
                        std::to_string(v.base_level + v.depth()));
  }
  if (v.letters.empty()) return inner;
  if (inner.is_identity()) return identity(v.base_level);
  if (inner.kind() == Kind::Shifted) {
    Vertex joined = v;
    const auto& rest = inner.shift().letters;
    joined.letters.insert(joined.letters.end(), rest.begin(), rest.end());
    return shifted(std::move(joined), inner.inner());
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Shifted;
  n->level = v.base_level;
  n->key = "S" + std::to_string(v.base_level) + "[" + vertex_key(v) + "]" + inner.key();
  n->shift = std::move(v);
  n->children.push_back(std::move(inner));
  return TreeAut(std::move(n));
}

TreeAut TreeAut::product(std::size_t base_level, std::vector<TreeAut> factors) {
  std::vector<TreeAut> flat;
  auto push = [&](const TreeAut& f) {
    if (f.is_identity()) return;
    if (f.kind() == Kind::Rooted && !flat.empty() && flat.back().kind() == Kind::Rooted) {
      TreeAut merged = rooted(base_level, compose(flat.back().perm(), f.perm()));
      flat.pop_back();
      if (!merged.is_identity()) flat.push_back(std::move(merged));
      return;
    }
    flat.push_back(f);
  };
  for (const auto& f : factors) {
    if (f.base_level() != base_level) {
      throw LevelMismatch("product factors must share base level " + std::to_string(base_level));
    }
    if (f.kind() == Kind::Product) {
      for (const auto& g : f.factors()) push(g);
    } else {
      push(f);
    }
  }
  if (flat.empty()) return identity(base_level);
  if (flat.size() == 1) return flat.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->level = base_level;
  n->key = "P" + std::to_string(base_level) + "[";
  for (const auto& f : flat) {
    n->key += f.key();
    n->key += ';';
  }
  n->key += ']';
  n->children = std::move(flat);
  return TreeAut(std::move(n));
}

TreeAut TreeAut::inverse() const {
  switch (kind()) {
    case Kind::Identity:
      return *this;
    case Kind::Rooted:
      return rooted(base_level(), perm_inverse());
    case Kind::Inverse:
      return inner();
    case Kind::Shifted:
      return shifted(shift(), inner().inverse());
    case Kind::Product: {
      std::vector<TreeAut> inv;
      for (auto it = factors().rbegin(); it != factors().rend(); ++it) inv.push_back(it->inverse());
      return product(base_level(), std::move(inv));
    }
    case Kind::Tilde:
      break;
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Inverse;
  n->level = base_level();
  n->key = "V(" + key() + ")";
  n->children.push_back(*this);
  return TreeAut(std::move(n));
}

std::size_t TreeAut::base_level() const noexcept { return node_->level; }
TreeAut::Kind TreeAut::kind() const noexcept { return node_->kind; }
const Perm& TreeAut::perm() const { return node_->perm.value(); }
const Perm& TreeAut::perm_inverse() const { return node_->perm_inv.value(); }
const HElem& TreeAut::helem() const { return node_->h.value(); }
const Vertex& TreeAut::shift() const { return node_->shift; }
const TreeAut& TreeAut::inner() const { return node_->children.at(0); }
const std::vector<TreeAut>& TreeAut::factors() const { return node_->children; }
const std::string& TreeAut::key() const noexcept { return node_->key; }

TreeAut operator*(const TreeAut& a, const TreeAut& b) {
  return TreeAut::product(a.base_level(), {a, b});
}

TreeAut embed_shift(const Vertex& v, const TreeAut& inner) { return TreeAut::shifted(v, inner); }

Vertex eval_vertex(const Tower& tower, const TreeAut& a, const Vertex& v) {
  if (v.base_level != a.base_level()) {
    throw LevelMismatch("vertex of level " + std::to_string(v.base_level) +
                        " evaluated by an automorphism of level " + std::to_string(a.base_level()));
  }
  Vertex out = v;
  act(tower, a, out.letters, 0, false);
  return out;
}

Point eval_letter(const Tower& tower, const TreeAut& a, Point letter, bool inverse) {
  std::vector<Point> one{letter};
  act(tower, a, one, 0, inverse);
  return one[0];
}

TreeAut section(const Tower& tower, const TreeAut& a, Point letter) {
  check_level(tower, a, letter);
  auto kind = a.kind();
  if (kind != TreeAut::Kind::Product && kind != TreeAut::Kind::Inverse) {
    return section_uncached(tower, a, letter);
  }
  SectionCache& cache = section_cache(tower);
  std::string key = a.key() + "@" + std::to_string(letter);
  {
    std::lock_guard lock(cache.mutex);
    auto it = cache.entries.find(key);
    if (it != cache.entries.end()) return it->second;
  }
  TreeAut result = section_uncached(tower, a, letter);
  std::lock_guard lock(cache.mutex);
  // Concurrent writers compute the same expression, so the first insert wins.
  return cache.entries.emplace(std::move(key), std::move(result)).first->second;
}

TreeAut section(const Tower& tower, const TreeAut& a, const Vertex& v) {
  if (v.base_level != a.base_level()) {
    throw LevelMismatch("section vertex level differs from the automorphism's base level");
  }
  TreeAut cur = a;
  for (Point d : v.letters) cur = section(tower, cur, d);
  return cur;
}

Perm root_perm(const Tower& tower, const TreeAut& a) {
  const AlphabetLevel& alpha = tower.alphabet(a.base_level() + 1);
  if (a.is_identity()) return Perm(alpha.letters());
  if (a.kind() == TreeAut::Kind::Rooted) return a.perm();
  std::vector<Point> images(alpha.size());
  for (Point d = 0; d < images.size(); ++d) images[d] = eval_letter(tower, a, d);
  return Perm(alpha.letters(), std::move(images));
}

std::size_t vertex_index(const Tower& tower, const Vertex& v) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < v.letters.size(); ++i) {
    idx = idx * tower.alphabet(v.base_level + i + 1).size() + v.letters[i];
  }
  return idx;
}

Vertex vertex_at(const Tower& tower, std::size_t base_level, std::size_t depth,
                 std::size_t index) {
  Vertex v{base_level, std::vector<Point>(depth)};
  for (std::size_t i = depth; i-- > 0;) {
    std::size_t s = tower.alphabet(base_level + i + 1).size();
    v.letters[i] = static_cast<Point>(index % s);
    index /= s;
  }
  return v;
}

namespace {

std::size_t checked_count(const Tower& tower, std::size_t base, std::size_t depth,
                          const char* what) {
  std::size_t cap = tower.limits().vertex_cap;
  std::size_t count = tower.vertex_count(base, depth, cap);
  if (count > cap) {
    throw CapExceeded(std::string(what) + ": " + std::to_string(depth) +
                      " levels exceed the vertex cap of " + std::to_string(cap) +
                      "; use portrait-based checks (equal_to_depth) instead");
  }
  return count;
}

// Advances a mixed-radix odometer; returns false after the last vertex.
bool next_vertex(const std::vector<std::size_t>& radix, std::vector<Point>& letters) {
  for (std::size_t i = letters.size(); i-- > 0;) {
    if (++letters[i] < radix[i]) return true;
    letters[i] = 0;
  }
  return false;
}

std::vector<std::size_t> radices(const Tower& tower, std::size_t base, std::size_t depth) {
  std::vector<std::size_t> r(depth);
  for (std::size_t i = 0; i < depth; ++i) r[i] = tower.alphabet(base + i + 1).size();
  return r;
}

}  // namespace

Perm level_perm(const Tower& tower, const TreeAut& a, std::size_t depth) {
  std::size_t count = checked_count(tower, a.base_level(), depth, "level_perm");
  auto radix = radices(tower, a.base_level(), depth);
  std::vector<Point> images(count);
  Vertex v{a.base_level(), std::vector<Point>(depth, 0)};
  std::size_t idx = 0;
  do {
    images[idx++] = static_cast<Point>(vertex_index(tower, eval_vertex(tower, a, v)));
  } while (next_vertex(radix, v.letters));
  return Perm(IndexedAlphabet::numeric(count), std::move(images));
}

Portrait portrait(const Tower& tower, const TreeAut& a, std::size_t depth) {
  std::size_t cap = tower.limits().vertex_cap;
  std::size_t internal = 0;
  for (std::size_t j = 0; j < depth; ++j) {
    internal += tower.vertex_count(a.base_level(), j, cap);
    if (internal > cap) {
      throw CapExceeded("portrait: more than " + std::to_string(cap) + " labelled vertices");
    }
  }
  Portrait p{a.base_level(), depth, {}};
  p.labels.reserve(internal);
  auto visit = [&](auto&& self, const Vertex& u, const TreeAut& s) -> void {
    if (u.depth() >= depth) return;
    p.labels.emplace_back(u, root_perm(tower, s));
    std::size_t n = tower.alphabet(u.base_level + u.depth() + 1).size();
    for (Point d = 0; d < n; ++d) self(self, u.child(d), section(tower, s, d));
  };
  visit(visit, Vertex{a.base_level(), {}}, a);
  return p;
}

std::string format_portrait_text(const Tower& tower, const Portrait& p) {
  std::string out = "portrait depth=" + std::to_string(p.depth) + "\n";
  for (const auto& [v, perm] : p.labels) {
    out += format_vertex(tower, v);
    out += " : ";
    out += to_cycle_string(perm);
    out += '\n';
  }
  return out;
}

std::string format_portrait_dot(const Tower& tower, const Portrait& p) {
  std::string out = "digraph portrait {\n  node [shape=box, fontname=\"monospace\"];\n";
  std::vector<std::size_t> last_at_depth;
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    const auto& [v, perm] = p.labels[i];
    std::string name =
        v.letters.empty() ? "root" : tower.alphabet(v.base_level + v.depth()).label(v.letters.back());
    out += "  v" + std::to_string(i) + " [label=\"" + name + "\\n" + to_cycle_string(perm) + "\"];\n";
    std::size_t d = v.depth();
    if (last_at_depth.size() <= d) last_at_depth.resize(d + 1);
    last_at_depth[d] = i;
    if (d > 0) {
      out += "  v" + std::to_string(last_at_depth[d - 1]) + " -> v" + std::to_string(i) + ";\n";
    }
  }
  out += "}\n";
  return out;
}

WreathDecomposition wreath_decompose(const Tower& tower, const TreeAut& a) {
  WreathDecomposition w{root_perm(tower, a), {}};
  std::size_t n = tower.alphabet(a.base_level() + 1).size();
  w.children.reserve(n);
  for (Point d = 0; d < n; ++d) w.children.push_back(section(tower, a, d));
  return w;
}

TreeAut wreath_recompose(std::size_t base_level, const WreathDecomposition& w) {
  std::vector<TreeAut> factors{TreeAut::rooted(base_level, w.root)};
  for (Point d = 0; d < w.children.size(); ++d) {
    factors.push_back(TreeAut::shifted(Vertex{base_level, {d}}, w.children[d]));
  }
  return TreeAut::product(base_level, std::move(factors));
}

namespace {

std::optional<std::vector<Point>> moved_rec(const Tower& tower, const TreeAut& a,
                                            std::size_t depth) {
  if (depth == 0 || a.is_identity()) return std::nullopt;
  std::size_t n = tower.alphabet(a.base_level() + 1).size();
  if (a.kind() == TreeAut::Kind::Rooted) {
    for (Point d = 0; d < n; ++d) {
      if (a.perm()(d) != d) return std::vector<Point>{d};
    }
    return std::nullopt;
  }
  MovedCache& cache = moved_cache(tower);
  std::string key = a.key() + "|" + std::to_string(depth);
  {
    std::lock_guard lock(cache.mutex);
    auto it = cache.entries.find(key);
    if (it != cache.entries.end()) return it->second;
  }
  std::optional<std::vector<Point>> result;
  for (Point d = 0; d < n && !result; ++d) {
    if (eval_letter(tower, a, d) != d) result = std::vector<Point>{d};
  }
  for (Point d = 0; d < n && !result && depth > 1; ++d) {
    if (auto r = moved_rec(tower, section(tower, a, d), depth - 1)) {
      r->insert(r->begin(), d);
      result = std::move(r);
    }
  }
  std::lock_guard lock(cache.mutex);
  return cache.entries.emplace(std::move(key), std::move(result)).first->second;
}

}  // namespace

std::optional<Vertex> moved_vertex(const Tower& tower, const TreeAut& a, std::size_t depth) {
  auto r = moved_rec(tower, a, depth);
  if (!r) return std::nullopt;
  return Vertex{a.base_level(), std::move(*r)};
}

bool fixes_to_depth(const Tower& tower, const TreeAut& a, std::size_t depth) {
  return !moved_rec(tower, a, depth).has_value();
}

bool equal_to_depth(const Tower& tower, const TreeAut& a, const TreeAut& b, std::size_t depth) {
  if (a.base_level() != b.base_level()) {
    throw LevelMismatch("compared automorphisms live on different trees");
  }
  if (a.key() == b.key()) return true;
  return fixes_to_depth(tower, TreeAut::product(a.base_level(), {b.inverse(), a}), depth);
}

std::optional<Vertex> brute_force_moved_vertex(const Tower& tower, const TreeAut& a,
                                               std::size_t depth) {
  std::optional<Vertex> found;
  auto dfs = [&](auto&& self, const Vertex& u, const TreeAut& s) -> void {
    if (s.is_identity() || u.depth() >= depth) return;
    std::size_t n = tower.alphabet(u.base_level + u.depth() + 1).size();
    for (Point d = 0; d < n && !found; ++d) {
      Vertex v = u.child(d);
      if (eval_vertex(tower, a, v) != v) {
        found = std::move(v);
        return;
      }
        if (v.depth() < depth) self(self, v, section(tower, s, d));
    }
  };
  dfs(dfs, Vertex{a.base_level(), {}}, a);
  return found;
}

std::optional<Vertex> naive_moved_vertex(const Tower& tower, const TreeAut& a, std::size_t depth) {
  checked_count(tower, a.base_level(), depth, "naive enumeration");
  auto radix = radices(tower, a.base_level(), depth);
  Vertex v{a.base_level(), std::vector<Point>(depth, 0)};
  do {
    if (eval_vertex(tower, a, v) != v) return v;
  } while (next_vertex(radix, v.letters));
  return std::nullopt;
}

}  // namespace branchgrp
