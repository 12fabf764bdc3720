#include "branchgrp/resfin.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "branchgrp/errors.hpp"

namespace branchgrp {

GWord concat(const GWord& u, const GWord& v) {
  GWord out = u;
  out.letters.insert(out.letters.end(), v.letters.begin(), v.letters.end());
  return out;
}

// ---------------------------------------------------------------------------
// FiniteQuotient

namespace {

struct StateHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto x : v) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

}  // namespace

FiniteQuotient FiniteQuotient::closure(std::size_t generator_count, State identity,
                                       const LeftAction& act, std::string tag,
                                       std::size_t max_order) {
  FiniteQuotient q;
  q.tag_ = std::move(tag);
  std::unordered_map<State, Element, StateHash> index;
  std::vector<State> states;
  index.emplace(identity, 0);
  states.push_back(std::move(identity));
  q.parent_.push_back(0);
  q.parent_gen_.push_back(0);
  std::vector<std::vector<Point>> left(generator_count);
  State next;
  for (Element i = 0; i < states.size(); ++i) {
    for (Generator s = 0; s < generator_count; ++s) {
      next.assign(states[i].size(), 0);
      act(s, states[i], next);
      auto [it, inserted] = index.emplace(next, static_cast<Element>(states.size()));
      if (inserted) {
        if (states.size() >= max_order) {
          throw CapExceeded("finite quotient exceeds order cap " + std::to_string(max_order));
        }
        states.push_back(next);
        q.parent_.push_back(i);
        q.parent_gen_.push_back(s);
      }
      left[s].push_back(it->second);
    }
  }
  auto alphabet = IndexedAlphabet::numeric(states.size());
  for (auto& images : left) q.left_.emplace_back(alphabet, std::move(images));
  return q;
}

FiniteQuotient FiniteQuotient::from_permutations(const std::vector<Perm>& images, std::string tag,
                                                 std::size_t max_order) {
  if (images.empty()) {
    throw std::invalid_argument("at least one generator image required");
  }
  const std::size_t degree = images.front().degree();
  State id(degree);
  std::iota(id.begin(), id.end(), 0u);
  return closure(
      images.size(), std::move(id),
      [&images](Generator s, const State& q, State& out) {
        const Perm& p = images[s];
        for (std::size_t i = 0; i < q.size(); ++i) out[i] = p(q[i]);
      },
      std::move(tag), max_order);
}

FiniteQuotient::Element FiniteQuotient::evaluate(const GWord& w) const {
  Element e = 0;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) e = left_.at(*it)(e);
  return e;
}

Perm FiniteQuotient::left_action(const GWord& w) const {
  std::vector<Point> images(order());
  std::iota(images.begin(), images.end(), Point{0});
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    const Perm& p = left_.at(*it);
    for (auto& x : images) x = p(x);
  }
  return Perm(left_.front().alphabet(), std::move(images));
}

GWord FiniteQuotient::word_of(Element i) const {
  GWord w;
  while (i != 0) {
    w.letters.push_back(parent_gen_[i]);
    i = parent_[i];
  }
  return w;
}

FiniteQuotient::Element FiniteQuotient::multiply(Element i, Element j) const {
  GWord w = word_of(i);
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) j = left_[*it](j);
  return j;
}

FiniteQuotient::Element FiniteQuotient::inverse(Element i) const {
  // λ(q_i)⁻¹ applied to the identity.
  GWord w = word_of(i);
  Element e = 0;
  for (Generator s : w.letters) {
    const Perm& p = left_[s];
    Element pre = 0;
    while (p(pre) != e) ++pre;
    e = pre;
  }
  return e;
}

std::vector<std::vector<FiniteQuotient::Element>> FiniteQuotient::multiplication_table() const {
  if (order() > kTableCap) {
    throw CapExceeded("multiplication table materialization capped at order 10^4");
  }
  std::vector<std::vector<Element>> table(order(), std::vector<Element>(order()));
  for (Element i = 0; i < order(); ++i) {
    GWord w = word_of(i);
    for (Element j = 0; j < order(); ++j) {
      Element e = j;
      for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) e = left_[*it](e);
      table[i][j] = e;
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// GroupOracle

GroupOracle::GroupOracle(std::vector<std::string> names, std::vector<Generator> inverse)
    : names_(std::move(names)), inverse_(std::move(inverse)) {
  if (names_.empty()) {
    throw std::invalid_argument("generating set must be non-empty");
  }
  if (inverse_.size() != names_.size()) {
    throw std::invalid_argument("an inverse must be supplied for every generator");
  }
  std::set<std::string> distinct(names_.begin(), names_.end());
  if (distinct.size() != names_.size()) {
    throw std::invalid_argument("generator names must be distinct");
  }
  for (Generator s = 0; s < inverse_.size(); ++s) {
    if (inverse_[s] >= inverse_.size() || inverse_[inverse_[s]] != s) {
      throw std::invalid_argument("inverse pairing is not an involution");
    }
  }
}

GWord GroupOracle::inverse(const GWord& w) const {
  GWord out;
  out.letters.reserve(w.length());
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    out.letters.push_back(inverse_.at(*it));
  }
  return out;
}

GWord GroupOracle::reduce(const GWord& w) const {
  GWord out;
  for (Generator s : w.letters) {
    if (!out.letters.empty() && inverse_.at(out.letters.back()) == s) {
      out.letters.pop_back();
    } else {
      out.letters.push_back(s);
    }
  }
  return out;
}

ConjugacyAnswer GroupOracle::conjugator(const GWord&, const GWord&) const { return Unsupported{}; }

std::vector<GWord> GroupOracle::ball(std::size_t radius) const {
  std::vector<GWord> out{GWord{}};
  std::unordered_set<std::string> seen{normal_form_key(GWord{})};
  std::size_t layer_begin = 0;
  for (std::size_t len = 1; len <= radius; ++len) {
    std::size_t layer_end = out.size();
    for (std::size_t i = layer_begin; i < layer_end; ++i) {
      for (Generator s = 0; s < generator_count(); ++s) {
        GWord w = out[i];
        w.letters.push_back(s);
        if (seen.insert(normal_form_key(w)).second) out.push_back(std::move(w));
      }
    }
    layer_begin = layer_end;
  }
  return out;
}

GWord GroupOracle::parse_word(std::string_view text) const {
  GWord w;
  std::istringstream in{std::string(text)};
  std::string token;
  bool single_char = std::all_of(names_.begin(), names_.end(),
                                 [](const std::string& n) { return n.size() == 1; });
  std::size_t position = 0;
  while (in >> token) {
    if (token == "1" || token == "e") {
      ++position;
      continue;
    }
    auto it = std::find(names_.begin(), names_.end(), token);
    if (it != names_.end()) {
      w.letters.push_back(static_cast<Generator>(it - names_.begin()));
    } else if (single_char) {
      for (char c : token) {
        auto jt = std::find(names_.begin(), names_.end(), std::string(1, c));
        if (jt == names_.end()) {
          throw ParseError("unknown generator '" + std::string(1, c) + "'", position);
        }
        w.letters.push_back(static_cast<Generator>(jt - names_.begin()));
      }
    } else {
      throw ParseError("unknown generator '" + token + "'", position);
    }
    ++position;
  }
  return w;
}

std::string GroupOracle::format_word(const GWord& w) const {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < w.length(); ++i) {
    if (i) out += ' ';
    out += names_.at(w.letters[i]);
  }
  return out;
}

std::string GroupOracle::descriptor() const {
  std::ostringstream out;
  out << "group " << name() << "\ngenerators";
  for (const auto& n : names_) out << ' ' << n;
  out << '\n';
  for (Generator s = 0; s < names_.size(); ++s) {
    if (inverse_[s] >= s) out << "inverse " << names_[s] << ' ' << names_[inverse_[s]] << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Bundled groups

namespace {

std::size_t parse_family_modulus(const std::string& key, std::string_view prefix) {
  if (key.rfind(prefix, 0) != 0) {
    throw std::invalid_argument("unknown quotient key '" + key + "'");
  }
  return std::stoul(key.substr(prefix.size()));
}

FiniteQuotient cyclic_quotient(std::size_t m, std::size_t generator_count, Generator t,
                               Generator t_inv) {
  auto alphabet = IndexedAlphabet::numeric(m);
  std::vector<Perm> images(generator_count, Perm(alphabet));
  std::vector<Point> up(m), down(m);
  for (Point i = 0; i < m; ++i) {
    up[i] = static_cast<Point>((i + 1) % m);
    down[i] = static_cast<Point>((i + m - 1) % m);
  }
  images[t] = Perm(alphabet, up);
  images[t_inv] = Perm(alphabet, down);
  return FiniteQuotient::from_permutations(images, "cyclic:" + std::to_string(m));
}

/// Z and Z/m share the same presentation data: S = {t, T}.
class CyclicGroup : public GroupOracle {
 public:
  CyclicGroup(std::vector<std::string> names, std::size_t modulus)
      : GroupOracle(std::move(names), {1, 0}), modulus_(modulus) {
    if (modulus_ == 1) {
      // Z/1 is allowed; it simply has no nontrivial words.
    }
  }

  std::string name() const override {
    return modulus_ == 0 ? "integers" : "finite:cyclic:" + std::to_string(modulus_);
  }

  long long exponent(const GWord& w) const {
    long long e = 0;
    for (Generator s : w.letters) e += s == 0 ? 1 : -1;
    if (modulus_ != 0) {
      long long m = static_cast<long long>(modulus_);
      e = ((e % m) + m) % m;
    }
    return e;
  }

  bool is_trivial(const GWord& w) const override { return exponent(w) == 0; }
  std::string normal_form_key(const GWord& w) const override {
    return std::to_string(exponent(w));
  }

  std::string detecting_quotient_key(const GWord& w) const override {
    std::size_t m = modulus_ == 0 ? w.length() + 1 : modulus_;
    return "cyclic:" + std::to_string(m);
  }

  FiniteQuotient build_quotient(const std::string& key) const override {
    return cyclic_quotient(parse_family_modulus(key, "cyclic:"), 2, 0, 1);
  }

  ConjugacyAnswer conjugator(const GWord& g, const GWord& k) const override {
    if (exponent(g) == exponent(k)) return GWord{};
    return NotConjugate{};
  }

  std::string descriptor() const override {
    return GroupOracle::descriptor() + "family " +
           (modulus_ == 0 ? std::string("integers") : "cyclic " + std::to_string(modulus_)) +
           "\n";
  }

 private:
  std::size_t modulus_;  // 0 for Z
};

/// D∞ with generators (a, t, T); elements are stored as t^m a^f.
class InfiniteDihedral : public GroupOracle {
 public:
  explicit InfiniteDihedral(std::vector<std::string> names)
      : GroupOracle(std::move(names), {0, 2, 1}) {}

  std::string name() const override { return "dihedral_infinite"; }

  struct Normal {
    long long m = 0;
    int f = 0;
  };

  static Normal normal(const GWord& w) {
    Normal n;
    for (Generator s : w.letters) {
      if (s == 0) {
        n.f ^= 1;
      } else {
        long long step = s == 1 ? 1 : -1;
        n.m += n.f ? -step : step;
      }
    }
    return n;
  }

  bool is_trivial(const GWord& w) const override {
    auto n = normal(w);
    return n.m == 0 && n.f == 0;
  }

  std::string normal_form_key(const GWord& w) const override {
    auto n = normal(w);
    return std::to_string(n.m) + (n.f ? "a" : "");
  }

  std::string detecting_quotient_key(const GWord& w) const override {
    return "dihedral:" + std::to_string(w.length() + 1);
  }

  FiniteQuotient build_quotient(const std::string& key) const override {
    const std::size_t m = parse_family_modulus(key, "dihedral:");
    if (m < 2) throw std::invalid_argument("dihedral quotient needs m >= 2");
    // Regular left action of D_m on its elements t^k a^f, indexed 2k + f.
    auto alphabet = IndexedAlphabet::numeric(2 * m);
    std::vector<Point> a(2 * m), t(2 * m), t_inv(2 * m);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t f = 0; f < 2; ++f) {
        Point self = static_cast<Point>(2 * k + f);
        a[self] = static_cast<Point>(2 * ((m - k) % m) + (1 - f));
        t[self] = static_cast<Point>(2 * ((k + 1) % m) + f);
        t_inv[self] = static_cast<Point>(2 * ((k + m - 1) % m) + f);
      }
    }
    return FiniteQuotient::from_permutations(
        {Perm(alphabet, a), Perm(alphabet, t), Perm(alphabet, t_inv)}, key);
  }

  static GWord power_of_t(long long j) {
    GWord w;
    for (long long i = 0; i < (j < 0 ? -j : j); ++i) w.letters.push_back(j < 0 ? 2 : 1);
    return w;
  }

  ConjugacyAnswer conjugator(const GWord& g, const GWord& k) const override {
    auto x = normal(g);
    auto y = normal(k);
    if (x.f != y.f) return NotConjugate{};
    if (x.f == 0) {
      if (x.m == y.m) return GWord{};
      if (x.m == -y.m) return GWord{{0}};
      return NotConjugate{};
    }
    // t^{-j} (t^m a) t^j = t^{m-2j} a.
    long long diff = x.m - y.m;
    if (diff % 2 != 0) return NotConjugate{};
    return power_of_t(diff / 2);
  }

  std::string descriptor() const override { return GroupOracle::descriptor() + "family dihedral\n"; }
};

class DirectProduct : public GroupOracle {
 public:
  DirectProduct(OraclePtr first, OraclePtr second)
      : GroupOracle(merged_names(*first, *second), merged_inverse(*first, *second)),
        first_(std::move(first)),
        second_(std::move(second)) {}

  std::string name() const override {
    return "product:" + first_->name() + "," + second_->name();
  }

  std::pair<GWord, GWord> split(const GWord& w) const {
    const auto n1 = static_cast<Generator>(first_->generator_count());
    GWord u, v;
    for (Generator s : w.letters) {
      if (s < n1) {
        u.letters.push_back(s);
      } else {
        v.letters.push_back(s - n1);
      }
    }
    return {u, v};
  }

  bool is_trivial(const GWord& w) const override {
    auto [u, v] = split(w);
    return first_->is_trivial(u) && second_->is_trivial(v);
  }

  std::string normal_form_key(const GWord& w) const override {
    auto [u, v] = split(w);
    return first_->normal_form_key(u) + "|" + second_->normal_form_key(v);
  }

  std::string detecting_quotient_key(const GWord& w) const override {
    auto [u, v] = split(w);
    if (!first_->is_trivial(u)) return "1:" + first_->detecting_quotient_key(u);
    return "2:" + second_->detecting_quotient_key(v);
  }

  FiniteQuotient build_quotient(const std::string& key) const override {
    if (key.size() < 2 || key[1] != ':' || (key[0] != '1' && key[0] != '2')) {
      throw std::invalid_argument("unknown quotient key '" + key + "'");
    }
    const bool on_first = key[0] == '1';
    const auto n1 = static_cast<Generator>(first_->generator_count());
    FiniteQuotient factor =
        (on_first ? first_ : second_)->build_quotient(key.substr(2));
    return FiniteQuotient::closure(
        generator_count(), {0},
        [&](Generator s, const FiniteQuotient::State& q, FiniteQuotient::State& out) {
          bool mine = on_first ? s < n1 : s >= n1;
          out[0] = mine ? factor.act(on_first ? s : s - n1, q[0]) : q[0];
        },
        key, factor.order() + 1);
  }

  ConjugacyAnswer conjugator(const GWord& g, const GWord& k) const override {
    auto [g1, g2] = split(g);
    auto [k1, k2] = split(k);
    auto c1 = first_->conjugator(g1, k1);
    auto c2 = second_->conjugator(g2, k2);
    if (std::holds_alternative<Unsupported>(c1) || std::holds_alternative<Unsupported>(c2)) {
      return Unsupported{};
    }
    if (std::holds_alternative<NotConjugate>(c1) || std::holds_alternative<NotConjugate>(c2)) {
      return NotConjugate{};
    }
    GWord w = std::get<GWord>(c1);
    const auto n1 = static_cast<Generator>(first_->generator_count());
    for (Generator s : std::get<GWord>(c2).letters) w.letters.push_back(s + n1);
    return w;
  }

  bool has_ball_enumerator() const override {
    return first_->has_ball_enumerator() && second_->has_ball_enumerator();
  }

  std::string descriptor() const override {
    return GroupOracle::descriptor() + "family product\nfactor " + first_->name() +
           "\nfactor " + second_->name() + "\n";
  }

 private:
  static std::vector<std::string> merged_names(const GroupOracle& a, const GroupOracle& b) {
    std::vector<std::string> names = a.generator_names();
    for (const auto& n : b.generator_names()) {
      std::string candidate = n;
      while (std::find(names.begin(), names.end(), candidate) != names.end()) candidate += "_2";
      names.push_back(candidate);
    }
    return names;
  }

  static std::vector<Generator> merged_inverse(const GroupOracle& a, const GroupOracle& b) {
    std::vector<Generator> inv = a.inverse_pairing();
    const auto n1 = static_cast<Generator>(a.generator_count());
    for (Generator s : b.inverse_pairing()) inv.push_back(s + n1);
    return inv;
  }

  OraclePtr first_;
  OraclePtr second_;
};

}  // namespace

OraclePtr make_integers() { return std::make_shared<CyclicGroup>(std::vector<std::string>{"t", "T"}, 0); }

OraclePtr make_infinite_dihedral() {
  return std::make_shared<InfiniteDihedral>(std::vector<std::string>{"a", "t", "T"});
}

OraclePtr make_finite_cyclic(std::size_t m) {
  if (m == 0) throw std::invalid_argument("cyclic group order must be positive");
  return std::make_shared<CyclicGroup>(std::vector<std::string>{"t", "T"}, m);
}

OraclePtr make_direct_product(OraclePtr first, OraclePtr second) {
  return std::make_shared<DirectProduct>(std::move(first), std::move(second));
}

OraclePtr make_group(std::string_view selector) {
  std::string s(selector);
  if (s == "integers") return make_integers();
  if (s == "dihedral_infinite") return make_infinite_dihedral();
  auto parse_count = [&](const std::string& digits) -> std::size_t {
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(),
                                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw ParseError("expected a positive integer in group selector '" + s + "'", 0);
    }
    return std::stoul(digits);
  };
  if (s.rfind("finite:", 0) == 0) {
    std::string rest = s.substr(7);
    if (rest.rfind("cyclic:", 0) == 0) rest = rest.substr(7);
    return make_finite_cyclic(parse_count(rest));
  }
  if (s.rfind("product:", 0) == 0) {
    std::string rest = s.substr(8);
    auto comma = rest.find(',');
    if (comma == std::string::npos) {
      throw ParseError("product selector needs two comma-separated factors", 8);
    }
    return make_direct_product(make_group(rest.substr(0, comma)), make_group(rest.substr(comma + 1)));
  }
  throw ParseError("unknown group selector '" + s + "'", 0);
}

OraclePtr load_group_descriptor(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::string name, family;
  std::vector<std::string> generators;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<std::string> factors;
  std::size_t family_arg = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head) || head[0] == '#') continue;
    if (head == "group") {
      ls >> name;
    } else if (head == "generators") {
      std::string g;
      while (ls >> g) generators.push_back(g);
    } else if (head == "inverse") {
      std::string a, b;
      if (!(ls >> a >> b)) throw ParseError("inverse needs two generator names", line_no);
      pairs.emplace_back(a, b);
    } else if (head == "family") {
      ls >> family;
      if (family == "cyclic" && !(ls >> family_arg)) {
        throw ParseError("family cyclic needs an order", line_no);
      }
    } else if (head == "factor") {
      std::string f;
      ls >> f;
      factors.push_back(f);
    } else {
      throw ParseError("unknown descriptor directive '" + head + "'", line_no);
    }
  }
  if (name.empty()) throw ParseError("descriptor lacks a 'group <name>' header", 0);
  if (family.empty()) throw ParseError("descriptor lacks a 'family' line", 0);

  std::vector<Generator> inverse(generators.size(), static_cast<Generator>(-1));
  auto index = [&](const std::string& g) -> Generator {
    auto it = std::find(generators.begin(), generators.end(), g);
    if (it == generators.end()) throw ParseError("unknown generator '" + g + "' in inverse", 0);
    return static_cast<Generator>(it - generators.begin());
  };
  for (const auto& [a, b] : pairs) {
    Generator i = index(a), j = index(b);
    inverse[i] = j;
    inverse[j] = i;
  }
  for (Generator s = 0; s < inverse.size(); ++s) {
    if (inverse[s] == static_cast<Generator>(-1)) {
      throw ParseError("generating set is not symmetric: '" + generators[s] + "' has no inverse", 0);
    }
  }

  if (family == "product") {
    if (factors.size() != 2) throw ParseError("family product needs two factor lines", 0);
    return make_direct_product(make_group(factors[0]), make_group(factors[1]));
  }
  if (family == "integers" || family == "cyclic") {
    if (generators.size() != 2 || inverse[0] != 1) {
      throw ParseError("cyclic families need generators 't T' with inverse t T", 0);
    }
    return std::make_shared<CyclicGroup>(generators, family == "integers" ? 0 : family_arg);
  }
  if (family == "dihedral") {
    if (generators.size() != 3 || inverse[0] != 0 || inverse[1] != 2) {
      throw ParseError("family dihedral needs generators 'a t T' with a self-inverse", 0);
    }
    return std::make_shared<InfiniteDihedral>(generators);
  }
  throw ParseError("unknown family '" + family + "'", 0);
}

// ---------------------------------------------------------------------------
// Quotient chain

EfrfAnswer efrf_query(const GroupOracle& oracle, const GWord& w) {
  if (oracle.is_trivial(w)) return TrivialMarker{};
  FiniteQuotient q = oracle.build_quotient(oracle.detecting_quotient_key(w));
  auto image = q.evaluate(w);
  if (image == 0) {
    throw std::logic_error("efrf oracle returned a quotient that does not detect the word");
  }
  return DetectingQuotient{std::move(q), image};
}

std::vector<GWord> words_up_to(const GroupOracle& oracle, std::size_t n) {
  std::vector<GWord> out;
  const auto k = static_cast<Generator>(oracle.generator_count());
  GWord w;
  for (std::size_t len = 1; len <= n; ++len) {
    w.letters.assign(len, 0);
    for (;;) {
      if (!oracle.is_trivial(w)) out.push_back(w);
      std::size_t i = len;
      while (i > 0 && w.letters[i - 1] + 1 == k) {
        w.letters[i - 1] = 0;
        --i;
      }
      if (i == 0) break;
      ++w.letters[i - 1];
    }
  }
  return out;
}

QuotientMap build_level_map(const GroupOracle& oracle, std::size_t n, std::size_t max_order) {
  if (n == 0) throw PreconditionError("build_level_map needs n >= 1");
  auto words = words_up_to(oracle, n);
  if (words.empty()) throw PreconditionError("input group must be infinite");
  // f_w depends on w only through its family key, and repeating a factor does
  // not change the image of f_n'.
  std::vector<std::string> keys;
  std::set<std::string> seen;
  for (const auto& w : words) {
    auto key = oracle.detecting_quotient_key(w);
    if (seen.insert(key).second) keys.push_back(key);
  }
  std::vector<FiniteQuotient> factors;
  factors.reserve(keys.size());
  for (const auto& key : keys) factors.push_back(oracle.build_quotient(key));
  FiniteQuotient q = FiniteQuotient::closure(
      oracle.generator_count(), FiniteQuotient::State(factors.size(), 0),
      [&factors](Generator s, const FiniteQuotient::State& in, FiniteQuotient::State& out) {
        for (std::size_t c = 0; c < factors.size(); ++c) out[c] = factors[c].act(s, in[c]);
      },
      "level:" + std::to_string(n), max_order);
  return QuotientMap{n, std::move(q)};
}

QuotientChain::QuotientChain(OraclePtr oracle, std::size_t max_order)
    : oracle_(std::move(oracle)), max_order_(max_order) {
  if (!oracle_) throw std::invalid_argument("null group oracle");
}

const QuotientMap& QuotientChain::level(std::size_t n) const {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(n);
  if (it != cache_.end()) return *it->second;
  auto map = std::make_unique<QuotientMap>(build_level_map(*oracle_, n, max_order_));
  return *cache_.emplace(n, std::move(map)).first->second;
}

bool decide_wp_G(const QuotientChain& chain, const GWord& w) {
  if (w.empty()) return true;
  return chain.level(w.length()).image(w) == 0;
}

KernelCheckReport kernel_min_length_check(const GroupOracle& oracle, const QuotientMap& f,
                                          std::size_t radius) {
  if (radius > f.level) throw PreconditionError("kernel check radius must not exceed the level");
  if (!oracle.has_ball_enumerator()) throw PreconditionError("ball enumerator unavailable");
  KernelCheckReport report;
  for (const auto& g : oracle.ball(radius)) {
    if (g.empty()) continue;
    ++report.checked;
    if (f.image(g) == 0) {
      report.passed = false;
      report.counterexample = g;
      return report;
    }
  }
  return report;
}

ConjugacyAnswer conjugate_in_G(const GroupOracle& oracle, const GWord& g, const GWord& k) {
  if (g == k) return GWord{};
  return oracle.conjugator(g, k);
}

std::string format_homomorphism(const GroupOracle& oracle, const FiniteQuotient& q) {
  std::ostringstream out;
  out << "order " << q.order() << '\n';
  for (Generator s = 0; s < oracle.generator_count(); ++s) {
    out << oracle.generator_names()[s] << " -> " << to_cycle_string(q.generator_image(s)) << '\n';
  }
  return out.str();
}

}  // namespace branchgrp
