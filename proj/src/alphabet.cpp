#include "branchgrp/alphabet.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

#include "branchgrp/errors.hpp"

namespace branchgrp {

namespace {

constexpr std::string_view kSpecialNames = "xyzpq";

std::string special_name(LetterKind kind) {
  switch (kind) {
    case LetterKind::X: return "x";
    case LetterKind::Y: return "y";
    case LetterKind::Z: return "z";
    case LetterKind::P: return "p";
    case LetterKind::Q: return "q";
    case LetterKind::Coset: break;
  }
  return "";
}

}  // namespace

AlphabetLevel::AlphabetLevel(std::size_t level, const QuotientMap& map)
    : level_(level), map_(&map) {
  if (level == 0) throw PreconditionError("alphabets are indexed from level 1");
  std::vector<std::string> labels;
  labels.reserve(map.quotient.order() + 5);
  for (Point i = 0; i < map.quotient.order(); ++i) {
    labels.push_back(letter_literal(Letter{level, LetterKind::Coset, i}));
  }
  for (auto kind : {LetterKind::X, LetterKind::Y, LetterKind::Z, LetterKind::P, LetterKind::Q}) {
    labels.push_back(letter_literal(Letter{level, kind, 0}));
  }
  letters_ = std::make_shared<IndexedAlphabet>(std::move(labels));
}

Point AlphabetLevel::index(const Letter& letter) const {
  if (letter.level != level_) {
    throw LevelMismatch("letter of level " + std::to_string(letter.level) +
                        " used in X_" + std::to_string(level_));
  }
  switch (letter.kind) {
    case LetterKind::Coset:
      if (letter.coset >= coset_count()) throw std::out_of_range("coset index out of range");
      return letter.coset;
    case LetterKind::X: return x();
    case LetterKind::Y: return y();
    case LetterKind::Z: return z();
    case LetterKind::P: return p();
    case LetterKind::Q: return q();
  }
  return 0;
}

Letter AlphabetLevel::letter(Point index) const {
  if (index < coset_count()) return Letter{level_, LetterKind::Coset, index};
  switch (index - coset_count()) {
    case 0: return Letter{level_, LetterKind::X, 0};
    case 1: return Letter{level_, LetterKind::Y, 0};
    case 2: return Letter{level_, LetterKind::Z, 0};
    case 3: return Letter{level_, LetterKind::P, 0};
    case 4: return Letter{level_, LetterKind::Q, 0};
    default: break;
  }
  throw std::out_of_range("letter index out of range");
}

std::string letter_literal(const Letter& letter) {
  std::string at = "@" + std::to_string(letter.level);
  if (letter.kind == LetterKind::Coset) return "q" + std::to_string(letter.coset) + at;
  return special_name(letter.kind) + at;
}

Letter parse_letter(std::string_view text) {
  auto at = text.find('@');
  if (at == std::string_view::npos || at == 0 || at + 1 == text.size()) {
    throw ParseError("letter literal must look like <name>@<level>", 0);
  }
  auto name = text.substr(0, at);
  auto level_text = text.substr(at + 1);
  std::size_t level = 0;
  for (char c : level_text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad level in letter literal", at + 1);
    level = level * 10 + static_cast<std::size_t>(c - '0');
  }
  if (level == 0) throw ParseError("letter levels start at 1", at + 1);
  if (name.size() == 1 && kSpecialNames.find(name[0]) != std::string_view::npos) {
    switch (name[0]) {
      case 'x': return Letter{level, LetterKind::X, 0};
      case 'y': return Letter{level, LetterKind::Y, 0};
      case 'z': return Letter{level, LetterKind::Z, 0};
      case 'p': return Letter{level, LetterKind::P, 0};
      default: return Letter{level, LetterKind::Q, 0};
    }
  }
  if (name.size() >= 2 && name[0] == 'q') {
    Point coset = 0;
    for (char c : name.substr(1)) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ParseError("bad coset index", 1);
      coset = coset * 10 + static_cast<Point>(c - '0');
    }
    return Letter{level, LetterKind::Coset, coset};
  }
  throw ParseError("unknown letter '" + std::string(text) + "'", 0);
}

const AlphabetPtr& a_alphabet() {
  static const AlphabetPtr alphabet =
      std::make_shared<IndexedAlphabet>(std::vector<std::string>{"x", "y", "z", "o", "p", "q"});
  return alphabet;
}

AElem::AElem() : perm_(a_alphabet()) {}

AElem::AElem(Perm perm) : perm_(std::move(perm)) {
  if (!same_alphabet(perm_.alphabet(), a_alphabet())) {
    throw std::invalid_argument("A-elements act on {x,y,z,o,p,q}");
  }
  if (sign(perm_) != 1) throw std::invalid_argument("A-elements must be even permutations");
}

AElem AElem::parse(std::string_view cycles) {
  Perm p = parse_cycles(a_alphabet(), cycles);
  if (sign(p) != 1) throw ParseError("A-part must be an even permutation", 0);
  return AElem(std::move(p));
}

AElem operator*(const AElem& a, const AElem& b) { return AElem(compose(a.perm(), b.perm())); }
AElem inverse(const AElem& a) { return AElem(inverse(a.perm())); }

HElem h_mult(const HElem& u, const HElem& v) { return HElem{concat(u.g, v.g), u.a * v.a}; }

HElem h_inv(const GroupOracle& oracle, const HElem& u) {
  return HElem{oracle.inverse(u.g), inverse(u.a)};
}

HElem parse_helem(const GroupOracle& oracle, std::string_view text) {
  auto bar = text.find('|');
  if (bar == std::string_view::npos) return HElem{oracle.parse_word(text), AElem{}};
  HElem h{oracle.parse_word(text.substr(0, bar)), AElem{}};
  try {
    h.a = AElem::parse(text.substr(bar + 1));
  } catch (const ParseError& e) {
    throw ParseError(std::string("A-part: ") + e.what(), bar + 1 + e.position());
  }
  return h;
}

std::string format_helem(const GroupOracle& oracle, const HElem& h) {
  std::string g = h.g.empty() ? "" : oracle.format_word(h.g);
  return g + "|" + to_cycle_string(h.a.perm());
}

Tower::Tower(OraclePtr oracle, TowerLimits limits)
    : chain_(std::move(oracle), limits.max_quotient_order), limits_(limits) {}

const AlphabetLevel& Tower::alphabet(std::size_t n) const {
  if (n == 0) throw PreconditionError("alphabets are indexed from level 1");
  {
    std::lock_guard lock(mutex_);
    auto it = alphabets_.find(n);
    if (it != alphabets_.end()) return *it->second;
  }
  const QuotientMap& map = chain_.level(n);
  std::lock_guard lock(mutex_);
  auto& slot = alphabets_[n];
  if (!slot) slot = std::make_unique<AlphabetLevel>(n, map);
  return *slot;
}

const Perm& Tower::phi(std::size_t n, const HElem& h) const {
  const AlphabetLevel& alpha = alphabet(n);
  auto key = std::make_pair(n, h.g);
  {
    std::lock_guard lock(mutex_);
    auto it = phi_cache_.find(key);
    if (it != phi_cache_.end()) return it->second;
  }
  Perm lambda = alpha.quotient().left_action(h.g);
  std::vector<Point> images(alpha.size());
  for (Point i = 0; i < alpha.coset_count(); ++i) images[i] = lambda(i);
  images[alpha.x()] = alpha.x();
  images[alpha.y()] = alpha.y();
  images[alpha.z()] = alpha.z();
  bool odd = sign(lambda) == -1;
  images[alpha.p()] = odd ? alpha.q() : alpha.p();
  images[alpha.q()] = odd ? alpha.p() : alpha.q();
  Perm result(alpha.letters(), std::move(images));
  std::lock_guard lock(mutex_);
  return phi_cache_.emplace(std::move(key), std::move(result)).first->second;
}

Point Tower::phi_image(std::size_t n, const HElem& h, Point letter, bool inverse) const {
  const AlphabetLevel& alpha = alphabet(n);
  if (letter == alpha.x() || letter == alpha.y() || letter == alpha.z()) return letter;
  const FiniteQuotient& q = alpha.quotient();
  if (letter < alpha.coset_count()) {
    // λ(g)⁻¹ = λ(g⁻¹): walk the inverse letters instead.
    const auto& w = h.g.letters;
    if (!inverse) {
      for (auto it = w.rbegin(); it != w.rend(); ++it) letter = q.act(*it, letter);
    } else {
      for (auto it = w.begin(); it != w.end(); ++it) {
        letter = q.act(oracle().inverse_generator(*it), letter);
      }
    }
    return letter;
  }
  const std::vector<int>* signs = nullptr;
  {
    std::lock_guard lock(mutex_);
    auto it = generator_signs_.find(n);
    if (it != generator_signs_.end()) signs = &it->second;
  }
  if (!signs) {
    std::vector<int> s(oracle().generator_count());
    for (Generator g = 0; g < s.size(); ++g) s[g] = sign(q.generator_image(g));
    std::lock_guard lock(mutex_);
    signs = &generator_signs_.emplace(n, std::move(s)).first->second;
  }
  int total = 1;
  for (Generator g : h.g.letters) total *= (*signs)[g];
  if (total == 1) return letter;
  return letter == alpha.p() ? alpha.q() : alpha.p();
}

Point Tower::psi_image(std::size_t n, const AElem& a, Point letter, bool inverse) const {
  const AlphabetLevel& alpha = alphabet(n);
  const Point pos[6] = {alpha.x(), alpha.y(), alpha.z(), alpha.o(), alpha.p(), alpha.q()};
  for (Point i = 0; i < 6; ++i) {
    if (pos[i] != letter) continue;
    Point j = i;
    if (!inverse) {
      j = a.perm()(i);
    } else {
      while (a.perm()(j) != i) j = a.perm()(j);
    }
    return pos[j];
  }
  return letter;
}

Perm Tower::psi(std::size_t n, const AElem& a) const {
  const AlphabetLevel& alpha = alphabet(n);
  // Positions of x, y, z, o, p, q inside X_n.
  const Point pos[6] = {alpha.x(), alpha.y(), alpha.z(), alpha.o(), alpha.p(), alpha.q()};
  std::vector<Point> images(alpha.size());
  for (Point i = 0; i < images.size(); ++i) images[i] = i;
  for (Point i = 0; i < 6; ++i) images[pos[i]] = pos[a.perm()(i)];
  return Perm(alpha.letters(), std::move(images));
}

Perm Tower::psi(std::size_t n, const HElem& h) const { return psi(n, h.a); }

bool Tower::is_trivial(const HElem& h) const {
  if (!h.a.is_identity()) return false;
  GWord g = oracle().reduce(h.g);
  if (g.length() <= kChainWordLimit) return decide_wp_G(chain_, g);
  // f_n for long words would need every word of length n; ask the oracle for f_g instead.
  return std::holds_alternative<TrivialMarker>(efrf_query(oracle(), g));
}

std::size_t Tower::vertex_count(std::size_t base, std::size_t depth,
                                std::size_t stop_above) const {
  std::size_t count = 1;
  for (std::size_t i = 1; i <= depth; ++i) {
    if (count > stop_above) return count;
    std::size_t s = alphabet(base + i).size();
    if (count > std::numeric_limits<std::size_t>::max() / s) {
      return std::numeric_limits<std::size_t>::max();
    }
    count *= s;
  }
  return count;
}

std::shared_ptr<void> Tower::cache_slot(const std::string& key,
                                        const std::function<std::shared_ptr<void>()>& make) const {
  std::lock_guard lock(mutex_);
  auto& slot = slots_[key];
  if (!slot) slot = make();
  return slot;
}

}  // namespace branchgrp
