#include "branchgrp/perm.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>
#include <unordered_map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "branchgrp/errors.hpp"

namespace branchgrp {

IndexedAlphabet::IndexedAlphabet(std::vector<std::string> labels)
    : size_(labels.size()), labels_(std::move(labels)) {
  if (size_ == 0) {
    throw std::invalid_argument("alphabet must be non-empty");
  }
  for (Point i = 0; i < size_; ++i) {
    if (!index_.emplace(labels_[i], i).second) {
      throw std::invalid_argument("duplicate alphabet label '" + labels_[i] + "'");
    }
  }
}

std::shared_ptr<const IndexedAlphabet> IndexedAlphabet::numeric(std::size_t size) {
  if (size == 0) {
    throw std::invalid_argument("alphabet must be non-empty");
  }
  auto a = std::shared_ptr<IndexedAlphabet>(new IndexedAlphabet());
  a->size_ = size;
  return a;
}

std::string IndexedAlphabet::label(Point i) const {
  if (i >= size_) {
    throw std::out_of_range("alphabet index out of range");
  }
  return labels_.empty() ? std::to_string(i) : labels_[i];
}

std::optional<Point> IndexedAlphabet::index_of(std::string_view label) const {
  if (labels_.empty()) {
    Point value = 0;
    if (label.empty()) return std::nullopt;
    for (char c : label) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      value = value * 10 + static_cast<Point>(c - '0');
      if (value >= size_) return std::nullopt;
    }
    return value;
  }
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool IndexedAlphabet::operator==(const IndexedAlphabet& other) const {
  return size_ == other.size_ && labels_ == other.labels_;
}

bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b) {
  return a == b || (a && b && *a == *b);
}

Perm::Perm(AlphabetPtr alphabet) : alphabet_(std::move(alphabet)) {
  images_.resize(alphabet_->size());
  std::iota(images_.begin(), images_.end(), Point{0});
}

Perm::Perm(AlphabetPtr alphabet, std::vector<Point> images)
    : alphabet_(std::move(alphabet)), images_(std::move(images)) {
  if (images_.size() != alphabet_->size()) {
    throw std::invalid_argument("permutation degree does not match its alphabet");
  }
  std::vector<bool> seen(images_.size(), false);
  for (Point x : images_) {
    if (x >= images_.size() || seen[x]) {
      throw std::invalid_argument("images do not form a bijection");
    }
    seen[x] = true;
  }
}

Perm Perm::from_cycles(AlphabetPtr alphabet, const std::vector<std::vector<Point>>& cycles) {
  std::vector<Point> images(alphabet->size());
  std::iota(images.begin(), images.end(), Point{0});
  std::vector<bool> used(images.size(), false);
  for (const auto& cycle : cycles) {
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      Point from = cycle[i];
      if (from >= images.size()) {
        throw std::invalid_argument("cycle point out of range");
      }
      if (used[from]) {
        throw std::invalid_argument("point repeated across cycles");
      }
      used[from] = true;
      images[from] = cycle[(i + 1) % cycle.size()];
    }
  }
  return Perm(std::move(alphabet), std::move(images));
}

bool Perm::is_identity() const {
  for (Point i = 0; i < images_.size(); ++i) {
    if (images_[i] != i) return false;
  }
  return true;
}

std::size_t Perm::fixed_point_count() const {
  std::size_t n = 0;
  for (Point i = 0; i < images_.size(); ++i) n += images_[i] == i;
  return n;
}

bool Perm::operator==(const Perm& other) const {
  return images_ == other.images_ && same_alphabet(alphabet_, other.alphabet_);
}

Perm compose(const Perm& p, const Perm& q) {
  if (!same_alphabet(p.alphabet(), q.alphabet())) {
    throw std::invalid_argument("compose: alphabet mismatch");
  }
  std::vector<Point> images(q.degree());
  for (Point i = 0; i < images.size(); ++i) images[i] = p(q(i));
  return Perm(p.alphabet(), std::move(images));
}

Perm inverse(const Perm& p) {
  std::vector<Point> images(p.degree());
  for (Point i = 0; i < images.size(); ++i) images[p(i)] = i;
  return Perm(p.alphabet(), std::move(images));
}

Perm conjugate(const Perm& p, const Perm& q) { return compose(inverse(q), compose(p, q)); }

namespace {

template <typename F>
void for_each_cycle(const Perm& p, F&& f) {
  std::vector<bool> seen(p.degree(), false);
  std::vector<Point> cycle;
  for (Point start = 0; start < p.degree(); ++start) {
    if (seen[start]) continue;
    cycle.clear();
    for (Point x = start; !seen[x]; x = p(x)) {
      seen[x] = true;
      cycle.push_back(x);
    }
    f(cycle);
  }
}

}  // namespace

int sign(const Perm& p) {
  std::size_t transpositions = 0;
  for_each_cycle(p, [&](const std::vector<Point>& c) { transpositions += c.size() - 1; });
  return transpositions % 2 == 0 ? 1 : -1;
}

std::vector<std::size_t> cycle_type(const Perm& p) {
  std::vector<std::size_t> lengths;
  for_each_cycle(p, [&](const std::vector<Point>& c) { lengths.push_back(c.size()); });
  std::sort(lengths.begin(), lengths.end());
  return lengths;
}

std::vector<std::vector<Point>> cycles(const Perm& p) {
  std::vector<std::vector<Point>> out;
  for_each_cycle(p, [&](const std::vector<Point>& c) {
    if (c.size() > 1) out.push_back(c);
  });
  return out;
}

std::string to_cycle_string(const Perm& p) {
  auto cs = cycles(p);
  if (cs.empty()) return "()";
  std::string out;
  for (const auto& c : cs) {
    out += '(';
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) out += ' ';
      out += p.alphabet()->label(c[i]);
    }
    out += ')';
  }
  return out;
}

Perm parse_cycles(const AlphabetPtr& alphabet, std::string_view text) {
  std::vector<std::vector<Point>> parsed;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  while (i < text.size()) {
    if (text[i] != '(') {
      throw ParseError("expected '(' in cycle notation", i);
    }
    ++i;
    std::vector<Point> cycle;
    for (;;) {
      skip_ws();
      if (i >= text.size()) throw ParseError("unterminated cycle", i);
      if (text[i] == ')') {
        ++i;
        break;
      }
      std::size_t start = i;
      while (i < text.size() && text[i] != ')' && text[i] != '(' &&
             !std::isspace(static_cast<unsigned char>(text[i]))) {
        ++i;
      }
      if (start == i) throw ParseError("unexpected '(' inside cycle", i);
      auto label = text.substr(start, i - start);
      auto idx = alphabet->index_of(label);
      if (!idx) throw ParseError("unknown label '" + std::string(label) + "'", start);
      if (std::find(cycle.begin(), cycle.end(), *idx) != cycle.end()) {
        throw ParseError("label repeated in cycle", start);
      }
      cycle.push_back(*idx);
    }
    if (cycle.size() > 1) parsed.push_back(std::move(cycle));
    skip_ws();
  }
  try {
    return Perm::from_cycles(alphabet, parsed);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

namespace {

struct ImagesHash {
  std::size_t operator()(const std::vector<Point>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Point x : v) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

using ElementSet = std::unordered_set<std::vector<Point>, ImagesHash>;

ElementSet subgroup_closure(std::size_t degree, const std::vector<std::vector<Point>>& gens) {
  std::vector<Point> id(degree);
  std::iota(id.begin(), id.end(), Point{0});
  ElementSet elements{id};
  std::deque<std::vector<Point>> queue{id};
  std::vector<Point> next(degree);
  while (!queue.empty()) {
    auto g = std::move(queue.front());
    queue.pop_front();
    for (const auto& s : gens) {
      for (std::size_t i = 0; i < degree; ++i) next[i] = g[s[i]];
      if (elements.insert(next).second) queue.push_back(next);
    }
  }
  return elements;
}

std::vector<Point> as_images(const Perm& p) { return {p.images().begin(), p.images().end()}; }

}  // namespace

bool check_alternating_generation(const AlternatingGenerationInput& input) {
  const auto& omega = input.omega;
  const std::size_t n = omega->size();
  if (n > 10) {
    throw PreconditionError("|Omega| <= 10 required for explicit closure");
  }
  std::vector<int> membership(n, 0);  // bit 1: in A, bit 2: in B
  for (Point a : input.a_part) {
    if (a >= n) throw PreconditionError("A is not a subset of Omega");
    membership[a] |= 1;
  }
  for (Point b : input.b_part) {
    if (b >= n) throw PreconditionError("B is not a subset of Omega");
    membership[b] |= 2;
  }
  std::vector<Point> a_set, b_set;
  std::optional<Point> omega_point;
  for (Point i = 0; i < n; ++i) {
    if (membership[i] == 0) throw PreconditionError("(1) Omega = A ∪ B violated");
    if (membership[i] & 1) a_set.push_back(i);
    if (membership[i] & 2) b_set.push_back(i);
    if (membership[i] == 3) {
      if (omega_point) throw PreconditionError("(2) |A ∩ B| = 1 violated");
      omega_point = i;
    }
  }
  if (!omega_point) throw PreconditionError("(2) |A ∩ B| = 1 violated");
  if (a_set.size() < 3) throw PreconditionError("(3) |A| >= 3 violated");
  for (const auto& g : input.generators) {
    if (!same_alphabet(g.alphabet(), omega)) {
      throw PreconditionError("generator does not act on Omega");
    }
    if (sign(g) != 1) throw PreconditionError("generator is not in Alt(Omega)");
  }
  std::vector<Point> common_fixed;
  for (Point a : a_set) {
    if (a == *omega_point) continue;
    bool fixed = std::all_of(input.generators.begin(), input.generators.end(),
                             [a](const Perm& g) { return g(a) == a; });
    if (fixed) common_fixed.push_back(a);
  }
  if (common_fixed.size() < 2) {
    throw PreconditionError("G must fix at least two elements of A \\ {omega}");
  }
  for (const auto& g : input.generators) {
    for (Point b : b_set) {
      if (!(membership[g(b)] & 2)) throw PreconditionError("G does not leave B invariant");
    }
  }
  {
    std::vector<bool> reached(n, false);
    std::deque<Point> queue{b_set.front()};
    reached[b_set.front()] = true;
    while (!queue.empty()) {
      Point x = queue.front();
      queue.pop_front();
      for (const auto& g : input.generators) {
        if (!reached[g(x)]) {
          reached[g(x)] = true;
          queue.push_back(g(x));
        }
      }
    }
    for (Point b : b_set) {
      if (!reached[b]) throw PreconditionError("G does not act transitively on B");
    }
  }

  // Alt(A) is generated by the 3-cycles (a0 a1 a) for a in A \ {a0, a1}.
  std::vector<std::vector<Point>> gens;
  for (std::size_t k = 2; k < a_set.size(); ++k) {
    gens.push_back(as_images(Perm::from_cycles(omega, {{a_set[0], a_set[1], a_set[k]}})));
  }
  ElementSet closure = subgroup_closure(n, gens);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& g : input.generators) {
      for (std::size_t j = 0; j < gens.size(); ++j) {
        Perm c = conjugate(Perm(omega, gens[j]), g);
        auto images = as_images(c);
        if (!closure.count(images)) {
          gens.push_back(std::move(images));
          closure = subgroup_closure(n, gens);
          grew = true;
        }
      }
    }
  }
  std::size_t alt_order = 1;
  for (std::size_t i = 3; i <= n; ++i) alt_order *= i;
  return closure.size() == alt_order;
}

std::uint64_t intern_id(const Perm& p) {
  static std::mutex mutex;
  static std::unordered_map<Perm, std::uint64_t> table;
  std::lock_guard lock(mutex);
  return table.emplace(p, table.size()).first->second;
}

}  // namespace branchgrp

std::size_t std::hash<branchgrp::Perm>::operator()(const branchgrp::Perm& p) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (auto x : p.images()) h = (h ^ x) * 1099511628211ull;
  return h;
}
