#pragma once

// Permutations of finite indexed alphabets.
//
// Composition convention used everywhere in this library:
//
//     compose(p, q)(i) == p(q(i))        ("apply q, then p")
//
// so products of tree automorphisms, group words and level permutations all
// read right to left.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace branchgrp {

using Point = std::uint32_t;

/// A finite set {0, ..., size-1} together with display names.
class IndexedAlphabet {
 public:
  explicit IndexedAlphabet(std::vector<std::string> labels);

  /// Alphabet labelled "0", "1", ... without storing the labels.
  static std::shared_ptr<const IndexedAlphabet> numeric(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  std::string label(Point i) const;
  std::optional<Point> index_of(std::string_view label) const;
  bool is_numeric() const noexcept { return labels_.empty(); }

  bool operator==(const IndexedAlphabet& other) const;

 private:
  IndexedAlphabet() = default;

  std::size_t size_ = 0;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Point> index_;
};

using AlphabetPtr = std::shared_ptr<const IndexedAlphabet>;

bool same_alphabet(const AlphabetPtr& a, const AlphabetPtr& b);

class Perm {
 public:
  /// Identity on `alphabet`.
  explicit Perm(AlphabetPtr alphabet);
  /// Throws std::invalid_argument unless `images` is a bijection of the alphabet.
  Perm(AlphabetPtr alphabet, std::vector<Point> images);

  static Perm from_cycles(AlphabetPtr alphabet, const std::vector<std::vector<Point>>& cycles);

  Point operator()(Point i) const { return images_[i]; }
  std::size_t degree() const noexcept { return images_.size(); }
  const AlphabetPtr& alphabet() const noexcept { return alphabet_; }
  std::span<const Point> images() const noexcept { return images_; }

  bool is_identity() const;
  std::size_t fixed_point_count() const;

  /// Structural equality: same alphabet and same images.
  bool operator==(const Perm& other) const;
  bool operator<(const Perm& other) const { return images_ < other.images_; }

 private:
  AlphabetPtr alphabet_;
  std::vector<Point> images_;
};

/// p∘q, i.e. apply q first. Throws std::invalid_argument on alphabet mismatch.
Perm compose(const Perm& p, const Perm& q);
inline Perm operator*(const Perm& p, const Perm& q) { return compose(p, q); }
Perm inverse(const Perm& p);
/// q⁻¹ p q.
Perm conjugate(const Perm& p, const Perm& q);

/// +1 for even permutations, -1 for odd ones.
int sign(const Perm& p);

/// Cycle lengths in ascending order, fixed points included as 1-cycles.
std::vector<std::size_t> cycle_type(const Perm& p);

/// Nontrivial cycles, each starting at its smallest point, ordered by that point.
std::vector<std::vector<Point>> cycles(const Perm& p);

/// `(a b c)(d e)` over labels; the identity prints as `()`.
std::string to_cycle_string(const Perm& p);

/// Parses cycle notation over the alphabet's labels. Whitespace separates
/// labels inside a cycle; `()` and the empty string denote the identity.
Perm parse_cycles(const AlphabetPtr& alphabet, std::string_view text);

/// Process-wide dense id of a permutation (alphabet and images); equal ids
/// mean equal permutations. Used to keep cache keys short.
std::uint64_t intern_id(const Perm& p);

struct AlternatingGenerationInput {
  AlphabetPtr omega;
  std::vector<Point> a_part;
  std::vector<Point> b_part;
  std::vector<Perm> generators;
};

/// Decides by explicit subgroup closure whether the ⟨generators⟩-conjugates of
/// Alt(a_part) generate Alt(omega).
///
/// Preconditions (checked, PreconditionError names the failing clause):
///  - omega = a_part ∪ b_part and a_part ∩ b_part = {ω};
///  - |a_part| >= 3;
///  - the generators are even and fix two common points of a_part \ {ω};
///  - ⟨generators⟩ leaves b_part invariant and acts transitively on it;
///  - |omega| <= 10 (the closure is enumerated element by element).
bool check_alternating_generation(const AlternatingGenerationInput& input);

}  // namespace branchgrp

template <>
struct std::hash<branchgrp::Perm> {
  std::size_t operator()(const branchgrp::Perm& p) const noexcept;
};
