#pragma once

// The alphabets X_n = Q_n ∪ {x_n, y_n, z_n, p_n, q_n}, the actions φ_n of G
// and ψ_n of A = Alt({x,y,z,o,p,q}) on them, and the group H = G × A.
//
// Letter order inside X_n: the cosets of Q_n in their breadth-first
// enumeration order (so o_n, the identity coset, is index 0), then x_n, y_n,
// z_n, p_n, q_n. Display labels are `q<i>@<n>`, `x@<n>`, ..., `q@<n>`.

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "branchgrp/perm.hpp"
#include "branchgrp/resfin.hpp"

namespace branchgrp {

enum class LetterKind { Coset, X, Y, Z, P, Q };

struct Letter {
  std::size_t level = 1;
  LetterKind kind = LetterKind::Coset;
  Point coset = 0;  // meaningful for LetterKind::Coset only

  bool operator==(const Letter&) const = default;
};

class AlphabetLevel {
 public:
  AlphabetLevel(std::size_t level, const QuotientMap& map);

  std::size_t level() const noexcept { return level_; }
  const FiniteQuotient& quotient() const noexcept { return map_->quotient; }
  std::size_t coset_count() const noexcept { return map_->quotient.order(); }
  std::size_t size() const noexcept { return coset_count() + 5; }
  const AlphabetPtr& letters() const noexcept { return letters_; }

  Point o() const noexcept { return 0; }
  Point x() const noexcept { return static_cast<Point>(coset_count()); }
  Point y() const noexcept { return x() + 1; }
  Point z() const noexcept { return x() + 2; }
  Point p() const noexcept { return x() + 3; }
  Point q() const noexcept { return x() + 4; }

  Point index(const Letter& letter) const;
  Letter letter(Point index) const;
  std::string label(Point index) const { return letters_->label(index); }

 private:
  std::size_t level_;
  const QuotientMap* map_;
  AlphabetPtr letters_;
};

/// Formats a letter as `q<i>@<n>`, `x@<n>`, ...
std::string letter_literal(const Letter& letter);
/// Parses the letter literal syntax; the level is part of the literal.
Letter parse_letter(std::string_view text);

/// The 6-point alphabet {x, y, z, o, p, q} on which A acts.
const AlphabetPtr& a_alphabet();

/// An element of A = Alt({x,y,z,o,p,q}).
class AElem {
 public:
  AElem();
  /// Throws std::invalid_argument unless `perm` is an even permutation of the A alphabet.
  explicit AElem(Perm perm);
  static AElem parse(std::string_view cycles);

  const Perm& perm() const noexcept { return perm_; }
  bool is_identity() const { return perm_.is_identity(); }
  bool operator==(const AElem& other) const { return perm_ == other.perm_; }

 private:
  Perm perm_;
};

AElem operator*(const AElem& a, const AElem& b);
AElem inverse(const AElem& a);

/// An element (g, a) of H = G × A; g is kept as a word.
struct HElem {
  GWord g;
  AElem a;

  bool operator==(const HElem& other) const = default;
};

/// Componentwise product; the G-parts are concatenated.
HElem h_mult(const HElem& u, const HElem& v);
HElem h_inv(const GroupOracle& oracle, const HElem& u);

/// `<G-word>|<A-cycles>`, e.g. `t a|(x y z)`; either side may be empty.
HElem parse_helem(const GroupOracle& oracle, std::string_view text);
std::string format_helem(const GroupOracle& oracle, const HElem& h);

struct TowerLimits {
  std::size_t vertex_cap = 2'000'000;
  std::size_t max_quotient_order = 1u << 21;
};

/// The tree data attached to one input group: the quotient chain, the
/// alphabets X_n, and the actions φ_n, ψ_n. All caches are guarded, so a
/// Tower may be shared between threads.
class Tower {
 public:
  explicit Tower(OraclePtr oracle, TowerLimits limits = {});

  const GroupOracle& oracle() const noexcept { return chain_.oracle(); }
  const OraclePtr& oracle_ptr() const noexcept { return chain_.oracle_ptr(); }
  const QuotientChain& chain() const noexcept { return chain_; }
  const TowerLimits& limits() const noexcept { return limits_; }

  /// X_n for n >= 1.
  const AlphabetLevel& alphabet(std::size_t n) const;

  /// φ_n(h): left multiplication by f_n(g) on the cosets, twisted by (p_n q_n)
  /// when that permutation is odd.
  const Perm& phi(std::size_t n, const HElem& h) const;
  /// Image of one letter of X_n under φ_n(h) (or its inverse) without building the permutation.
  Point phi_image(std::size_t n, const HElem& h, Point letter, bool inverse = false) const;
  Point psi_image(std::size_t n, const AElem& a, Point letter, bool inverse = false) const;
  /// ψ_n(h): the A-part acting on {x_n, y_n, z_n, o_n, p_n, q_n}.
  Perm psi(std::size_t n, const HElem& h) const;
  Perm psi(std::size_t n, const AElem& a) const;

  /// Triviality in H: decide_wp_G on the freely reduced G-part (through the
  /// detecting quotient of the word itself beyond kChainWordLimit letters)
  /// and direct comparison on A.
  bool is_trivial(const HElem& h) const;
  static constexpr std::size_t kChainWordLimit = 8;

  /// Product of |X_{base+1}| ... |X_{base+depth}|. Stops early (returning a
  /// value above `stop_above`) once the product exceeds `stop_above`, so deep
  /// alphabets are not built just to be rejected.
  std::size_t vertex_count(std::size_t base, std::size_t depth,
                           std::size_t stop_above = std::numeric_limits<std::size_t>::max()) const;

  /// Opaque per-tower caches owned by higher layers. `make` runs at most once per key.
  std::shared_ptr<void> cache_slot(const std::string& key,
                                   const std::function<std::shared_ptr<void>()>& make) const;

 private:
  QuotientChain chain_;
  TowerLimits limits_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::unique_ptr<AlphabetLevel>> alphabets_;
  mutable std::map<std::pair<std::size_t, GWord>, Perm> phi_cache_;
  mutable std::map<std::size_t, std::vector<int>> generator_signs_;
  mutable std::map<std::string, std::shared_ptr<void>> slots_;
};

}  // namespace branchgrp
