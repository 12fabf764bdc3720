#pragma once

// Input groups: finitely generated, residually finite, with an effective
// residual-finiteness oracle. Also the quotient chain f_n : G -> Q_n obtained
// by detecting every nontrivial word of length at most n.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "branchgrp/perm.hpp"

namespace branchgrp {

using Generator = std::uint32_t;

/// A word over a finite symmetric generating set, stored as generator indices.
struct GWord {
  std::vector<Generator> letters;

  std::size_t length() const noexcept { return letters.size(); }
  bool empty() const noexcept { return letters.empty(); }
  bool operator==(const GWord&) const = default;
  auto operator<=>(const GWord&) const = default;
};

GWord concat(const GWord& u, const GWord& v);

/// A finite group given by an enumeration of its elements (index 0 is the
/// identity) and the left-multiplication action of each source generator on
/// that enumeration.
///
/// The enumeration is the breadth-first closure from the identity, expanding by
/// generator images in generator order, so it is reproducible bit for bit.
class FiniteQuotient {
 public:
  using Element = std::uint32_t;
  using State = std::vector<std::uint32_t>;
  /// Writes the state of s·q into `out` given the state of q.
  using LeftAction = std::function<void(Generator s, const State& q, State& out)>;

  /// Closure of the identity state under the given left actions. Throws
  /// CapExceeded beyond `max_order` elements.
  static FiniteQuotient closure(std::size_t generator_count, State identity,
                                const LeftAction& act, std::string tag, std::size_t max_order);

  /// The group generated by faithful permutation images of the generators.
  static FiniteQuotient from_permutations(const std::vector<Perm>& images, std::string tag,
                                          std::size_t max_order = 1u << 22);

  std::size_t order() const noexcept { return parent_.size(); }
  std::size_t generator_count() const noexcept { return left_.size(); }
  /// Family descriptor; two quotients with equal tags are the same homomorphism.
  const std::string& tag() const noexcept { return tag_; }

  /// Left multiplication by generator s, as a permutation of the enumeration.
  const Perm& generator_image(Generator s) const { return left_.at(s); }
  Element act(Generator s, Element q) const { return left_[s](q); }

  Element evaluate(const GWord& w) const;
  /// λ(w̄): left multiplication by the image of w.
  Perm left_action(const GWord& w) const;
  /// Breadth-first tree word reaching element i from the identity.
  GWord word_of(Element i) const;
  Element multiply(Element i, Element j) const;
  Element inverse(Element i) const;
  /// Full table, only for order <= 10^4.
  std::vector<std::vector<Element>> multiplication_table() const;

  static constexpr std::size_t kTableCap = 10000;

 private:
  std::string tag_;
  std::vector<Element> parent_;
  std::vector<Generator> parent_gen_;
  std::vector<Perm> left_;
};

struct TrivialMarker {
  bool operator==(const TrivialMarker&) const = default;
};

struct DetectingQuotient {
  FiniteQuotient quotient;
  FiniteQuotient::Element image;  // image of the queried word, never 0
};

using EfrfAnswer = std::variant<TrivialMarker, DetectingQuotient>;

struct NotConjugate {};
struct Unsupported {};
/// A witness c satisfies c⁻¹ g c = k.
using ConjugacyAnswer = std::variant<GWord, NotConjugate, Unsupported>;

/// An input group G with finite symmetric generating set S.
///
/// Implementations are immutable after construction, so every query is safe to
/// run concurrently.
class GroupOracle {
 public:
  virtual ~GroupOracle() = default;

  virtual std::string name() const = 0;

  std::size_t generator_count() const noexcept { return names_.size(); }
  const std::vector<std::string>& generator_names() const noexcept { return names_; }
  Generator inverse_generator(Generator s) const { return inverse_.at(s); }
  const std::vector<Generator>& inverse_pairing() const noexcept { return inverse_; }

  GWord inverse(const GWord& w) const;
  /// Free cancellation of adjacent s s⁻¹ pairs.
  GWord reduce(const GWord& w) const;

  /// Native word-problem decider (normal forms of the bundled group).
  virtual bool is_trivial(const GWord& w) const = 0;
  /// Canonical string of the native normal form; equal iff the elements are equal.
  virtual std::string normal_form_key(const GWord& w) const = 0;

  /// Family key of the quotient f_w detecting the nontrivial word w.
  virtual std::string detecting_quotient_key(const GWord& w) const = 0;
  virtual FiniteQuotient build_quotient(const std::string& key) const = 0;

  virtual ConjugacyAnswer conjugator(const GWord& g, const GWord& k) const;
  virtual bool has_ball_enumerator() const { return true; }

  /// Shortlex-least representatives of the distinct elements of length <= radius.
  std::vector<GWord> ball(std::size_t radius) const;

  GWord parse_word(std::string_view text) const;
  std::string format_word(const GWord& w) const;

  /// Descriptor text that `load_group_descriptor` reads back.
  virtual std::string descriptor() const;

 protected:
  /// Throws std::invalid_argument unless `inverse` is an involution on the indices.
  GroupOracle(std::vector<std::string> names, std::vector<Generator> inverse);

 private:
  std::vector<std::string> names_;
  std::vector<Generator> inverse_;
};

using OraclePtr = std::shared_ptr<const GroupOracle>;

/// Z = ⟨t⟩ with S = {t, T}, T = t⁻¹. f_w is onto Z/(|w|+1).
OraclePtr make_integers();
/// D∞ = ⟨a, t | a², (at)²⟩ with S = {a, t, T}. f_w is onto the dihedral group of
/// order 2m, m = |w|+1, with t a rotation and a a reflection.
OraclePtr make_infinite_dihedral();
/// Z/m with S = {t, T}; its own quotient detects every word.
OraclePtr make_finite_cyclic(std::size_t m);
/// Direct product; generator names of the second factor are suffixed on clash.
OraclePtr make_direct_product(OraclePtr first, OraclePtr second);

/// Resolves `integers`, `dihedral_infinite`, `finite:cyclic:<m>` (or
/// `finite:<m>`) and `product:<sel>,<sel>`.
OraclePtr make_group(std::string_view selector);

/// Group descriptor text format:
///
///     group <name>
///     generators <s1> <s2> ...
///     inverse <s> <s'>          (one line per pair; `inverse a a` for involutions)
///     family <integers | dihedral | cyclic <m> | product>
///     factor <selector>         (two lines, for `family product`)
///
/// Blank lines and lines starting with '#' are ignored.
OraclePtr load_group_descriptor(std::string_view text);

EfrfAnswer efrf_query(const GroupOracle& oracle, const GWord& w);

/// W_n: words of length <= n with nontrivial image, in shortlex order.
std::vector<GWord> words_up_to(const GroupOracle& oracle, std::size_t n);

struct QuotientMap {
  std::size_t level = 0;
  FiniteQuotient quotient;

  FiniteQuotient::Element image(const GWord& w) const { return quotient.evaluate(w); }
};

/// The chain f_1, f_2, ... built on demand and cached; concurrent callers see a
/// single cached map per level.
class QuotientChain {
 public:
  explicit QuotientChain(OraclePtr oracle, std::size_t max_order = 1u << 21);

  const GroupOracle& oracle() const noexcept { return *oracle_; }
  const OraclePtr& oracle_ptr() const noexcept { return oracle_; }

  /// build_level_map: n >= 1.
  const QuotientMap& level(std::size_t n) const;

 private:
  OraclePtr oracle_;
  std::size_t max_order_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::unique_ptr<QuotientMap>> cache_;
};

/// Uncached construction of f_n (the product of all f_w, w ∈ W_n, corestricted
/// to its image).
QuotientMap build_level_map(const GroupOracle& oracle, std::size_t n,
                            std::size_t max_order = 1u << 21);

/// Decides w̄ = 1 by evaluating f_{|w|}(w̄).
bool decide_wp_G(const QuotientChain& chain, const GWord& w);

struct KernelCheckReport {
  bool passed = true;
  std::size_t checked = 0;
  std::optional<GWord> counterexample;
};

/// Confirms that no nontrivial element of the radius ball maps to 1 under f.
/// Precondition: radius <= f.level.
KernelCheckReport kernel_min_length_check(const GroupOracle& oracle, const QuotientMap& f,
                                          std::size_t radius);

ConjugacyAnswer conjugate_in_G(const GroupOracle& oracle, const GWord& g, const GWord& k);

/// Generator images in cycle notation on the enumeration, preceded by
/// `order <|Q|>`; one `s -> <cycles>` line per generator.
std::string format_homomorphism(const GroupOracle& oracle, const FiniteQuotient& q);

}  // namespace branchgrp
