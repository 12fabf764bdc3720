#pragma once

// Words in the free product H * B_ℓ and their images in Γ_ℓ, generated by the
// tilde family h̃^[ℓ] and the rooted group B_ℓ = Alt(X_{ℓ+1}).

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "branchgrp/treeauto.hpp"

namespace branchgrp {

struct Token {
  enum class Kind { B, H };
  Kind kind = Kind::H;
  std::optional<Perm> b;  // Kind::B: an even permutation of X_{ℓ+1}
  HElem h;                // Kind::H
  bool inverted = false;  // postfix ' in the word syntax

  static Token rooted(Perm b, bool inverted = false);
  static Token helem(HElem h, bool inverted = false);
};

/// b_1 h_1 b_2 ... h_n b_{n+1}: interior b's and all h's nontrivial.
struct GammaWord {
  std::size_t level = 0;
  std::vector<Perm> b;   // n + 1 entries
  std::vector<HElem> h;  // n entries
};

GammaWord empty_word(const Tower& tower, std::size_t level);

/// Throws PreconditionError on an odd B letter or a B letter of the wrong alphabet.
GammaWord normal_form(const Tower& tower, std::size_t level, const std::vector<Token>& tokens);

std::size_t h_count(const GammaWord& w);

/// Generator length over Σ₀ as used by the decider: a B token counts 1 and
/// an H token (g, a) counts max(1, |g|).
std::size_t sigma_length(const std::vector<Token>& tokens);

/// v embeds in w as an ordered, not necessarily contiguous, subsequence.
template <class T, class Eq = std::equal_to<T>>
bool is_fragmented_subword(const std::vector<T>& v, const std::vector<T>& w, Eq eq = {}) {
  std::size_t i = 0;
  for (std::size_t j = 0; j < w.size() && i < v.size(); ++j) {
    if (eq(v[i], w[j])) ++i;
  }
  return i == v.size();
}

struct SectionTrace {
  GammaWord word;
  /// origins[j]: indices into the source word's H letters whose product (in
  /// order) is word.h[j].
  std::vector<std::vector<std::size_t>> origins;
};

SectionTrace section_word_traced(const Tower& tower, const GammaWord& w, Point d);
GammaWord section_word(const Tower& tower, const GammaWord& w, Point d);

/// Product of the b's: the action of pr(w) on the first level.
Perm word_root_perm(const Tower& tower, const GammaWord& w);

TreeAut pr(const GammaWord& w);
TreeAut pr(std::size_t level, const std::vector<Token>& tokens);

/// Stable text key: level, B letters by intern id, H letters by their normal
/// form keys. Equal keys mean equal words up to G-relations inside letters.
std::string word_key(const Tower& tower, const GammaWord& w);

struct WpResult {
  bool trivial = true;
  std::size_t ell = 0;      // Σ₀-length used
  std::size_t depth = 0;    // 2ℓ
  std::optional<Vertex> witness;
};

WpResult decide_wp_Gamma(const Tower& tower, const std::vector<Token>& tokens);
/// Decides triviality of a level-0 word whose Σ₀-length is `ell`.
WpResult decide_wp_Gamma(const Tower& tower, const GammaWord& w, std::size_t ell);
/// First vertex of depth <= depth moved by pr(w), or nullopt; symbolic and memoized.
std::optional<Vertex> word_moved_vertex(const Tower& tower, const GammaWord& w, std::size_t depth);

/// Portrait built from section_word, memoized by word_key.
Portrait word_portrait(const Tower& tower, const GammaWord& w, std::size_t depth);

struct GeneratorImage {
  std::string token;       // the token as written in the word syntax
  std::optional<Perm> image;  // absent in degraded output
};

struct EfrfGammaOutput {
  std::size_t depth = 0;
  std::size_t degree = 0;
  bool degraded = false;  // vertex cap exceeded: images are described lazily
  std::vector<GeneratorImage> images;
  Vertex witness;
};

using EfrfGammaAnswer = std::variant<TrivialMarker, EfrfGammaOutput>;

EfrfGammaAnswer efrf_output_Gamma(const Tower& tower, const std::vector<Token>& tokens);
std::string format_efrf_output(const Tower& tower, const EfrfGammaOutput& out);

// ---------------------------------------------------------------------------
// Conjugacy testbed

struct CertificateBounds {
  std::size_t h_radius = 1;
  std::size_t max_h_count = 1;
  std::size_t depth = 4;
  std::vector<Perm> b_gens;  // empty: the 3-cycles on x₁ y₁ z₁ o₁ p₁ q₁
};

std::vector<Perm> default_b_generators(const Tower& tower);

/// (cycle length, multiplicity) pairs in ascending length order.
using CycleCounts = std::vector<std::pair<std::size_t, std::size_t>>;
CycleCounts cycle_counts(const Perm& p);

struct Certificate {
  enum class Kind { ConjugateWitness, NotConjugateAtLevel, Unknown };
  Kind kind = Kind::Unknown;
  GammaWord witness;                   // ConjugateWitness: c with c⁻¹ g̃ c = k̃
  std::size_t level = 0;               // NotConjugateAtLevel
  CycleCounts type_g, type_k;
  std::size_t verified_depth = 0;
  std::vector<std::string> transcript;
};

Certificate conjugacy_certificate(const Tower& tower, const HElem& g, const HElem& k,
                                  const CertificateBounds& bounds = {});
/// Recomputes the evidence of a certificate.
bool recheck_certificate(const Tower& tower, const HElem& g, const HElem& k, const Certificate& c);

std::string certificate_kind_name(Certificate::Kind kind);

/// Elements of H of length <= radius over S ∪ {(x y z), (x y o), (x y p), (x y q)}^±,
/// with their lengths, in breadth-first order.
std::vector<std::pair<HElem, std::size_t>> h_ball(const Tower& tower, std::size_t radius);

struct BranchIdentityInstance {
  HElem h, k;
  bool commutator_ok = false;
  bool shift_ok = false;
};

struct BranchIdentityReport {
  std::size_t alphabet_size = 0;
  std::vector<BranchIdentityInstance> instances;
  bool passed() const;
};

BranchIdentityReport verify_branch_identities(const Tower& tower, std::size_t sample_count,
                                              std::uint64_t seed, std::size_t depth = 4);

// ---------------------------------------------------------------------------
// Word syntax

/// Whitespace-separated `B(<cycles on X_{ℓ+1}>)` and `H(<G-word>|<A-cycles>)`,
/// each optionally followed by `'`. ParseError positions are token indices.
std::vector<Token> parse_word_file(const Tower& tower, std::size_t level, std::string_view text);
std::string format_token(const Tower& tower, const Token& t);
std::string format_tokens(const Tower& tower, const std::vector<Token>& tokens);
std::string format_gamma_word(const Tower& tower, const GammaWord& w);
std::vector<Token> tokens_of(const GammaWord& w);

// ---------------------------------------------------------------------------
// Seeded samplers shared by the verification suites

HElem random_helem(const Tower& tower, std::mt19937_64& rng, std::size_t max_g_length);
/// Random even permutation of X_{level+1}: a 3-cycle, or a product of two.
Perm random_b(const Tower& tower, std::size_t level, std::mt19937_64& rng);
/// H tokens get G-parts of length <= max_g_length.
Token random_token(const Tower& tower, std::size_t level, std::mt19937_64& rng,
                   std::size_t max_g_length = 1);
/// The small Σ₀ sub-alphabet used for exhaustive enumeration.
std::vector<Token> desk_tokens(const Tower& tower);
/// A normal-form word with exactly n H letters.
GammaWord random_normal_word(const Tower& tower, std::size_t level, std::size_t n,
                             std::mt19937_64& rng);

}  // namespace branchgrp
