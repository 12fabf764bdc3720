#pragma once

// Automorphisms of the trees T^[ℓ] whose level-i vertices are words over
// X_{ℓ+1} × ... × X_{ℓ+i}, kept as immutable expression trees and evaluated
// lazily.
//
// Vertex order at a fixed depth is lexicographic in the letter order of each
// X_n (cosets first, then x, y, z, p, q); index = mixed-radix number with the
// first letter most significant.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "branchgrp/alphabet.hpp"

namespace branchgrp {

struct Vertex {
  std::size_t base_level = 0;
  std::vector<Point> letters;  // letters[i] ∈ X_{base_level + i + 1}

  std::size_t depth() const noexcept { return letters.size(); }
  Vertex child(Point letter) const;
  /// The subtree vertex after removing the first `k` letters.
  Vertex suffix(std::size_t k) const;
  bool extends(const Vertex& prefix) const;
  bool operator==(const Vertex&) const = default;
};

/// Space-separated letter labels, `root` for the empty vertex.
std::string format_vertex(const Tower& tower, const Vertex& v);
/// Inverse of format_vertex; the base level is taken from the first letter.
Vertex parse_vertex(const Tower& tower, std::size_t base_level, std::string_view text);

class TreeAut {
 public:
  enum class Kind { Identity, Rooted, Tilde, Shifted, Product, Inverse };

  static TreeAut identity(std::size_t base_level);
  /// σ̂ for σ a permutation of X_{ℓ+1}.
  static TreeAut rooted(std::size_t base_level, Perm sigma);
  /// h̃^[ℓ].
  static TreeAut tilde(std::size_t base_level, HElem h);
  /// Acts as `inner` below v and fixes everything else.
  static TreeAut shifted(Vertex v, TreeAut inner);
  /// Product a_1 a_2 ... a_k, a_k applied first.
  static TreeAut product(std::size_t base_level, std::vector<TreeAut> factors);
  TreeAut inverse() const;

  std::size_t base_level() const noexcept;
  Kind kind() const noexcept;
  /// Syntactic: true only for the Identity node.
  bool is_identity() const noexcept { return kind() == Kind::Identity; }

  const Perm& perm() const;            // Rooted
  const Perm& perm_inverse() const;    // Rooted
  const HElem& helem() const;          // Tilde
  const Vertex& shift() const;         // Shifted
  const TreeAut& inner() const;        // Shifted, Inverse
  const std::vector<TreeAut>& factors() const;  // Product

  /// Exact structural key; equal keys mean equal expressions.
  const std::string& key() const noexcept;

  struct Node;

 private:
  explicit TreeAut(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

TreeAut operator*(const TreeAut& a, const TreeAut& b);

/// Alias of TreeAut::shifted with the level check spelled out.
TreeAut embed_shift(const Vertex& v, const TreeAut& inner);

Vertex eval_vertex(const Tower& tower, const TreeAut& a, const Vertex& v);
/// Image of a first-level letter.
Point eval_letter(const Tower& tower, const TreeAut& a, Point letter, bool inverse = false);

TreeAut section(const Tower& tower, const TreeAut& a, Point letter);
TreeAut section(const Tower& tower, const TreeAut& a, const Vertex& v);

/// The induced permutation of X_{ℓ+1}.
Perm root_perm(const Tower& tower, const TreeAut& a);

/// Permutation of the depth-d vertices (numeric alphabet, lexicographic
/// indices). Throws CapExceeded beyond tower.limits().vertex_cap.
Perm level_perm(const Tower& tower, const TreeAut& a, std::size_t depth);

std::size_t vertex_index(const Tower& tower, const Vertex& v);
Vertex vertex_at(const Tower& tower, std::size_t base_level, std::size_t depth, std::size_t index);

struct Portrait {
  std::size_t base_level = 0;
  std::size_t depth = 0;
  /// One entry per vertex of depth < `depth`, in preorder (lexicographic).
  std::vector<std::pair<Vertex, Perm>> labels;
};

Portrait portrait(const Tower& tower, const TreeAut& a, std::size_t depth);
/// `portrait depth=<d>` followed by `<vertex> : <cycles>` lines.
std::string format_portrait_text(const Tower& tower, const Portrait& p);
std::string format_portrait_dot(const Tower& tower, const Portrait& p);

struct WreathDecomposition {
  Perm root;
  std::vector<TreeAut> children;  // indexed by the letters of X_{ℓ+1}
};

WreathDecomposition wreath_decompose(const Tower& tower, const TreeAut& a);
/// Rooted(root) ∘ ∏ Shifted(d, children[d]).
TreeAut wreath_recompose(std::size_t base_level, const WreathDecomposition& w);

/// A vertex of depth <= d moved by `a`, searched through sections; nullopt if
/// `a` fixes every vertex of depth d.
std::optional<Vertex> moved_vertex(const Tower& tower, const TreeAut& a, std::size_t depth);
bool fixes_to_depth(const Tower& tower, const TreeAut& a, std::size_t depth);
bool equal_to_depth(const Tower& tower, const TreeAut& a, const TreeAut& b, std::size_t depth);

/// Brute-force oracle: walks the depth-d vertices in lexicographic order and
/// evaluates each full vertex from the root with eval_vertex. A subtree is
/// skipped only when its root is fixed and the section there is syntactically
/// the identity. Returns the first moved vertex (minimal depth first along
/// the walk), or nullopt.
std::optional<Vertex> brute_force_moved_vertex(const Tower& tower, const TreeAut& a,
                                               std::size_t depth);
/// No pruning at all; every depth-d vertex is evaluated. Cap-checked.
std::optional<Vertex> naive_moved_vertex(const Tower& tower, const TreeAut& a, std::size_t depth);

}  // namespace branchgrp
