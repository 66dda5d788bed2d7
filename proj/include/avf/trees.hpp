#pragma once

// Rooted unordered trees, their combinatorial coefficients, and the
// partition/skeleton machinery behind the substitution law.

#include "avf/rational.hpp"

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace avf {

/**
 * Canonical rooted unordered tree.
 *
 * Branches are kept sorted in descending (order, key) so that any two trees
 * built from the same multiset of branches share one representation. The
 * canonical key doubles as the hash input. A default-constructed Tree is the
 * empty tree, which is distinct from the single vertex.
 */
class Tree {
 public:
  Tree() = default;

  static Tree empty() { return Tree(); }
  static Tree leaf() { return graft({}); }

  /// Grafts the roots of `children` onto a new root. Order of the arguments
  /// is irrelevant; an empty list yields the single vertex.
  static Tree graft(std::vector<Tree> children) {
    for (const auto& c : children) {
      if (c.is_empty()) throw std::invalid_argument("graft: empty tree cannot be a branch");
    }
    std::sort(children.begin(), children.end(),
              [](const Tree& x, const Tree& y) { return y < x; });
    auto node = std::make_shared<Node>();
    node->order = 1;
    if (children.empty()) {
      node->key = "o";
    } else {
      node->key = "[";
      for (std::size_t i = 0; i < children.size(); ++i) {
        if (i) node->key += ',';
        node->key += children[i].key();
        node->order += children[i].order();
      }
      node->key += ']';
    }
    node->children = std::move(children);
    node->hash = std::hash<std::string>{}(node->key);
    Tree t;
    t.node_ = std::move(node);
    return t;
  }

  /// Parses nested-bracket notation: "o" or "•" for a vertex, "[t1,...,tm]"
  /// for a grafted tree, "∅" for the empty tree.
  static Tree parse(std::string_view text);

  bool is_empty() const { return node_ == nullptr; }
  bool is_leaf() const { return node_ && node_->children.empty(); }

  int order() const {
    if (!node_) throw std::domain_error("order of the empty tree is undefined");
    return node_->order;
  }

  std::span<const Tree> children() const {
    if (!node_) return {};
    return node_->children;
  }

  /// Canonical ASCII key ("o", "[o]", "[[o],o]", ...); "" for the empty tree.
  const std::string& key() const {
    static const std::string kEmpty;
    return node_ ? node_->key : kEmpty;
  }

  std::size_t hash() const { return node_ ? node_->hash : 0; }

  friend bool operator==(const Tree& x, const Tree& y) {
    if (x.node_ == y.node_) return true;
    if (!x.node_ || !y.node_) return false;
    return x.node_->hash == y.node_->hash && x.node_->key == y.node_->key;
  }

  /// Total order: empty first, then by order, then by key.
  friend std::strong_ordering operator<=>(const Tree& x, const Tree& y) {
    if (x.is_empty() || y.is_empty()) return !x.is_empty() <=> !y.is_empty();
    if (auto c = x.order() <=> y.order(); c != 0) return c;
    return x.key() <=> y.key();
  }

 private:
  struct Node {
    std::vector<Tree> children;
    int order = 1;
    std::string key;
    std::size_t hash = 0;
  };
  std::shared_ptr<const Node> node_;
};

namespace detail {

/// Minimal recursive-descent parser for bracket notation.
class TreeParser {
 public:
  explicit TreeParser(std::string_view s) : s_(s) {}

  Tree parse_all() {
    skip();
    if (consume("∅")) {
      skip();
      if (pos_ != s_.size()) fail("trailing input");
      return Tree::empty();
    }
    Tree t = parse_tree();
    skip();
    if (pos_ != s_.size()) fail("trailing input");
    return t;
  }

 private:
  Tree parse_tree() {
    skip();
    if (consume("o") || consume("•")) return Tree::leaf();
    if (!consume("[")) fail("expected vertex or '['");
    std::vector<Tree> kids;
    skip();
    if (consume("]")) return Tree::leaf();
    for (;;) {
      kids.push_back(parse_tree());
      skip();
      if (consume("]")) break;
      if (!consume(",")) fail("expected ',' or ']'");
    }
    return Tree::graft(std::move(kids));
  }

  bool consume(std::string_view tok) {
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void skip() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }
  [[noreturn]] void fail(const char* what) const {
    throw std::invalid_argument("Tree::parse: " + std::string(what) + " at offset " +
                                std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Tree Tree::parse(std::string_view text) { return detail::TreeParser(text).parse_all(); }

/// Nested-bracket rendering, e.g. "[[•],•]"; "∅" for the empty tree.
inline std::string to_string(const Tree& t) {
  if (t.is_empty()) return "∅";
  if (t.is_leaf()) return "•";
  std::string s = "[";
  bool first = true;
  for (const auto& c : t.children()) {
    if (!first) s += ',';
    first = false;
    s += to_string(c);
  }
  return s + "]";
}

}  // namespace avf

template <>
struct std::hash<avf::Tree> {
  std::size_t operator()(const avf::Tree& t) const noexcept { return t.hash(); }
};

namespace avf {

inline Tree leaf() { return Tree::leaf(); }
inline Tree graft(std::vector<Tree> children) { return Tree::graft(std::move(children)); }
inline int order(const Tree& t) { return t.order(); }

namespace detail {

inline void require_nonempty(const Tree& t, const char* what) {
  if (t.is_empty()) throw std::domain_error(std::string(what) + " of the empty tree is undefined");
}

/// Calls `fn(count)` for every run of equal branches (branches are sorted).
template <class Fn>
void for_each_multiplicity(const Tree& t, Fn&& fn) {
  auto kids = t.children();
  std::size_t i = 0;
  while (i < kids.size()) {
    std::size_t j = i + 1;
    while (j < kids.size() && kids[j] == kids[i]) ++j;
    fn(static_cast<int>(j - i));
    i = j;
  }
}

}  // namespace detail

/// σ(τ) = σ(τ₁)···σ(τₘ)·μ₁!μ₂!···, the order of the automorphism group.
inline Rational symmetry(const Tree& t) {
  detail::require_nonempty(t, "symmetry");
  Rational s = 1;
  for (const auto& c : t.children()) s *= symmetry(c);
  detail::for_each_multiplicity(t, [&](int mu) { s *= factorial(mu); });
  return s;
}

/// γ(τ) = |τ|·γ(τ₁)···γ(τₘ).
inline Rational density(const Tree& t) {
  detail::require_nonempty(t, "density");
  Rational g = t.order();
  for (const auto& c : t.children()) g *= density(c);
  return g;
}

/// Connes–Moscovici weight α(τ); satisfies σ(τ)α(τ)γ(τ) = |τ|!.
inline Rational cm_weight(const Tree& t) {
  detail::require_nonempty(t, "cm_weight");
  Rational w = factorial(t.order() - 1);
  for (const auto& c : t.children()) w *= cm_weight(c) / factorial(c.order());
  detail::for_each_multiplicity(t, [&](int mu) { w /= factorial(mu); });
  return w;
}

/// All distinct trees of order 1..max_order. Element k-1 holds the trees of
/// order k in ascending canonical order.
inline std::vector<std::vector<Tree>> enumerate_trees(int max_order) {
  if (max_order < 1) throw std::invalid_argument("enumerate_trees: max_order must be >= 1");
  std::vector<std::vector<Tree>> by_order(max_order);
  by_order[0].push_back(Tree::leaf());
  std::vector<Tree> pool{Tree::leaf()};  // every tree of order < current, ascending

  for (int n = 2; n <= max_order; ++n) {
    std::vector<Tree> out;
    std::vector<Tree> picked;
    // Branch multisets as non-increasing index sequences into `pool`.
    std::function<void(int, std::size_t)> rec = [&](int remaining, std::size_t max_idx) {
      if (remaining == 0) {
        out.push_back(Tree::graft(picked));
        return;
      }
      for (std::size_t i = max_idx + 1; i-- > 0;) {
        if (pool[i].order() > remaining) continue;
        picked.push_back(pool[i]);
        rec(remaining - pool[i].order(), i);
        picked.pop_back();
      }
    };
    rec(n - 1, pool.size() - 1);
    std::sort(out.begin(), out.end());
    pool.insert(pool.end(), out.begin(), out.end());
    std::sort(pool.begin(), pool.end());
    by_order[n - 1] = std::move(out);
  }
  return by_order;
}

/// Flat list of all trees of order 1..max_order, grouped by order; empty for 0.
inline std::vector<Tree> trees_up_to(int max_order) {
  std::vector<Tree> flat;
  if (max_order == 0) return flat;
  for (auto& group : enumerate_trees(max_order)) flat.insert(flat.end(), group.begin(), group.end());
  return flat;
}

/**
 * Ordered (plane) tree stored as a preorder parent array: vertex 0 is the
 * root and parent[v] < v for v > 0. Edge e joins vertex e+1 to its parent.
 */
class OrderedTree {
 public:
  /// The representative ω(τ): preorder traversal in canonical branch order.
  static OrderedTree of(const Tree& t) {
    detail::require_nonempty(t, "ordered representative");
    OrderedTree o;
    std::function<void(const Tree&, int)> visit = [&](const Tree& s, int parent) {
      const int self = static_cast<int>(o.parent_.size());
      o.parent_.push_back(parent);
      for (const auto& c : s.children()) visit(c, self);
    };
    visit(t, -1);
    o.build_children();
    return o;
  }

  static OrderedTree from_parents(std::vector<int> parent) {
    if (parent.empty() || parent[0] != -1)
      throw std::invalid_argument("OrderedTree: vertex 0 must be the root");
    for (std::size_t v = 1; v < parent.size(); ++v) {
      if (parent[v] < 0 || parent[v] >= static_cast<int>(v))
        throw std::invalid_argument("OrderedTree: parent array must be in preorder");
    }
    OrderedTree o;
    o.parent_ = std::move(parent);
    o.build_children();
    return o;
  }

  int order() const { return static_cast<int>(parent_.size()); }
  int edge_count() const { return order() - 1; }
  const std::vector<int>& parents() const { return parent_; }
  const std::vector<int>& children_of(int v) const { return children_[v]; }

  /// Forgets the ordering.
  Tree to_tree() const { return subtree(0); }

  Tree subtree(int v) const {
    std::vector<Tree> kids;
    for (int c : children_[v]) kids.push_back(subtree(c));
    return Tree::graft(std::move(kids));
  }

 private:
  void build_children() {
    children_.assign(parent_.size(), {});
    for (std::size_t v = 1; v < parent_.size(); ++v) children_[parent_[v]].push_back(static_cast<int>(v));
  }

  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
};

/// Pieces of a partition: the one containing the root and the rest.
struct PartitionPieces {
  Tree root_piece;
  std::vector<Tree> other_pieces;  // sorted ascending
};

/// A partition of an ordered tree: a subset of its edges marked as dashed.
class Partition {
 public:
  Partition(std::shared_ptr<const OrderedTree> base, std::uint32_t dashed)
      : base_(std::move(base)), dashed_(dashed) {
    if (!base_) throw std::invalid_argument("Partition: null base tree");
    if (base_->edge_count() >= 32) throw std::invalid_argument("Partition: tree too large");
    if (dashed_ >> base_->edge_count()) throw std::invalid_argument("Partition: edge id out of range");
  }

  const OrderedTree& base() const { return *base_; }
  std::uint32_t dashed_mask() const { return dashed_; }
  bool is_dashed(int edge) const { return (dashed_ >> edge) & 1U; }

  /// #(p): the number of pieces.
  int piece_count() const { return 1 + std::popcount(dashed_); }

  /// Piece representative (topmost vertex) of every vertex.
  std::vector<int> piece_roots() const {
    const auto& par = base_->parents();
    std::vector<int> root(par.size(), 0);
    for (std::size_t v = 1; v < par.size(); ++v)
      root[v] = is_dashed(static_cast<int>(v) - 1) ? static_cast<int>(v) : root[par[v]];
    return root;
  }

  PartitionPieces pieces() const {
    PartitionPieces out;
    out.root_piece = piece_tree(0);
    for (int v = 1; v < base_->order(); ++v) {
      if (is_dashed(v - 1)) out.other_pieces.push_back(piece_tree(v));
    }
    std::sort(out.other_pieces.begin(), out.other_pieces.end());
    return out;
  }

  /// χ(p): each piece contracted to a vertex, dashed edges made solid.
  Tree skeleton() const {
    const auto root = piece_roots();
    const auto& par = base_->parents();
    std::vector<std::vector<int>> kids(par.size());
    for (int v = 1; v < base_->order(); ++v) {
      if (is_dashed(v - 1)) kids[root[par[v]]].push_back(v);
    }
    std::function<Tree(int)> build = [&](int p) {
      std::vector<Tree> ch;
      for (int c : kids[p]) ch.push_back(build(c));
      return Tree::graft(std::move(ch));
    };
    return build(0);
  }

 private:
  Tree piece_tree(int v) const {
    std::vector<Tree> kids;
    for (int c : base_->children_of(v)) {
      if (!is_dashed(c - 1)) kids.push_back(piece_tree(c));
    }
    return Tree::graft(std::move(kids));
  }

  std::shared_ptr<const OrderedTree> base_;
  std::uint32_t dashed_;
};

/// All 2^(|τ|-1) partitions of the canonical ordered representative ω(τ).
inline std::vector<Partition> enumerate_partitions(const OrderedTree& base) {
  auto shared = std::make_shared<const OrderedTree>(base);
  std::vector<Partition> out;
  const std::uint32_t count = 1U << base.edge_count();
  out.reserve(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) out.emplace_back(shared, mask);
  return out;
}

inline std::vector<Partition> enumerate_partitions(const Tree& t) {
  return enumerate_partitions(OrderedTree::of(t));
}

inline PartitionPieces partition_pieces(const Partition& p) { return p.pieces(); }
inline Tree skeleton(const Partition& p) { return p.skeleton(); }

}  // namespace avf
