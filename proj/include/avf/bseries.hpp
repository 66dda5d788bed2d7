#pragma once

// Coefficient maps on trees and the substitution law b⋆a.

#include "avf/rational.hpp"
#include "avf/trees.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

namespace avf {

/**
 * Immutable map {∅} ∪ {trees of order ≤ max_order} → ℚ.
 *
 * Construction checks that every tree up to max_order has exactly one entry.
 * Looking up a tree beyond max_order throws std::out_of_range; there is no
 * implicit zero.
 */
class CoeffMap {
 public:
  CoeffMap(Rational empty_value, std::unordered_map<Tree, Rational> entries, int max_order)
      : empty_value_(std::move(empty_value)), entries_(std::move(entries)), max_order_(max_order) {
    if (max_order_ < 0) throw std::invalid_argument("CoeffMap: negative max_order");
    std::size_t expected = 0;
    if (max_order_ > 0) {
      for (const auto& group : enumerate_trees(max_order_)) expected += group.size();
    }
    for (const auto& [t, v] : entries_) {
      if (t.is_empty()) throw std::invalid_argument("CoeffMap: ∅ belongs in empty_value");
      if (t.order() > max_order_)
        throw std::invalid_argument("CoeffMap: entry " + to_string(t) + " exceeds max_order");
    }
    if (entries_.size() != expected)
      throw std::invalid_argument("CoeffMap: expected " + std::to_string(expected) +
                                  " entries, got " + std::to_string(entries_.size()));
  }

  /// Builds a map by evaluating `fn` on every tree up to max_order.
  static CoeffMap from_function(int max_order, Rational empty_value,
                                const std::function<Rational(const Tree&)>& fn) {
    std::unordered_map<Tree, Rational> entries;
    if (max_order > 0) {
      for (const auto& t : trees_up_to(max_order)) entries.emplace(t, fn(t));
    }
    return CoeffMap(std::move(empty_value), std::move(entries), max_order);
  }

  const Rational& at(const Tree& t) const {
    if (t.is_empty()) return empty_value_;
    if (t.order() > max_order_)
      throw std::out_of_range("CoeffMap: " + to_string(t) + " beyond populated order " +
                              std::to_string(max_order_));
    return entries_.at(t);
  }
  const Rational& operator()(const Tree& t) const { return at(t); }

  int max_order() const { return max_order_; }
  const std::unordered_map<Tree, Rational>& entries() const { return entries_; }

 private:
  Rational empty_value_;
  std::unordered_map<Tree, Rational> entries_;
  int max_order_;
};

/// e(∅) = 1, e(τ) = 1/γ(τ): coefficients of the exact flow.
inline CoeffMap exact_solution_coeffs(int max_order) {
  return CoeffMap::from_function(max_order, 1, [](const Tree& t) { return Rational(1 / density(t)); });
}

/// Coefficients of the averaged vector field method:
/// a(∅) = a(•) = 1, a([τ₁..τₘ]) = a(τ₁)···a(τₘ)/(m+1).
inline CoeffMap avf2_coeffs(int max_order) {
  std::function<Rational(const Tree&)> rec = [&](const Tree& t) -> Rational {
    Rational v = 1;
    for (const auto& c : t.children()) v *= rec(c);
    return v / static_cast<int>(t.children().size() + 1);
  };
  return CoeffMap::from_function(max_order, 1, rec);
}

namespace detail {

inline void require_b_empty_zero(const CoeffMap& b) {
  if (b.at(Tree::empty()) != 0) throw std::invalid_argument("substitution: b(∅) must be 0");
}

}  // namespace detail

/// (b⋆a)(τ) = Σ_{p ∈ 𝒫(τ)} a(χ(p)) Π_{δ ∈ P(p)} b(δ), by enumerating all
/// partitions of ω(τ); (b⋆a)(∅) = a(∅).
inline Rational substitute_bruteforce(const CoeffMap& b, const CoeffMap& a, const Tree& t) {
  detail::require_b_empty_zero(b);
  if (t.is_empty()) return a.at(t);
  Rational sum = 0;
  for (const auto& p : enumerate_partitions(t)) {
    const auto pieces = p.pieces();
    Rational term = a.at(p.skeleton()) * b.at(pieces.root_piece);
    for (const auto& d : pieces.other_pieces) term *= b.at(d);
    sum += term;
  }
  return sum;
}

/**
 * Solves b⋆a = 1/γ for b, order by order.
 *
 * For a tree τ of order n the all-solid partition contributes a(•)b(τ) and
 * every other partition involves only pieces of order < n, so each step is
 * b(τ) = (1/γ(τ) − rest)/a(•).
 */
inline CoeffMap solve_modified_coeffs(const CoeffMap& a, int max_order) {
  if (a.at(Tree::empty()) != 1) throw std::invalid_argument("solve_modified_coeffs: a(∅) must be 1");
  const Rational a_leaf = a.at(Tree::leaf());
  if (a_leaf == 0) throw std::domain_error("solve_modified_coeffs: a(•) = 0");
  if (a.max_order() < max_order)
    throw std::out_of_range("solve_modified_coeffs: a populated only to order " +
                            std::to_string(a.max_order()));

  std::unordered_map<Tree, Rational> solved;
  const auto groups = enumerate_trees(max_order);
  for (int n = 1; n <= max_order; ++n) {
    auto trial = solved;
    for (const auto& t : groups[n - 1]) trial.emplace(t, 0);
    const CoeffMap partial(0, std::move(trial), n);
    for (const auto& t : groups[n - 1]) {
      const Rational rest = substitute_bruteforce(partial, a, t);
      solved.emplace(t, (1 / density(t) - rest) / a_leaf);
    }
  }
  return CoeffMap(0, std::move(solved), max_order);
}

/// Coefficients c(τ) of the sixth-order scheme (weights of A(τ) against
/// h^|τ|), populated to order 5; c(∅) = 1.
inline CoeffMap avf6_method_coeffs() {
  const std::pair<const char*, Rational> nonzero[] = {
      {"o", 1},
      {"[[o]]", make_rational(-1, 12)},
      {"[[o],o,o]", make_rational(-1, 480)},
      {"[[o],[o]]", make_rational(1, 240)},
      {"[[o,o,o]]", make_rational(-1, 480)},
      {"[[[o],o]]", make_rational(1, 240)},
      {"[[[o]],o]", make_rational(-1, 720)},
      {"[[[o,o]]]", make_rational(1, 720)},
      {"[[[[o]]]]", make_rational(1, 120)},
      {"[[o,o],o]", make_rational(-1, 720)},
  };
  std::unordered_map<Tree, Rational> entries;
  for (const auto& t : trees_up_to(5)) entries.emplace(t, 0);
  for (const auto& [text, value] : nonzero) entries.at(Tree::parse(text)) = value;
  return CoeffMap(1, std::move(entries), 5);
}

}  // namespace avf
