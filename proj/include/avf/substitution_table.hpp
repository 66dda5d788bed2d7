#pragma once

// Closed-form substitution law b⋆a for every tree of order ≤ 5.
//
// Each term is kept as (multiplicity, skeleton, pieces) so it reads exactly
// like one printed monomial: m·a(skeleton)·Π b(piece). Orders 1-4 are the
// classical formulas; order 5 is the newer set.

#include "avf/bseries.hpp"
#include "avf/rational.hpp"
#include "avf/trees.hpp"

#include <map>
#include <stdexcept>
#include <vector>

namespace avf {

struct SubstitutionTerm {
  int multiplicity;
  Tree skeleton;
  std::vector<Tree> pieces;  // every piece, including the one holding the root
};

using SubstitutionTable = std::map<Tree, std::vector<SubstitutionTerm>>;

namespace detail {

struct TermSpec {
  int multiplicity;
  const char* skeleton;
  std::vector<const char*> pieces;
};

struct FormulaSpec {
  const char* tree;
  std::vector<TermSpec> terms;
};

inline SubstitutionTable build_table(const std::vector<FormulaSpec>& specs) {
  SubstitutionTable table;
  for (const auto& f : specs) {
    std::vector<SubstitutionTerm> terms;
    for (const auto& t : f.terms) {
      SubstitutionTerm term{t.multiplicity, Tree::parse(t.skeleton), {}};
      for (const char* p : t.pieces) term.pieces.push_back(Tree::parse(p));
      terms.push_back(std::move(term));
    }
    table.emplace(Tree::parse(f.tree), std::move(terms));
  }
  return table;
}

}  // namespace detail

/// The published closed-form table for orders 1..5.
inline const SubstitutionTable& published_substitution_table() {
  static const SubstitutionTable table = detail::build_table({
      {"o",
       {{1, "o", {"o"}}}},
      {"[o]",
       {{1, "o", {"[o]"}},
        {1, "[o]", {"o", "o"}}}},
      {"[o,o]",
       {{1, "o", {"[o,o]"}},
        {2, "[o]", {"[o]", "o"}},
        {1, "[o,o]", {"o", "o", "o"}}}},
      {"[[o]]",
       {{1, "o", {"[[o]]"}},
        {2, "[o]", {"[o]", "o"}},
        {1, "[[o]]", {"o", "o", "o"}}}},
      {"[o,o,o]",
       {{1, "o", {"[o,o,o]"}},
        {3, "[o]", {"[o,o]", "o"}},
        {3, "[o,o]", {"[o]", "o", "o"}},
        {1, "[o,o,o]", {"o", "o", "o", "o"}}}},
      {"[[o],o]",
       {{1, "o", {"[[o],o]"}},
        {1, "[o]", {"[o]", "[o]"}},
        {1, "[o]", {"[[o]]", "o"}},
        {1, "[o]", {"[o,o]", "o"}},
        {1, "[[o]]", {"[o]", "o", "o"}},
        {2, "[o,o]", {"[o]", "o", "o"}},
        {1, "[[o],o]", {"o", "o", "o", "o"}}}},
      {"[[o,o]]",
       {{1, "o", {"[[o,o]]"}},
        {2, "[o]", {"[[o]]", "o"}},
        {1, "[o]", {"[o,o]", "o"}},
        {2, "[[o]]", {"[o]", "o", "o"}},
        {1, "[o,o]", {"[o]", "o", "o"}},
        {1, "[[o,o]]", {"o", "o", "o", "o"}}}},
      {"[[[o]]]",
       {{1, "o", {"[[[o]]]"}},
        {1, "[o]", {"[o]", "[o]"}},
        {2, "[o]", {"[[o]]", "o"}},
        {3, "[[o]]", {"[o]", "o", "o"}},
        {1, "[[[o]]]", {"o", "o", "o", "o"}}}},
      {"[o,o,o,o]",
       {{1, "o", {"[o,o,o,o]"}},
        {4, "[o]", {"[o,o,o]", "o"}},
        {6, "[o,o]", {"[o,o]", "o", "o"}},
        {4, "[o,o,o]", {"[o]", "o", "o", "o"}},
        {1, "[o,o,o,o]", {"o", "o", "o", "o", "o"}}}},
      {"[[o],o,o]",
       {{1, "o", {"[[o],o,o]"}},
        {1, "[o]", {"[o,o]", "[o]"}},
        {2, "[o]", {"[[o],o]", "o"}},
        {1, "[o]", {"[o,o,o]", "o"}},
        {1, "[[o]]", {"[o,o]", "o", "o"}},
        {1, "[o,o]", {"[[o]]", "o", "o"}},
        {2, "[o,o]", {"[o,o]", "o", "o"}},
        {2, "[o,o]", {"[o]", "[o]", "o"}},
        {2, "[[o],o]", {"[o]", "o", "o", "o"}},
        {2, "[o,o,o]", {"[o]", "o", "o", "o"}},
        {1, "[[o],o,o]", {"o", "o", "o", "o", "o"}}}},
      {"[[o],[o]]",
       {{1, "o", {"[[o],[o]]"}},
        {2, "[o]", {"[[o]]", "[o]"}},
        {2, "[o]", {"[[o],o]", "o"}},
        {2, "[[o]]", {"[[o]]", "o", "o"}},
        {1, "[o,o]", {"[o,o]", "o", "o"}},
        {3, "[o,o]", {"[o]", "[o]", "o"}},
        {4, "[[o],o]", {"[o]", "o", "o", "o"}},
        {1, "[[o],[o]]", {"o", "o", "o", "o", "o"}}}},
      {"[[o,o,o]]",
       {{1, "o", {"[[o,o,o]]"}},
        {3, "[o]", {"[[o,o]]", "o"}},
        {1, "[o]", {"[o,o,o]", "o"}},
        {3, "[[o]]", {"[o,o]", "o", "o"}},
        {3, "[o,o]", {"[[o]]", "o", "o"}},
        {3, "[[o,o]]", {"[o]", "o", "o", "o"}},
        {1, "[o,o,o]", {"[o]", "o", "o", "o"}},
        {1, "[[o,o,o]]", {"o", "o", "o", "o", "o"}}}},
      {"[[[o],o]]",
       {{1, "o", {"[[[o],o]]"}},
        {1, "[o]", {"[[o]]", "[o]"}},
        {1, "[o]", {"[[[o]]]", "o"}},
        {1, "[o]", {"[[o,o]]", "o"}},
        {1, "[o]", {"[[o],o]", "o"}},
        {2, "[[o]]", {"[[o]]", "o", "o"}},
        {1, "[[o]]", {"[o,o]", "o", "o"}},
        {1, "[[o]]", {"[o]", "[o]", "o"}},
        {1, "[o,o]", {"[[o]]", "o", "o"}},
        {1, "[o,o]", {"[o]", "[o]", "o"}},
        {1, "[[[o]]]", {"[o]", "o", "o", "o"}},
        {2, "[[o,o]]", {"[o]", "o", "o", "o"}},
        {1, "[[o],o]", {"[o]", "o", "o", "o"}},
        {1, "[[[o],o]]", {"o", "o", "o", "o", "o"}}}},
      {"[[[o]],o]",
       {{1, "o", {"[[[o]],o]"}},
        {1, "[o]", {"[[o]]", "[o]"}},
        {1, "[o]", {"[o,o]", "[o]"}},
        {1, "[o]", {"[[[o]]]", "o"}},
        {1, "[o]", {"[[o],o]", "o"}},
        {1, "[[o]]", {"[o,o]", "o", "o"}},
        {2, "[[o]]", {"[o]", "[o]", "o"}},
        {2, "[o,o]", {"[[o]]", "o", "o"}},
        {1, "[o,o]", {"[o]", "[o]", "o"}},
        {1, "[[[o]]]", {"[o]", "o", "o", "o"}},
        {3, "[[o],o]", {"[o]", "o", "o", "o"}},
        {1, "[[[o]],o]", {"o", "o", "o", "o", "o"}}}},
      {"[[[o,o]]]",
       {{1, "o", {"[[[o,o]]]"}},
        {1, "[o]", {"[o,o]", "[o]"}},
        {2, "[o]", {"[[[o]]]", "o"}},
        {1, "[o]", {"[[o,o]]", "o"}},
        {2, "[[o]]", {"[[o]]", "o", "o"}},
        {1, "[[o]]", {"[o,o]", "o", "o"}},
        {2, "[[o]]", {"[o]", "[o]", "o"}},
        {1, "[o,o]", {"[[o]]", "o", "o"}},
        {2, "[[[o]]]", {"[o]", "o", "o", "o"}},
        {2, "[[o,o]]", {"[o]", "o", "o", "o"}},
        {1, "[[[o,o]]]", {"o", "o", "o", "o", "o"}}}},
      {"[[[[o]]]]",
       {{1, "o", {"[[[[o]]]]"}},
        {2, "[o]", {"[[o]]", "[o]"}},
        {2, "[o]", {"[[[o]]]", "o"}},
        {3, "[[o]]", {"[[o]]", "o", "o"}},
        {3, "[[o]]", {"[o]", "[o]", "o"}},
        {4, "[[[o]]]", {"[o]", "o", "o", "o"}},
        {1, "[[[[o]]]]", {"o", "o", "o", "o", "o"}}}},
      {"[[o,o],o]",
       {{1, "o", {"[[o,o],o]"}},
        {1, "[o]", {"[o,o]", "[o]"}},
        {1, "[o]", {"[[o,o]]", "o"}},
        {2, "[o]", {"[[o],o]", "o"}},
        {2, "[[o]]", {"[o]", "[o]", "o"}},
        {2, "[o,o]", {"[[o]]", "o", "o"}},
        {2, "[o,o]", {"[o,o]", "o", "o"}},
        {1, "[[o,o]]", {"[o]", "o", "o", "o"}},
        {2, "[[o],o]", {"[o]", "o", "o", "o"}},
        {1, "[o,o,o]", {"[o]", "o", "o", "o"}},
        {1, "[[o,o],o]", {"o", "o", "o", "o", "o"}}}},
  });
  return table;
}

/// Evaluates (b⋆a)(t) from a closed-form table. ∅ maps to a(∅).
/// Throws std::domain_error for trees the table does not cover.
inline Rational substitute_table(const SubstitutionTable& table, const CoeffMap& b,
                                 const CoeffMap& a, const Tree& t) {
  detail::require_b_empty_zero(b);
  if (t.is_empty()) return a.at(t);
  auto it = table.find(t);
  if (it == table.end())
    throw std::domain_error("substitute_table: no closed form for " + to_string(t));
  Rational sum = 0;
  for (const auto& term : it->second) {
    Rational m = term.multiplicity * a.at(term.skeleton);
    for (const auto& p : term.pieces) m *= b.at(p);
    sum += m;
  }
  return sum;
}

inline Rational substitute_table(const CoeffMap& b, const CoeffMap& a, const Tree& t) {
  if (!t.is_empty() && t.order() > 5)
    throw std::domain_error("substitute_table: closed forms exist only up to order 5");
  return substitute_table(published_substitution_table(), b, a, t);
}

}  // namespace avf
