#pragma once

// Published σ, γ, a, b, c values for ∅ and the 17 trees of order ≤ 5, used as
// golden data by the table dump and the tests.

#include "avf/rational.hpp"
#include "avf/trees.hpp"

#include <optional>
#include <vector>

namespace avf {

struct ReferenceRow {
  Tree tree;                       // empty for the ∅ row
  std::optional<Rational> sigma;   // not tabulated for ∅
  std::optional<Rational> gamma;
  Rational a, b, c;
};

inline const std::vector<ReferenceRow>& reference_coefficients() {
  static const std::vector<ReferenceRow> rows = [] {
    struct Spec {
      const char* tree;
      int sigma, gamma;
      int a_num, a_den, b_num, b_den, c_num, c_den;
    };
    const Spec specs[] = {
        {"o", 1, 1, 1, 1, 1, 1, 1, 1},
        {"[o]", 1, 2, 1, 2, 0, 1, 0, 1},
        {"[o,o]", 2, 3, 1, 3, 0, 1, 0, 1},
        {"[[o]]", 1, 6, 1, 4, -1, 12, -1, 12},
        {"[o,o,o]", 6, 4, 1, 4, 0, 1, 0, 1},
        {"[[o],o]", 1, 8, 1, 6, 0, 1, 0, 1},
        {"[[o,o]]", 2, 12, 1, 6, 0, 1, 0, 1},
        {"[[[o]]]", 1, 24, 1, 8, 0, 1, 0, 1},
        {"[o,o,o,o]", 24, 5, 1, 5, 0, 1, 0, 1},
        {"[[o],o,o]", 2, 10, 1, 8, 1, 360, -1, 480},
        {"[[o],[o]]", 2, 20, 1, 12, 1, 120, 1, 240},
        {"[[o,o,o]]", 6, 20, 1, 8, 1, 120, -1, 480},
        {"[[[o],o]]", 1, 40, 1, 12, 1, 90, 1, 240},
        {"[[[o]],o]", 1, 30, 1, 12, 1, 180, -1, 720},
        {"[[[o,o]]]", 2, 60, 1, 12, 1, 360, 1, 720},
        {"[[[[o]]]]", 1, 120, 1, 16, 1, 120, 1, 120},
        {"[[o,o],o]", 2, 15, 1, 9, 1, 90, -1, 720},
    };
    std::vector<ReferenceRow> out;
    out.push_back({Tree::empty(), std::nullopt, std::nullopt, 1, 0, 1});
    for (const auto& s : specs) {
      out.push_back({Tree::parse(s.tree), Rational(s.sigma), Rational(s.gamma),
                     make_rational(s.a_num, s.a_den), make_rational(s.b_num, s.b_den),
                     make_rational(s.c_num, s.c_den)});
    }
    return out;
  }();
  return rows;
}

}  // namespace avf
