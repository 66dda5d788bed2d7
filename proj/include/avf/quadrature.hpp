#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace avf {

/// Quadrature on [0, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// s-point Gauss–Legendre rule mapped to [0, 1]; exact for polynomials of
/// degree ≤ 2s − 1.
inline QuadratureRule gauss_legendre(int s) {
  if (s < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  QuadratureRule rule;
  rule.nodes.resize(s);
  rule.weights.resize(s);
  for (int i = 0; i < s; ++i) {
    // Newton on P_s starting from the Chebyshev-like guess; roots on [-1, 1].
    long double x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (s + 0.5L));
    long double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= s; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = s * (x * p1 - p0) / (x * x - 1);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-19L) break;
    }
    // Recompute the derivative at the converged root.
    long double p0 = 1, p1 = x;
    for (int k = 2; k <= s; ++k) {
      const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = s * (x * p1 - p0) / (x * x - 1);
    const long double w = 2 / ((1 - x * x) * dp * dp);
    // Ascending nodes on [0, 1].
    rule.nodes[s - 1 - i] = static_cast<double>((1 + x) / 2);
    rule.weights[s - 1 - i] = static_cast<double>(w / 2);
  }
  return rule;
}

}  // namespace avf
