#pragma once

// Built-in test systems. Hamiltonian ones use z = (p, q) and
// ż = S∇H(z) with S = J⁻¹ = [[0, −1], [1, 0]].

#include "avf/vectorfield.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace avf {

struct Problem {
  std::string name;
  int dimension = 0;
  std::shared_ptr<const FieldOracle> field;
  std::optional<HamiltonianStructure> hamiltonian;
  Vector initial_state;
  std::function<Vector(double)> exact_solution;  // empty when no closed form is known

  const FieldOracle& oracle() const { return *field; }
  bool has_exact_solution() const { return static_cast<bool>(exact_solution); }
  bool is_hamiltonian() const { return hamiltonian.has_value(); }
};

/// Averaged field for a problem: S·(closed-form averaged gradient) when one is
/// supplied, quadrature otherwise.
inline Vector averaged_field(const Problem& problem, const Vector& z0, const Vector& z1,
                             const QuadratureRule& rule) {
  if (problem.hamiltonian && problem.hamiltonian->averaged_gradient)
    return averaged_field(*problem.hamiltonian, z0, z1);
  return averaged_field(problem.oracle(), z0, z1, rule);
}

inline Matrix canonical_structure() {
  Matrix S(2, 2);
  S << 0, -1, 1, 0;
  return S;
}

namespace detail {

// Analytic oracles support every derivative order; polynomial fields vanish
// past their degree.
inline constexpr int kUnboundedDerivative = 64;

inline double product_of_component(std::span<const Vector> dirs, int i) {
  double p = 1;
  for (const auto& v : dirs) p *= v[i];
  return p;
}

/// ż = −10(z − 1)².
class RiccatiField final : public FieldOracle {
 public:
  int dimension() const override { return 1; }
  int max_derivative() const override { return kUnboundedDerivative; }
  Vector derivative(const Vector& z, std::span<const Vector> dirs) const override {
    const double u = z[0] - 1;
    double d = 0;
    switch (dirs.size()) {
      case 0: d = -10 * u * u; break;
      case 1: d = -20 * u * dirs[0][0]; break;
      case 2: d = -20 * dirs[0][0] * dirs[1][0]; break;
      default: break;
    }
    return Vector::Constant(1, d);
  }
};

/// ż = S z.
class LinearField final : public FieldOracle {
 public:
  int dimension() const override { return 2; }
  int max_derivative() const override { return kUnboundedDerivative; }
  Vector derivative(const Vector& z, std::span<const Vector> dirs) const override {
    const Matrix S = canonical_structure();
    if (dirs.empty()) return S * z;
    if (dirs.size() == 1) return S * dirs[0];
    return Vector::Zero(2);
  }
};

/// ż = S (z·z) z, from H = ¼|z|⁴.
class QuarticField final : public FieldOracle {
 public:
  int dimension() const override { return 2; }
  int max_derivative() const override { return kUnboundedDerivative; }
  Vector derivative(const Vector& z, std::span<const Vector> d) const override {
    Vector g;
    switch (d.size()) {
      case 0: g = z.dot(z) * z; break;
      case 1: g = 2 * z.dot(d[0]) * z + z.dot(z) * d[0]; break;
      case 2: g = 2 * (d[0].dot(d[1]) * z + z.dot(d[0]) * d[1] + z.dot(d[1]) * d[0]); break;
      case 3:
        g = 2 * (d[1].dot(d[2]) * d[0] + d[0].dot(d[1]) * d[2] + d[0].dot(d[2]) * d[1]);
        break;
      default: g = Vector::Zero(2); break;
    }
    return canonical_structure() * g;
  }
};

/// H = p² − q² + q⁴, so f = (2q − 4q³, 2p).
class HuygensField final : public FieldOracle {
 public:
  int dimension() const override { return 2; }
  int max_derivative() const override { return kUnboundedDerivative; }
  Vector derivative(const Vector& z, std::span<const Vector> dirs) const override {
    const double q = z[1];
    if (dirs.empty()) return Vector{{2 * q - 4 * q * q * q, 2 * z[0]}};
    double g = 0;  // k-th derivative of 2q − 4q³
    switch (dirs.size()) {
      case 1: g = 2 - 12 * q * q; break;
      case 2: g = -24 * q; break;
      case 3: g = -24; break;
      default: break;
    }
    Vector out(2);
    out[0] = g * product_of_component(dirs, 1);
    out[1] = dirs.size() == 1 ? 2 * dirs[0][0] : 0.0;
    return out;
  }
};

/// H = ½p² − cos q, so f = (−sin q, p).
class PendulumField final : public FieldOracle {
 public:
  int dimension() const override { return 2; }
  int max_derivative() const override { return kUnboundedDerivative; }
  Vector derivative(const Vector& z, std::span<const Vector> dirs) const override {
    const double q = z[1];
    if (dirs.empty()) return Vector{{-std::sin(q), z[0]}};
    double s = 0;  // k-th derivative of sin at q
    switch (dirs.size() % 4) {
      case 0: s = std::sin(q); break;
      case 1: s = std::cos(q); break;
      case 2: s = -std::sin(q); break;
      case 3: s = -std::cos(q); break;
    }
    Vector out(2);
    out[0] = -s * product_of_component(dirs, 1);
    out[1] = dirs.size() == 1 ? dirs[0][0] : 0.0;
    return out;
  }
};

/// sin(x)/x, with its Taylor polynomial near zero.
inline double sinc(double x) {
  if (std::abs(x) < 1e-6) {
    const double x2 = x * x;
    return 1 - x2 / 6 + x2 * x2 / 120 - x2 * x2 * x2 / 5040;
  }
  return std::sin(x) / x;
}

inline Vector circle_orbit(double t) { return Vector{{std::cos(t), std::sin(t)}}; }

}  // namespace detail

/// ż = −10(z − 1)², z(0) = 2, exact solution 1/(1 + 10t) + 1.
inline Problem riccati() {
  Problem p;
  p.name = "riccati";
  p.dimension = 1;
  p.field = std::make_shared<detail::RiccatiField>();
  p.initial_state = Vector::Constant(1, 2.0);
  p.exact_solution = [](double t) { return Vector::Constant(1, 1 / (1 + 10 * t) + 1); };
  return p;
}

/// H = ½(p² + q²), z₀ = (1, 0); exact solution (cos t, sin t).
inline Problem linear_oscillator() {
  Problem p;
  p.name = "linear";
  p.dimension = 2;
  p.field = std::make_shared<detail::LinearField>();
  HamiltonianStructure hs;
  hs.structure = canonical_structure();
  hs.energy = [](const Vector& z) { return 0.5 * z.squaredNorm(); };
  hs.gradient = [](const Vector& z) { return z; };
  hs.averaged_gradient = [](const Vector& z0, const Vector& z1) -> Vector { return 0.5 * (z0 + z1); };
  p.hamiltonian = std::move(hs);
  p.initial_state = Vector{{1.0, 0.0}};
  p.exact_solution = detail::circle_orbit;
  return p;
}

/// H = ¼(p² + q²)², z₀ = (1, 0). The exact solution (cos t, sin t) holds only
/// on the unit circle, i.e. for this initial state.
inline Problem quartic_oscillator() {
  Problem p;
  p.name = "quartic";
  p.dimension = 2;
  p.field = std::make_shared<detail::QuarticField>();
  HamiltonianStructure hs;
  hs.structure = canonical_structure();
  hs.energy = [](const Vector& z) {
    const double r2 = z.squaredNorm();
    return 0.25 * r2 * r2;
  };
  hs.gradient = [](const Vector& z) -> Vector { return z.squaredNorm() * z; };
  hs.averaged_gradient = [](const Vector& z0, const Vector& z1) -> Vector {
    // |z0 + ξΔ|² = a + 2bξ + cξ², integrated against (z0 + ξΔ).
    const Vector d = z1 - z0;
    const double a = z0.squaredNorm(), b = z0.dot(d), c = d.squaredNorm();
    return (a + b + c / 3) * z0 + (a / 2 + 2 * b / 3 + c / 4) * d;
  };
  p.hamiltonian = std::move(hs);
  p.initial_state = Vector{{1.0, 0.0}};
  p.exact_solution = detail::circle_orbit;
  return p;
}

/// H = p² − q² + q⁴, z₀ = (0, 1.1); no closed-form solution.
inline Problem huygens() {
  Problem p;
  p.name = "huygens";
  p.dimension = 2;
  p.field = std::make_shared<detail::HuygensField>();
  HamiltonianStructure hs;
  hs.structure = canonical_structure();
  hs.energy = [](const Vector& z) {
    const double q2 = z[1] * z[1];
    return z[0] * z[0] - q2 + q2 * q2;
  };
  hs.gradient = [](const Vector& z) -> Vector {
    return Vector{{2 * z[0], -2 * z[1] + 4 * z[1] * z[1] * z[1]}};
  };
  hs.averaged_gradient = [](const Vector& z0, const Vector& z1) -> Vector {
    const double qs = z0[1] + z1[1];
    return Vector{{z0[0] + z1[0], -qs + qs * (z0[1] * z0[1] + z1[1] * z1[1])}};
  };
  p.hamiltonian = std::move(hs);
  p.initial_state = Vector{{0.0, 1.1}};
  return p;
}

/// H = ½p² − cos q, z₀ = (0.7, 0); no closed-form solution.
inline Problem pendulum() {
  Problem p;
  p.name = "pendulum";
  p.dimension = 2;
  p.field = std::make_shared<detail::PendulumField>();
  HamiltonianStructure hs;
  hs.structure = canonical_structure();
  hs.energy = [](const Vector& z) { return 0.5 * z[0] * z[0] - std::cos(z[1]); };
  hs.gradient = [](const Vector& z) -> Vector { return Vector{{z[0], std::sin(z[1])}}; };
  hs.averaged_gradient = [](const Vector& z0, const Vector& z1) -> Vector {
    // ∫₀¹ sin(q0 + ξΔ) dξ = (cos q0 − cos q1)/Δ = sin(q̄)·sinc(Δ/2).
    const double dq = z1[1] - z0[1];
    const double qbar = 0.5 * (z0[1] + z1[1]);
    return Vector{{0.5 * (z0[0] + z1[0]), std::sin(qbar) * detail::sinc(0.5 * dq)}};
  };
  p.hamiltonian = std::move(hs);
  p.initial_state = Vector{{0.7, 0.0}};
  return p;
}

inline std::vector<std::string> problem_names() {
  return {"riccati", "linear", "quartic", "huygens", "pendulum"};
}

inline Problem make_problem(std::string_view name) {
  if (name == "riccati") return riccati();
  if (name == "linear") return linear_oscillator();
  if (name == "quartic") return quartic_oscillator();
  if (name == "huygens") return huygens();
  if (name == "pendulum") return pendulum();
  throw std::invalid_argument("unknown problem '" + std::string(name) +
                              "' (expected riccati, linear, quartic, huygens or pendulum)");
}

}  // namespace avf
