#pragma once

// Vector fields with multilinear derivative contractions, elementary
// differentials, truncated B-series, and the A(τ) coefficient matrices that
// turn the averaged field into the higher-order update.

#include "avf/bseries.hpp"
#include "avf/quadrature.hpp"
#include "avf/rational.hpp"
#include "avf/trees.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace avf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Something that evaluates d^k f(z)(v₁,…,v_k), the symmetric k-linear
/// derivative of a field f, with k = dirs.size() (k = 0 is f itself).
template <class O>
concept DerivativeOracle = requires(const O& o, const Vector& z, std::span<const Vector> dirs) {
  { o.dimension() } -> std::convertible_to<int>;
  { o.max_derivative() } -> std::convertible_to<int>;
  { o.derivative(z, dirs) } -> std::convertible_to<Vector>;
};

/// Type-erased oracle used by the problem registry.
class FieldOracle {
 public:
  virtual ~FieldOracle() = default;
  virtual int dimension() const = 0;
  virtual int max_derivative() const = 0;
  virtual Vector derivative(const Vector& z, std::span<const Vector> dirs) const = 0;
};

template <DerivativeOracle O>
Vector field_value(const O& o, const Vector& z) {
  return o.derivative(z, {});
}

template <DerivativeOracle O>
Vector contract(const O& o, const Vector& z, std::initializer_list<Vector> dirs) {
  return o.derivative(z, std::span<const Vector>(dirs.begin(), dirs.size()));
}

/// f'(z) as a dense matrix.
template <DerivativeOracle O>
Matrix jacobian(const O& o, const Vector& z) {
  const int n = o.dimension();
  Matrix J(n, n);
  for (int j = 0; j < n; ++j) J.col(j) = contract(o, z, {Vector::Unit(n, j)});
  return J;
}

/// F_f(•)(z) = f(z), F_f([τ₁..τₘ])(z) = f^(m)(z)(F_f(τ₁)(z), …, F_f(τₘ)(z)).
template <DerivativeOracle O>
Vector elementary_differential(const O& o, const Tree& t, const Vector& z) {
  if (t.is_empty()) throw std::domain_error("elementary_differential: empty tree");
  const auto kids = t.children();
  if (static_cast<int>(kids.size()) > o.max_derivative())
    throw std::domain_error("elementary_differential: " + to_string(t) + " needs derivative order " +
                            std::to_string(kids.size()) + ", oracle provides " +
                            std::to_string(o.max_derivative()));
  std::vector<Vector> args;
  args.reserve(kids.size());
  for (const auto& c : kids) args.push_back(elementary_differential(o, c, z));
  return o.derivative(z, args);
}

/// B_f(a, z₀) = a(∅)z₀ + Σ_{|τ| ≤ max_order} h^|τ|/σ(τ) · a(τ) · F_f(τ)(z₀).
template <DerivativeOracle O>
Vector bseries_eval(const O& o, const CoeffMap& coeffs, const Vector& z0, double h, int max_order) {
  Vector sum = to_double(coeffs.at(Tree::empty())) * z0;
  if (h == 0.0 || max_order < 1) return sum;
  for (const auto& t : trees_up_to(max_order)) {
    const Rational& c = coeffs.at(t);
    if (c == 0) continue;
    const double w = std::pow(h, t.order()) * to_double(Rational(c / symmetry(t)));
    sum += w * elementary_differential(o, t, z0);
  }
  return sum;
}

/// Σᵢ wᵢ f(ξᵢ z₁ + (1 − ξᵢ) z₀).
template <DerivativeOracle O>
Vector averaged_field(const O& o, const Vector& z0, const Vector& z1, const QuadratureRule& rule) {
  Vector sum = Vector::Zero(o.dimension());
  const Vector dz = z1 - z0;
  for (int i = 0; i < rule.size(); ++i) sum += rule.weights[i] * field_value(o, z0 + rule.nodes[i] * dz);
  return sum;
}

/**
 * Hamiltonian structure of a field f = S∇H with constant skew S.
 * `averaged_gradient`, when set, returns ∫₀¹ ∇H(ξz₁ + (1 − ξ)z₀) dξ in
 * closed form.
 */
struct HamiltonianStructure {
  Matrix structure;
  std::function<double(const Vector&)> energy;
  std::function<Vector(const Vector&)> gradient;
  std::function<Vector(const Vector&, const Vector&)> averaged_gradient;

  bool is_skew() const { return (structure + structure.transpose()).cwiseAbs().maxCoeff() == 0.0; }
  Vector field(const Vector& z) const { return structure * gradient(z); }
};

/// S · ∫₀¹ ∇H along the chord; requires a closed-form averaged gradient.
inline Vector averaged_field(const HamiltonianStructure& hs, const Vector& z0, const Vector& z1) {
  if (!hs.averaged_gradient) throw std::logic_error("averaged_field: no closed-form averaged gradient");
  return hs.structure * hs.averaged_gradient(z0, z1);
}

// ---------------------------------------------------------------------------
// A(τ) coefficient matrices: A(τ)F is F_f(τ)(z) with one leaf's f replaced by
// F, following the contraction patterns of the sixth- and fifth-order schemes.

namespace detail {

template <DerivativeOracle O>
class PatternEvaluator {
 public:
  PatternEvaluator(const O& o, const Vector& z)
      : o_(o), z_(z), f_(field_value(o, z)), f1f_(contract(o, z, {f_})) {}

  /// Returns nullopt if no pattern exists for `t`.
  std::optional<Vector> apply(const Tree& t, const Vector& F) const {
    const std::string& k = t.key();
    if (k == "o") return F;
    if (k == "[[o]]") return d1(d1(F));
    if (k == "[[o],o]") return d2(d1(F), f_);  // the f'' slot takes f'F, as in the expansion of f'(ẑ)f'(ẑ)F
    if (k == "[[o,o]]") return d1(d2(F, f_));
    if (k == "[[[[o]]]]") return d1(d1(d1(d1(F))));
    if (k == "[[o,o],o]") return d2(d2(F, f_), f_);
    if (k == "[[[o,o]]]") return d1(d1(d2(F, f_)));
    if (k == "[[[o]],o]") return d2(d1(d1(F)), f_);
    if (k == "[[o,o,o]]") return d1(d3(F, f_, f_));
    if (k == "[[o],o,o]") return d3(d1(F), f_, f_);
    if (k == "[[o],[o]]") return d2(d1(F), f1f_);
    if (k == "[[[o],o]]") return d1(d2(F, f1f_));
    return std::nullopt;
  }

 private:
  Vector d1(const Vector& a) const { return contract(o_, z_, {a}); }
  Vector d2(const Vector& a, const Vector& b) const { return contract(o_, z_, {a, b}); }
  Vector d3(const Vector& a, const Vector& b, const Vector& c) const {
    return contract(o_, z_, {a, b, c});
  }

  const O& o_;
  const Vector& z_;
  Vector f_;
  Vector f1f_;
};

}  // namespace detail

/// A(τ) applied to a vector: the contraction pattern with F := v.
template <DerivativeOracle O>
Vector apply_coefficient_pattern(const O& o, const Tree& t, const Vector& z, const Vector& v) {
  auto r = detail::PatternEvaluator<O>(o, z).apply(t, v);
  if (!r) throw std::domain_error("coefficient_matrix: unsupported tree " + to_string(t));
  return *std::move(r);
}

/// Dense A(τ)(z), assembled column by column from the basis vectors.
template <DerivativeOracle O>
Matrix coefficient_matrix(const O& o, const Tree& t, const Vector& z) {
  const int n = o.dimension();
  const detail::PatternEvaluator<O> eval(o, z);
  Matrix A(n, n);
  for (int j = 0; j < n; ++j) {
    auto col = eval.apply(t, Vector::Unit(n, j));
    if (!col) throw std::domain_error("coefficient_matrix: unsupported tree " + to_string(t));
    A.col(j) = *col;
  }
  return A;
}

/// One term w·h^p·A(τ) of an update operator.
struct OperatorTerm {
  Tree tree;
  double weight;
  int power;
};

/// I − (h²/12)A([[•]]) + (h⁴/720)[6A₅₈ − A₅₉ + A₅₇ − A₅₆ − 3/2 A₅₄ − 3/2 A₅₂
/// + 3A₅₃ + 3A₅₅]; weights are the nonzero entries c(τ) with power |τ| − 1.
inline const std::vector<OperatorTerm>& avf6_operator_terms() {
  static const std::vector<OperatorTerm> terms = [] {
    std::vector<OperatorTerm> out;
    const CoeffMap c = avf6_method_coeffs();
    for (const auto& t : trees_up_to(5)) {
      if (c.at(t) != 0) out.push_back({t, to_double(c.at(t)), t.order() - 1});
    }
    return out;
  }();
  return terms;
}

namespace detail {

inline std::vector<OperatorTerm> make_terms(std::span<const std::pair<const char*, double>> spec) {
  std::vector<OperatorTerm> out;
  for (const auto& [text, w] : spec) {
    Tree t = Tree::parse(text);
    const int p = t.order() - 1;
    out.push_back({std::move(t), w, p});
  }
  return out;
}

}  // namespace detail

/**
 * Fifth-order variant with every A(τ) frozen at z₀, weights as published:
 * I − (h²/12)A([[•]]) − (h³/24)[A([[•],•]) + A([[•,•]])]
 *   + (h⁴/720)[6A₅₈ − 16A₅₉ + A₅₇ − 16A₅₆ − 9A₅₄ − 9A₅₂ + 3A₅₃ − 12A₅₅].
 * Fifth order in one dimension; in two dimensions it drops to fourth order
 * and does not conserve energy.
 */
inline const std::vector<OperatorTerm>& avf5_operator_terms() {
  static const std::vector<OperatorTerm> terms = [] {
    const std::pair<const char*, double> spec[] = {
        {"o", 1.0},
        {"[[o]]", -1.0 / 12},
        {"[[o],o]", -1.0 / 24},
        {"[[o,o]]", -1.0 / 24},
        {"[[[[o]]]]", 6.0 / 720},
        {"[[o,o],o]", -16.0 / 720},
        {"[[[o,o]]]", 1.0 / 720},
        {"[[[o]],o]", -16.0 / 720},
        {"[[o,o,o]]", -9.0 / 720},
        {"[[o],o,o]", -9.0 / 720},
        {"[[o],[o]]", 3.0 / 720},
        {"[[[o],o]]", -12.0 / 720},
    };
    return detail::make_terms(spec);
  }();
  return terms;
}

/// The same operator re-derived by expanding A([[•]])(ẑ) of the sixth-order
/// operator about z₀: −A₅₆ − 12A₅₃ in place of −16A₅₆ + 3A₅₃. The two agree
/// in one dimension. This set is fifth order in any dimension, and since
/// every term is a derivative of the skew map ẑ ↦ M(ẑ)S it keeps S̃ skew and
/// conserves energy.
inline const std::vector<OperatorTerm>& avf5_rederived_operator_terms() {
  static const std::vector<OperatorTerm> terms = [] {
    const std::pair<const char*, double> spec[] = {
        {"o", 1.0},
        {"[[o]]", -1.0 / 12},
        {"[[o],o]", -1.0 / 24},
        {"[[o,o]]", -1.0 / 24},
        {"[[[[o]]]]", 6.0 / 720},
        {"[[o,o],o]", -16.0 / 720},
        {"[[[o,o]]]", 1.0 / 720},
        {"[[[o]],o]", -1.0 / 720},
        {"[[o,o,o]]", -9.0 / 720},
        {"[[o],o,o]", -9.0 / 720},
        {"[[o],[o]]", -12.0 / 720},
        {"[[[o],o]]", -12.0 / 720},
    };
    return detail::make_terms(spec);
  }();
  return terms;
}

/// Σ w·h^p·A(τ)(z) as a dense matrix.
template <DerivativeOracle O>
Matrix assemble_operator(const O& o, std::span<const OperatorTerm> terms, const Vector& z, double h) {
  const int n = o.dimension();
  const detail::PatternEvaluator<O> eval(o, z);
  Matrix M = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const Vector e = Vector::Unit(n, j);
    for (const auto& term : terms) {
      const double scale = term.weight * std::pow(h, term.power);
      if (scale == 0.0) continue;
      M.col(j) += scale * *eval.apply(term.tree, e);
    }
  }
  return M;
}

/// Σ w·h^p·A(τ)v without forming the matrix.
template <DerivativeOracle O>
Vector apply_operator(const detail::PatternEvaluator<O>& eval, std::span<const OperatorTerm> terms,
                      double h, const Vector& v) {
  Vector out = Vector::Zero(v.size());
  for (const auto& term : terms) {
    const double scale = term.weight * std::pow(h, term.power);
    if (scale == 0.0) continue;
    out += scale * *eval.apply(term.tree, v);
  }
  return out;
}

template <DerivativeOracle O>
Vector apply_operator(const O& o, std::span<const OperatorTerm> terms, const Vector& z, double h,
                      const Vector& v) {
  return apply_operator(detail::PatternEvaluator<O>(o, z), terms, h, v);
}

/// Dimensionless operator of the sixth-order update z₁ = z₀ + h·M·F.
template <DerivativeOracle O>
Matrix avf6_matrix(const O& o, const Vector& z, double h) {
  return assemble_operator(o, std::span<const OperatorTerm>(avf6_operator_terms()), z, h);
}

template <DerivativeOracle O>
Matrix avf5_matrix(const O& o, const Vector& z, double h) {
  return assemble_operator(o, std::span<const OperatorTerm>(avf5_operator_terms()), z, h);
}

/// S̃ = avf6_matrix(z, h) · S; skew-symmetric for Hamiltonian fields.
template <DerivativeOracle O>
Matrix assemble_s_tilde(const O& o, const std::optional<HamiltonianStructure>& hs, const Vector& z,
                        double h) {
  if (!hs) throw std::invalid_argument("assemble_s_tilde: problem has no Hamiltonian structure");
  return avf6_matrix(o, z, h) * hs->structure;
}

/// ‖M + Mᵀ‖∞ / ‖M‖∞ (row-sum norms); 0 for an exactly skew matrix.
inline double skew_defect(const Matrix& M) {
  const double sym = (M + M.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
  const double scale = M.cwiseAbs().rowwise().sum().maxCoeff();
  return scale == 0.0 ? sym : sym / scale;
}

// ---------------------------------------------------------------------------

/**
 * Derivatives by nested central differences of a plain field routine:
 * d^k f(z)(v₁..v_k) = [d^{k−1}f(z + s v_k) − d^{k−1}f(z − s v_k)](v₁..v_{k−1}) / 2s.
 * Each level adds O(s²) truncation and amplifies rounding by 1/s, so the
 * useful step grows with k.
 */
class FiniteDifferenceOracle final : public FieldOracle {
 public:
  FiniteDifferenceOracle(std::function<Vector(const Vector&)> f, int dimension, double step)
      : f_(std::move(f)), n_(dimension), step_(step) {
    if (step_ <= 0) throw std::invalid_argument("FiniteDifferenceOracle: step must be positive");
  }

  int dimension() const override { return n_; }
  int max_derivative() const override { return 4; }

  Vector derivative(const Vector& z, std::span<const Vector> dirs) const override {
    if (dirs.empty()) return f_(z);
    if (static_cast<int>(dirs.size()) > max_derivative())
      throw std::domain_error("FiniteDifferenceOracle: derivative order above 4");
    const Vector& v = dirs.back();
    const auto rest = dirs.first(dirs.size() - 1);
    return (derivative(z + step_ * v, rest) - derivative(z - step_ * v, rest)) / (2 * step_);
  }

 private:
  std::function<Vector(const Vector&)> f_;
  int n_;
  double step_;
};

inline std::shared_ptr<const FieldOracle> finite_difference_oracle(std::function<Vector(const Vector&)> f,
                                                                   int dimension, double step) {
  return std::make_shared<FiniteDifferenceOracle>(std::move(f), dimension, step);
}

}  // namespace avf
