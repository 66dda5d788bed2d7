#pragma once

// The AVF integrator family, its fixed-point solver, the time-stepping loop,
// and the error/order/energy metrics.

#include "avf/problems.hpp"
#include "avf/quadrature.hpp"
#include "avf/vectorfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace avf {

enum class Method { avf2, avf3, avf4, avf5, avf6 };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::avf2: return "avf2";
    case Method::avf3: return "avf3";
    case Method::avf4: return "avf4";
    case Method::avf5: return "avf5";
    case Method::avf6: return "avf6";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  for (Method m : {Method::avf2, Method::avf3, Method::avf4, Method::avf5, Method::avf6})
    if (s == to_string(m)) return m;
  throw std::invalid_argument("unknown method '" + std::string(s) +
                              "' (expected avf2, avf3, avf4, avf5 or avf6)");
}

inline int nominal_order(Method m) {
  switch (m) {
    case Method::avf2: return 2;
    case Method::avf3: return 3;
    case Method::avf4: return 4;
    case Method::avf5: return 5;
    case Method::avf6: return 6;
  }
  return 0;
}

/// True for the methods that conserve H exactly (up to the solver tolerance).
/// avf5 with the published weights breaks the skew structure of S̃.
inline bool is_energy_preserving(Method m) { return m != Method::avf5; }

/// Coefficient α of the order-3/4 family.
inline constexpr double kAlpha = -1.0 / 12;

struct StepperConfig {
  double step = 0.01;
  double tolerance = 1e-14;
  int max_iterations = 100;
  int quadrature_nodes = 5;
  Method method = Method::avf6;
  std::optional<double> alpha_override;  // avf3/avf4 only; for testing
  bool avf5_rederived = false;           // avf5 with avf5_rederived_operator_terms()

  /// Checks everything except the sign of the step.
  void validate_solver() const {
    if (!(tolerance > 0)) throw std::invalid_argument("StepperConfig: tolerance must be positive");
    if (max_iterations < 1) throw std::invalid_argument("StepperConfig: max_iterations must be >= 1");
    if (quadrature_nodes < 1) throw std::invalid_argument("StepperConfig: quadrature_nodes must be >= 1");
  }

  void validate() const {
    if (!(step > 0) || !std::isfinite(step)) throw std::invalid_argument("StepperConfig: step must be positive");
    validate_solver();
  }
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(double residual, int iterations, std::int64_t step_index = -1)
      : std::runtime_error(message(residual, iterations, step_index)),
        residual_(residual),
        iterations_(iterations),
        step_index_(step_index) {}

  double residual() const { return residual_; }
  int iterations() const { return iterations_; }
  /// -1 when raised outside a time-stepping loop.
  std::int64_t step_index() const { return step_index_; }

  ConvergenceError at_step(std::int64_t index) const { return {residual_, iterations_, index}; }

 private:
  static std::string message(double residual, int iterations, std::int64_t step_index) {
    std::string s = "fixed-point iteration did not converge after " + std::to_string(iterations) +
                    " iterations (residual " + std::to_string(residual) + ")";
    if (step_index >= 0) s += " at step " + std::to_string(step_index);
    return s;
  }

  double residual_;
  int iterations_;
  std::int64_t step_index_;
};

struct SolveResult {
  Vector state;
  int iterations = 0;
  double residual = 0;
};

/**
 * Plain fixed-point iteration z ← map(z). Converged once ‖z_new − z‖∞ ≤
 * tolerance; after that, sweeps continue while the residual still shrinks.
 * Stopping right at the tolerance leaves an error of fixed sign (the
 * predictor's), which accumulates into a visible energy drift over long runs.
 */
inline SolveResult fixed_point_solve(const std::function<Vector(const Vector&)>& map, const Vector& z_init,
                                     double tolerance, int max_iterations) {
  Vector z = z_init;
  double residual = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    Vector next = map(z);
    residual = (next - z).lpNorm<Eigen::Infinity>();
    z = std::move(next);
    if (!std::isfinite(residual)) break;
    if (residual > tolerance) continue;
    while (residual > 0 && it < max_iterations) {
      Vector polished = map(z);
      const double r = (polished - z).lpNorm<Eigen::Infinity>();
      if (!(r < residual)) break;
      z = std::move(polished);
      residual = r;
      ++it;
    }
    return {std::move(z), it, residual};
  }
  throw ConvergenceError(residual, max_iterations);
}

enum class ZHat { initial_point, midpoint };

/**
 * One-step maps for a fixed problem and configuration. The step size is an
 * explicit argument so the same stepper can run backwards.
 */
class Stepper {
 public:
  Stepper(const Problem& problem, const StepperConfig& config)
      : problem_(problem), config_(config), rule_(gauss_legendre(config.quadrature_nodes)) {
    config_.validate_solver();
    if (!problem_.field) throw std::invalid_argument("Stepper: problem has no field");
  }

  const StepperConfig& config() const { return config_; }

  /// Averaged field along the chord z0 → z1.
  Vector averaged(const Vector& z0, const Vector& z1) const {
    return averaged_field(problem_, z0, z1, rule_);
  }

  /// z1 = z0 + h F(z0, z1).
  SolveResult avf2(const Vector& z0, double h, const Vector& guess) const {
    return solve([&](const Vector& z1) -> Vector { return z0 + h * averaged(z0, z1); }, guess);
  }

  /// z1 = z0 + h (I + αh² f'(ẑ)f'(ẑ)) F.
  SolveResult avf_alpha(const Vector& z0, double h, ZHat zhat, const Vector& guess) const {
    const double alpha = config_.alpha_override.value_or(kAlpha);
    const auto& o = problem_.oracle();
    return solve(
        [&](const Vector& z1) -> Vector {
          const Vector F = averaged(z0, z1);
          const Vector zh = zhat == ZHat::midpoint ? Vector(0.5 * (z0 + z1)) : z0;
          const Vector JJF = contract(o, zh, {contract(o, zh, {F})});
          return z0 + h * (F + alpha * h * h * JJF);
        },
        guess);
  }

  /// z1 = z0 + h M(ẑ, h) F with ẑ = (z0 + z1)/2, M re-evaluated each sweep.
  SolveResult avf6(const Vector& z0, double h, const Vector& guess) const {
    const auto& o = problem_.oracle();
    const std::span<const OperatorTerm> terms(avf6_operator_terms());
    return solve(
        [&](const Vector& z1) -> Vector {
          const Vector F = averaged(z0, z1);
          const Vector zh = 0.5 * (z0 + z1);
          return z0 + h * apply_operator(o, terms, zh, h, F);
        },
        guess);
  }

  /// As avf6 with the fifth-order operator evaluated once at z0.
  SolveResult avf5(const Vector& z0, double h, const Vector& guess) const {
    const detail::PatternEvaluator<FieldOracle> eval(problem_.oracle(), z0);
    const std::span<const OperatorTerm> terms(config_.avf5_rederived ? avf5_rederived_operator_terms()
                                                                     : avf5_operator_terms());
    return solve([&](const Vector& z1) -> Vector { return z0 + h * apply_operator(eval, terms, h, averaged(z0, z1)); },
                 guess);
  }

  SolveResult step(const Vector& z0, double h, const Vector& guess) const {
    switch (config_.method) {
      case Method::avf2: return avf2(z0, h, guess);
      case Method::avf3: return avf_alpha(z0, h, ZHat::initial_point, guess);
      case Method::avf4: return avf_alpha(z0, h, ZHat::midpoint, guess);
      case Method::avf5: return avf5(z0, h, guess);
      case Method::avf6: return avf6(z0, h, guess);
    }
    throw std::logic_error("Stepper: bad method");
  }

  SolveResult step(const Vector& z0, double h) const { return step(z0, h, z0); }

 private:
  SolveResult solve(const std::function<Vector(const Vector&)>& map, const Vector& guess) const {
    return fixed_point_solve(map, guess, config_.tolerance, config_.max_iterations);
  }

  const Problem& problem_;
  StepperConfig config_;
  QuadratureRule rule_;
};

// Single-step entry points using config.step (which may be negative).

inline Vector step_avf2(const Problem& p, const StepperConfig& c, const Vector& z0) {
  return Stepper(p, c).avf2(z0, c.step, z0).state;
}

inline Vector step_avf_alpha(const Problem& p, const StepperConfig& c, const Vector& z0, ZHat zhat) {
  return Stepper(p, c).avf_alpha(z0, c.step, zhat, z0).state;
}

inline Vector step_avf6(const Problem& p, const StepperConfig& c, const Vector& z0) {
  return Stepper(p, c).avf6(z0, c.step, z0).state;
}

inline Vector step_avf5(const Problem& p, const StepperConfig& c, const Vector& z0) {
  return Stepper(p, c).avf5(z0, c.step, z0).state;
}

/// Dispatches on config.method.
inline Vector step(const Problem& p, const StepperConfig& c, const Vector& z0) {
  return Stepper(p, c).step(z0, c.step).state;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<int> iterations;    // solver sweeps of the step that produced each state (0 for z0)
  std::vector<double> residuals;  // final solver residual, likewise
  std::vector<double> energies;   // empty without a Hamiltonian
  std::int64_t steps = 0;         // steps taken, including unrecorded ones
  double step_size = 0;           // h after adjustment to land on t_end
  int max_iterations = 0;         // over every step

  std::size_t size() const { return states.size(); }
  const Vector& final_state() const { return states.back(); }
};

/**
 * Integrates from t = 0 to t_end in round(t_end/h) equal steps, with h
 * adjusted to land on t_end. States are recorded every `stride` steps and at
 * the final time. Implicit solves start from z0 + (z0 − z_prev), or z0 on the
 * first step.
 */
inline Trajectory integrate(const Problem& problem, const StepperConfig& config, double t_end,
                            std::int64_t stride = 1) {
  config.validate();
  if (!(t_end >= 0) || !std::isfinite(t_end)) throw std::invalid_argument("integrate: t_end must be >= 0");
  if (stride < 1) throw std::invalid_argument("integrate: stride must be >= 1");
  const Stepper stepper(problem, config);
  const std::int64_t n = std::llround(t_end / config.step);
  const double h = n > 0 ? t_end / static_cast<double>(n) : config.step;

  Trajectory traj;
  traj.steps = n;
  traj.step_size = h;
  auto record = [&](std::int64_t j, const Vector& z, int iters, double res) {
    traj.times.push_back(j == n ? t_end : static_cast<double>(j) * h);
    traj.states.push_back(z);
    traj.iterations.push_back(iters);
    traj.residuals.push_back(res);
    if (problem.hamiltonian && problem.hamiltonian->energy) traj.energies.push_back(problem.hamiltonian->energy(z));
  };

  Vector z = problem.initial_state;
  Vector z_prev = z;
  record(0, z, 0, 0.0);
  for (std::int64_t j = 1; j <= n; ++j) {
    const Vector guess = j == 1 ? z : Vector(2 * z - z_prev);
    SolveResult r;
    try {
      r = stepper.step(z, h, guess);
    } catch (const ConvergenceError& e) {
      throw e.at_step(j);
    }
    z_prev = std::move(z);
    z = std::move(r.state);
    traj.max_iterations = std::max(traj.max_iterations, r.iterations);
    if (j % stride == 0 || j == n) record(j, z, r.iterations, r.residual);
  }
  return traj;
}

/// ‖z_j − z(t_j)‖∞ at each recorded time.
inline std::vector<double> solution_error(const Trajectory& traj, const std::function<Vector(double)>& exact) {
  if (!exact) throw std::invalid_argument("solution_error: no exact solution");
  std::vector<double> out;
  out.reserve(traj.size());
  for (std::size_t j = 0; j < traj.size(); ++j)
    out.push_back((traj.states[j] - exact(traj.times[j])).lpNorm<Eigen::Infinity>());
  return out;
}

/// |H_j − H_0| / |H_0| at each recorded time.
inline std::vector<double> relative_energy_error(const Trajectory& traj) {
  if (traj.energies.empty()) throw std::invalid_argument("relative_energy_error: no Hamiltonian samples");
  const double h0 = traj.energies.front();
  if (h0 == 0.0) throw std::domain_error("relative_energy_error: H_0 = 0");
  std::vector<double> out;
  out.reserve(traj.energies.size());
  for (double hj : traj.energies) out.push_back(std::abs(hj - h0) / std::abs(h0));
  return out;
}

/// log₂(error(h) / error(h/2)).
inline double observed_order(double error_h, double error_h_half) {
  if (!(error_h > 0) || !(error_h_half > 0))
    throw std::domain_error("observed_order: errors must be positive");
  return std::log2(error_h / error_h_half);
}

}  // namespace avf
