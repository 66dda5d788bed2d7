#pragma once

// Drivers behind the command-line tool. Each writes CSV (or a short report)
// to `out`, one-line diagnostics to `err`, and returns a process exit code:
// 0 on success, 1 when a check fails, 2 on invalid input.

#include "avf/bseries.hpp"
#include "avf/integrators.hpp"
#include "avf/problems.hpp"
#include "avf/rational.hpp"
#include "avf/reference_coefficients.hpp"
#include "avf/substitution_table.hpp"
#include "avf/trees.hpp"
#include "avf/vectorfield.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <ostream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

namespace avf {

struct RunSpec {
  std::string command;
  std::string problem = "riccati";
  Method method = Method::avf6;
  std::vector<double> steps;
  double t_end = 5;
  int quadrature_nodes = 5;
  double tolerance = 1e-14;
  int max_iterations = 100;
  std::uint64_t seed = 0;
  std::int64_t stride = 1;
  int max_order = 5;
  int trials = 100;
  int samples = 50;
  bool avf5_rederived = false;

  StepperConfig stepper(double h) const {
    StepperConfig c;
    c.step = h;
    c.tolerance = tolerance;
    c.max_iterations = max_iterations;
    c.quadrature_nodes = quadrature_nodes;
    c.method = method;
    c.avf5_rederived = avf5_rederived;
    return c;
  }
};

namespace detail {

/// Seventeen significant digits, enough to round-trip a double.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Shortest representation that round-trips.
inline std::string fmt_short(double x) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

inline std::string join_steps(const std::vector<double>& steps) {
  std::string s;
  for (std::size_t i = 0; i < steps.size(); ++i) s += (i ? "," : "") + fmt_short(steps[i]);
  return s;
}

inline void write_run_spec(std::ostream& out, const RunSpec& spec) {
  out << "# command=" << spec.command << " problem=" << spec.problem << " method=" << to_string(spec.method)
      << " h=" << join_steps(spec.steps) << " t_end=" << fmt_short(spec.t_end)
      << " quad_nodes=" << spec.quadrature_nodes << " tol=" << fmt_short(spec.tolerance)
      << " max_iters=" << spec.max_iterations << " stride=" << spec.stride;
  if (spec.method == Method::avf5) out << " avf5_weights=" << (spec.avf5_rederived ? "rederived" : "published");
  out << "\n";
}

/// RFC 4180 quoting for fields that contain a comma or a quote.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

/// p/q with p ∈ [−range, range] and q ∈ [1, range].
inline Rational random_rational(std::mt19937_64& rng, int range = 9) {
  std::uniform_int_distribution<int> num(-range, range), den(1, range);
  const int p = num(rng);
  const int q = den(rng);
  return make_rational(p, q);
}

inline CoeffMap random_coeffs(std::mt19937_64& rng, int max_order, Rational empty_value) {
  std::unordered_map<Tree, Rational> entries;
  for (const auto& t : trees_up_to(max_order)) entries.emplace(t, random_rational(rng));
  return CoeffMap(std::move(empty_value), std::move(entries), max_order);
}

inline Vector random_state(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Vector z(n);
  for (int i = 0; i < n; ++i) z[i] = u(rng);
  return z;
}

}  // namespace detail

/**
 * σ, γ, a, b, c for ∅ and every tree up to max_order (≤ 6), as CSV with
 * rationals written p/q. Rows of order ≤ 5 are checked against the
 * published values and every order-6 b against zero. c is defined only up to
 * order 5; the column is left blank beyond that.
 */
inline int cmd_tables(int max_order, std::ostream& out, std::ostream& err) {
  if (max_order < 1 || max_order > 6) {
    err << "tables: max-order must be in 1..6\n";
    return 2;
  }
  const CoeffMap a = avf2_coeffs(max_order);
  const CoeffMap b = solve_modified_coeffs(a, max_order);
  const CoeffMap c = avf6_method_coeffs();

  std::unordered_map<Tree, const ReferenceRow*> golden;
  for (const auto& row : reference_coefficients()) golden.emplace(row.tree, &row);

  out << "# command=tables max_order=" << max_order << "\n";
  out << "tree,order,sigma,gamma,a,b,c\n";
  int failures = 0;
  auto check = [&](const Tree& t, const char* field, const Rational& got, const Rational& want) {
    if (got == want) return;
    ++failures;
    err << "tables: mismatch at " << to_string(t) << " field " << field << ": computed " << to_pq(got)
        << ", expected " << to_pq(want) << "\n";
  };

  const Tree empty = Tree::empty();
  out << to_string(empty) << ",0,,," << to_pq(a.at(empty)) << "," << to_pq(b.at(empty)) << ","
      << to_pq(c.at(empty)) << "\n";
  const ReferenceRow& g0 = *golden.at(empty);
  check(empty, "a", a.at(empty), g0.a);
  check(empty, "b", b.at(empty), g0.b);
  check(empty, "c", c.at(empty), g0.c);

  for (const auto& t : trees_up_to(max_order)) {
    const Rational s = symmetry(t), y = density(t);
    out << detail::csv_field(to_string(t)) << "," << t.order() << "," << to_pq(s) << "," << to_pq(y) << "," << to_pq(a.at(t)) << ","
        << to_pq(b.at(t)) << ",";
    if (t.order() <= c.max_order()) out << to_pq(c.at(t));
    out << "\n";
    if (auto it = golden.find(t); it != golden.end()) {
      const ReferenceRow& g = *it->second;
      check(t, "sigma", s, *g.sigma);
      check(t, "gamma", y, *g.gamma);
      check(t, "a", a.at(t), g.a);
      check(t, "b", b.at(t), g.b);
      check(t, "c", c.at(t), g.c);
    } else if (t.order() == 6) {
      check(t, "b", b.at(t), Rational(0));
    }
  }
  return failures == 0 ? 0 : 1;
}

/// Random-coefficient comparison of a closed-form table against the
/// partition sum on ∅ and every tree of order ≤ 5.
inline int cmd_verify_substitution(const SubstitutionTable& table, int trials, std::uint64_t seed,
                                   std::ostream& out, std::ostream& err) {
  if (trials < 1) {
    err << "verify-substitution: trials must be >= 1\n";
    return 2;
  }
  std::mt19937_64 rng(seed);
  const auto trees = trees_up_to(5);
  for (int trial = 0; trial < trials; ++trial) {
    Rational a_empty = detail::random_rational(rng);
    const CoeffMap a = detail::random_coeffs(rng, 5, a_empty);
    const CoeffMap b = detail::random_coeffs(rng, 5, Rational(0));
    for (const auto& t : trees) {
      Rational via_table;
      try {
        via_table = substitute_table(table, b, a, t);
      } catch (const std::domain_error&) {
        err << "verify-substitution: FAIL at " << to_string(t) << ": no closed form in table\n";
        return 1;
      }
      const Rational brute = substitute_bruteforce(b, a, t);
      if (via_table != brute) {
        err << "verify-substitution: FAIL at " << to_string(t) << " (trial " << trial << "): table "
            << to_pq(via_table) << ", partitions " << to_pq(brute) << "\n";
        return 1;
      }
    }
  }
  out << "# command=verify-substitution trials=" << trials << " seed=" << seed << "\n";
  out << "trees,trials,result\n" << trees.size() << "," << trials << ",pass\n";
  return 0;
}

inline int cmd_verify_substitution(int trials, std::uint64_t seed, std::ostream& out, std::ostream& err) {
  return cmd_verify_substitution(published_substitution_table(), trials, seed, out, err);
}

/// Final-time error for each step size and the observed order between
/// consecutive ones.
inline int cmd_convergence(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const Problem problem = make_problem(spec.problem);
  if (!problem.has_exact_solution()) {
    err << "convergence: problem '" << problem.name << "' has no exact solution\n";
    return 2;
  }
  if (spec.steps.size() < 2) {
    err << "convergence: need at least two step sizes\n";
    return 2;
  }
  for (std::size_t i = 1; i < spec.steps.size(); ++i) {
    if (std::abs(spec.steps[i - 1] / spec.steps[i] - 2) > 1e-9) {
      err << "convergence: step sizes must form a halving sequence\n";
      return 2;
    }
  }
  if (!(spec.t_end > 0)) {
    err << "convergence: t-end must be positive\n";
    return 2;
  }
  std::vector<double> errors;
  for (double h : spec.steps) {
    const Trajectory traj = integrate(problem, spec.stepper(h), spec.t_end, std::int64_t{1} << 62);
    errors.push_back((traj.final_state() - problem.exact_solution(spec.t_end)).lpNorm<Eigen::Infinity>());
  }
  detail::write_run_spec(out, spec);
  out << "method,h,t_end,error,order\n";
  for (std::size_t i = 0; i < errors.size(); ++i) {
    out << to_string(spec.method) << "," << detail::fmt17(spec.steps[i]) << "," << detail::fmt17(spec.t_end) << ","
        << detail::fmt17(errors[i]) << ",";
    if (i > 0) {
      if (errors[i - 1] > 0 && errors[i] > 0) out << detail::fmt17(observed_order(errors[i - 1], errors[i]));
    }
    out << "\n";
  }
  return 0;
}

/// Solution and relative energy error along one trajectory.
inline int cmd_energy(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const Problem problem = make_problem(spec.problem);
  if (spec.steps.size() != 1) {
    err << "energy: give exactly one step size\n";
    return 2;
  }
  if (!(spec.t_end >= 0)) {
    err << "energy: t-end must be >= 0\n";
    return 2;
  }
  const Trajectory traj = integrate(problem, spec.stepper(spec.steps[0]), spec.t_end, spec.stride);
  std::vector<double> sol, rel;
  if (problem.has_exact_solution()) sol = solution_error(traj, problem.exact_solution);
  if (!traj.energies.empty()) rel = relative_energy_error(traj);
  detail::write_run_spec(out, spec);
  out << "t,solution_error,relative_energy_error\n";
  for (std::size_t j = 0; j < traj.size(); ++j) {
    out << detail::fmt17(traj.times[j]) << ",";
    if (!sol.empty()) out << detail::fmt17(sol[j]);
    out << ",";
    if (!rel.empty()) out << detail::fmt17(rel[j]);
    out << "\n";
  }
  return 0;
}

/// Largest relative asymmetry of S̃ over random states in [−1.5, 1.5]ⁿ.
inline double max_skew_defect(const Problem& problem, double h, int samples, std::mt19937_64& rng) {
  double worst = 0;
  for (int i = 0; i < samples; ++i) {
    const Vector z = detail::random_state(rng, problem.dimension, 1.5);
    worst = std::max(worst, skew_defect(assemble_s_tilde(problem.oracle(), problem.hamiltonian, z, h)));
  }
  return worst;
}

inline constexpr double kSkewThreshold = 1e-12;

inline int cmd_skew_check(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  const Problem problem = make_problem(spec.problem);
  if (!problem.is_hamiltonian()) {
    err << "skew-check: problem '" << problem.name << "' is not Hamiltonian\n";
    return 2;
  }
  if (spec.samples < 1 || spec.steps.empty()) {
    err << "skew-check: need at least one sample and one step size\n";
    return 2;
  }
  std::mt19937_64 rng(spec.seed);
  detail::write_run_spec(out, spec);
  out << "h,samples,max_skew_defect\n";
  int status = 0;
  for (double h : spec.steps) {
    const double d = max_skew_defect(problem, h, spec.samples, rng);
    out << detail::fmt17(h) << "," << spec.samples << "," << detail::fmt17(d) << "\n";
    if (!(d <= kSkewThreshold)) {
      err << "skew-check: relative asymmetry " << detail::fmt_short(d) << " exceeds " << kSkewThreshold
          << " at h=" << detail::fmt_short(h) << "\n";
      status = 1;
    }
  }
  return status;
}

/// Dispatches on spec.command; exceptions become a one-line diagnostic.
inline int run_command(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (spec.command == "tables") return cmd_tables(spec.max_order, out, err);
    if (spec.command == "verify-substitution") return cmd_verify_substitution(spec.trials, spec.seed, out, err);
    if (spec.command == "convergence") return cmd_convergence(spec, out, err);
    if (spec.command == "energy") return cmd_energy(spec, out, err);
    if (spec.command == "skew-check") return cmd_skew_check(spec, out, err);
    err << "unknown command '" << spec.command << "'\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << spec.command << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << spec.command << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace avf
