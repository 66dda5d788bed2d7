#include "avf/bseries.hpp"
#include "avf/integrators.hpp"
#include "avf/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

namespace {

using avf::Matrix;
using avf::Method;
using avf::Problem;
using avf::StepperConfig;
using avf::Vector;

double max_abs(const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }

class ZeroField final : public avf::FieldOracle {
 public:
  int dimension() const override { return 2; }
  int max_derivative() const override { return 8; }
  Vector derivative(const Vector&, std::span<const Vector>) const override { return Vector::Zero(2); }
};

Problem zero_problem() {
  Problem p;
  p.name = "zero";
  p.dimension = 2;
  p.field = std::make_shared<ZeroField>();
  p.initial_state = Vector{{0.3, -1.2}};
  return p;
}

StepperConfig config(Method m, double h) {
  StepperConfig c;
  c.method = m;
  c.step = h;
  return c;
}

// z1 = z0 + c·S(z0 + z1)/2 solved directly: (I − cS/2)z1 = (I + cS/2)z0.
Vector linear_map_step(const Vector& z0, double c) {
  const Matrix S = avf::canonical_structure();
  const Matrix I = Matrix::Identity(2, 2);
  return (I - 0.5 * c * S).partialPivLu().solve((I + 0.5 * c * S) * z0);
}

// Hand-coded scalar sixth-order scheme for ż = −10(z − 1)²:
// z1 = z0 + [h − (h³/12)·400u² + (h⁵/720)·14·10⁵·u⁴]
//      · [−(10/3)(z1² + z1z0 + z0²) + 10(z1 + z0) − 10],  u = (z1 + z0)/2 − 1.
double riccati_scheme_step(double z0, double h) {
  double z1 = z0;
  for (int it = 0; it < 200; ++it) {
    const double u = (z1 + z0) / 2 - 1;
    const double m = h - h * h * h / 12 * 400 * u * u + std::pow(h, 5) / 720 * 14e5 * std::pow(u, 4);
    const double F = -10.0 / 3 * (z1 * z1 + z1 * z0 + z0 * z0) + 10 * (z1 + z0) - 10;
    const double next = z0 + m * F;
    const bool done = std::abs(next - z1) == 0;
    z1 = next;
    if (done) break;
  }
  return z1;
}

double final_error(const Problem& p, Method m, double h, double t_end) {
  const auto traj = avf::integrate(p, config(m, h), t_end, std::int64_t{1} << 40);
  return max_abs(Vector(traj.final_state() - p.exact_solution(t_end)));
}

std::vector<double> orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) out.push_back(avf::observed_order(errors[i - 1], errors[i]));
  return out;
}

}  // namespace

TEST(Method, NamesAndOrders) {
  for (Method m : {Method::avf2, Method::avf3, Method::avf4, Method::avf5, Method::avf6})
    EXPECT_EQ(avf::parse_method(avf::to_string(m)), m);
  EXPECT_EQ(avf::nominal_order(Method::avf5), 5);
  EXPECT_THROW(avf::parse_method("rk4"), std::invalid_argument);
  EXPECT_FALSE(avf::is_energy_preserving(Method::avf5));
  EXPECT_TRUE(avf::is_energy_preserving(Method::avf3));
}

TEST(Config, Validation) {
  StepperConfig c;
  EXPECT_NO_THROW(c.validate());
  c.step = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.step = -0.1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_NO_THROW(c.validate_solver());
  c.tolerance = 0;
  EXPECT_THROW(c.validate_solver(), std::invalid_argument);
  c.tolerance = 1e-14;
  c.max_iterations = 0;
  EXPECT_THROW(c.validate_solver(), std::invalid_argument);
}

TEST(FixedPoint, IdentityConvergesInOneSweep) {
  const auto r = avf::fixed_point_solve([](const Vector& z) { return z; }, Vector{{1.0, 2.0}}, 1e-14, 10);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.residual, 0.0);
}

TEST(FixedPoint, AffineContraction) {
  const auto r = avf::fixed_point_solve([](const Vector& z) -> Vector { return 0.5 * z + Vector::Ones(1); },
                                        Vector::Zero(1), 1e-14, 100);
  EXPECT_NEAR(r.state[0], 2.0, 1e-14);
  EXPECT_LE(r.residual, 1e-14);
}

TEST(FixedPoint, DivergenceReportsResidual) {
  try {
    avf::fixed_point_solve([](const Vector& z) -> Vector { return 2.0 * z + Vector::Ones(1); }, Vector::Zero(1),
                           1e-14, 5);
    FAIL() << "expected ConvergenceError";
  } catch (const avf::ConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 5);
    EXPECT_EQ(e.step_index(), -1);
    EXPECT_GT(e.residual(), 1.0);
  }
}

TEST(Steps, ZeroFieldIsStationary) {
  const Problem p = zero_problem();
  for (Method m : {Method::avf2, Method::avf3, Method::avf4, Method::avf5, Method::avf6})
    EXPECT_EQ(avf::step(p, config(m, 0.1), p.initial_state), p.initial_state) << avf::to_string(m);
  EXPECT_EQ(avf::step_avf_alpha(p, config(Method::avf4, 0.1), p.initial_state, avf::ZHat::initial_point),
            p.initial_state);
}

TEST(Steps, Avf2OnLinearFieldIsImplicitMidpoint) {
  const Problem p = avf::linear_oscillator();
  const Vector z0{{0.6, -0.3}};
  for (double h : {0.01, 0.1, 0.3}) {
    const Vector z1 = avf::step_avf2(p, config(Method::avf2, h), z0);
    EXPECT_LT(max_abs(Vector(z1 - linear_map_step(z0, h))), 1e-14);
  }
}

TEST(Steps, AlphaFamilyOnLinearField) {
  // f'f' = S² = −I, so I + αh²f'f' = (1 + h²/12)I for α = −1/12.
  const Problem p = avf::linear_oscillator();
  const Vector z0{{0.6, -0.3}};
  const double h = 0.2;
  const Vector z1 = avf::step_avf_alpha(p, config(Method::avf4, h), z0, avf::ZHat::midpoint);
  EXPECT_LT(max_abs(Vector(z1 - linear_map_step(z0, h + h * h * h / 12))), 1e-14);
}

TEST(Steps, AlphaZeroRecoversAvf2) {
  for (const Problem& p : {avf::quartic_oscillator(), avf::pendulum(), avf::riccati()}) {
    StepperConfig c = config(Method::avf4, 0.05);
    c.alpha_override = 0.0;
    for (auto zhat : {avf::ZHat::initial_point, avf::ZHat::midpoint}) {
      const Vector a = avf::step_avf_alpha(p, c, p.initial_state, zhat);
      const Vector b = avf::step_avf2(p, c, p.initial_state);
      EXPECT_EQ(a, b) << p.name;
    }
  }
}

TEST(Steps, Avf6OnLinearFieldMatchesClosedForm) {
  const Problem p = avf::linear_oscillator();
  Vector z = p.initial_state;
  const double h = 0.02;
  const double c = h + std::pow(h, 3) / 12 + std::pow(h, 5) / 120;
  for (int j = 0; j < 100; ++j) {
    const Vector generic = avf::step_avf6(p, config(Method::avf6, h), z);
    const Vector closed = linear_map_step(z, c);
    ASSERT_LE(max_abs(Vector(generic - closed)), 1e-13) << "step " << j;
    z = closed;
  }
}

TEST(Steps, Avf5OnLinearFieldMatchesClosedForm) {
  // Every f''-bearing A vanishes: M = (1 + h²/12 + h⁴/120)I.
  const Problem p = avf::linear_oscillator();
  const Vector z0{{0.2, 0.9}};
  const double h = 0.1;
  const Vector z1 = avf::step_avf5(p, config(Method::avf5, h), z0);
  EXPECT_LT(max_abs(Vector(z1 - linear_map_step(z0, h + std::pow(h, 3) / 12 + std::pow(h, 5) / 120))), 1e-14);
}

TEST(Steps, Avf6OnRiccatiMatchesHandDerivedScheme) {
  const Problem p = avf::riccati();
  double z = 2.0;
  const double h = 0.02;
  for (int j = 0; j < 100; ++j) {
    const double generic = avf::step_avf6(p, config(Method::avf6, h), Vector::Constant(1, z))[0];
    const double hand = riccati_scheme_step(z, h);
    ASSERT_LE(std::abs(generic - hand), 1e-13) << "step " << j;
    z = hand;
  }
}

TEST(Steps, Avf2ConservesQuarticEnergy) {
  const Problem p = avf::quartic_oscillator();
  const Vector z0{{0.9, 0.7}};
  const Vector z1 = avf::step_avf2(p, config(Method::avf2, 0.01), z0);
  const double h0 = p.hamiltonian->energy(z0);
  EXPECT_LE(std::abs(p.hamiltonian->energy(z1) - h0) / h0, 1e-13);
  EXPECT_GT(max_abs(Vector(z1 - z0)), 1e-3);
}

TEST(Steps, Avf2PendulumSolveIsCheap) {
  const Problem p = avf::pendulum();
  const auto traj = avf::integrate(p, config(Method::avf2, 0.01), 5.0);
  EXPECT_LE(traj.max_iterations, 20);
  for (std::size_t j = 1; j < traj.size(); ++j) EXPECT_LE(traj.residuals[j], 1e-14);
}

TEST(Steps, ForwardThenBackwardReturnsHome) {
  for (Method m : {Method::avf2, Method::avf6}) {
    for (const Problem& p : {avf::quartic_oscillator(), avf::pendulum(), avf::riccati(), avf::huygens()}) {
      const StepperConfig c = config(m, 0.05);
      const avf::Stepper s(p, c);
      const Vector z0 = p.initial_state;
      const Vector z1 = s.step(z0, 0.05).state;
      const Vector back = s.step(z1, -0.05).state;
      EXPECT_LE(max_abs(Vector(back - z0)), 10 * c.tolerance) << avf::to_string(m) << " " << p.name;
    }
  }
}

TEST(Steps, Avf5DoesNotConserveEnergy) {
  // The per-step energy defect is nonzero and shrinks like h⁶.
  const Problem p = avf::quartic_oscillator();
  const Vector z0{{0.9, 0.7}};
  const double h0 = p.hamiltonian->energy(z0);
  std::vector<double> defects;
  for (double h : {0.1, 0.05, 0.025}) {
    const Vector z1 = avf::step_avf5(p, config(Method::avf5, h), z0);
    defects.push_back(std::abs(p.hamiltonian->energy(z1) - h0) / h0);
  }
  EXPECT_GT(defects[0], 1e-10);
  for (double o : orders(defects)) EXPECT_NEAR(o, 6.0, 0.5);
}

TEST(Integrate, ZeroStepsGivesInitialState) {
  const Problem p = avf::riccati();
  const auto traj = avf::integrate(p, config(Method::avf6, 0.1), 0.04);
  ASSERT_EQ(traj.size(), 1u);
  EXPECT_EQ(traj.steps, 0);
  EXPECT_EQ(traj.states[0], p.initial_state);
  EXPECT_TRUE(traj.energies.empty());
}

TEST(Integrate, StepIsAdjustedToLandOnTEnd) {
  const Problem p = avf::linear_oscillator();
  const auto traj = avf::integrate(p, config(Method::avf2, 0.3), 1.0);
  EXPECT_EQ(traj.steps, 3);
  EXPECT_DOUBLE_EQ(traj.step_size, 1.0 / 3);
  ASSERT_EQ(traj.size(), 4u);
  EXPECT_EQ(traj.times.back(), 1.0);
  for (std::size_t j = 1; j < traj.size(); ++j) EXPECT_GT(traj.times[j], traj.times[j - 1]);
  EXPECT_EQ(traj.energies.size(), traj.size());
}

TEST(Integrate, StrideKeepsFinalState) {
  const Problem p = avf::linear_oscillator();
  const auto full = avf::integrate(p, config(Method::avf2, 0.1), 1.05);
  const auto sparse = avf::integrate(p, config(Method::avf2, 0.1), 1.05, 4);
  ASSERT_EQ(full.steps, 11);
  ASSERT_EQ(sparse.size(), 4u);  // steps 0, 4, 8 and 11
  EXPECT_EQ(sparse.final_state(), full.final_state());
  EXPECT_EQ(sparse.states[1], full.states[4]);
  EXPECT_THROW(avf::integrate(p, config(Method::avf2, 0.1), 1.0, 0), std::invalid_argument);
}

TEST(Integrate, RejectsBadInput) {
  const Problem p = avf::linear_oscillator();
  EXPECT_THROW(avf::integrate(p, config(Method::avf2, -0.1), 1.0), std::invalid_argument);
  EXPECT_THROW(avf::integrate(p, config(Method::avf2, 0.1), -1.0), std::invalid_argument);
}

TEST(Integrate, ConvergenceFailureCarriesStepIndex) {
  StepperConfig c = config(Method::avf2, 0.1);
  c.max_iterations = 1;
  try {
    avf::integrate(avf::pendulum(), c, 1.0);
    FAIL() << "expected ConvergenceError";
  } catch (const avf::ConvergenceError& e) {
    EXPECT_EQ(e.step_index(), 1);
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(Metrics, SolutionErrorOfExactTrajectoryIsZero) {
  const Problem p = avf::linear_oscillator();
  avf::Trajectory traj;
  for (double t : {0.0, 0.5, 1.0}) {
    traj.times.push_back(t);
    traj.states.push_back(p.exact_solution(t));
  }
  for (double e : avf::solution_error(traj, p.exact_solution)) EXPECT_EQ(e, 0.0);
  EXPECT_THROW(avf::solution_error(traj, {}), std::invalid_argument);
}

TEST(Metrics, RelativeEnergyError) {
  avf::Trajectory traj;
  traj.energies = {2.0, 2.0, 2.5};
  const auto rel = avf::relative_energy_error(traj);
  EXPECT_EQ(rel[1], 0.0);
  EXPECT_DOUBLE_EQ(rel[2], 0.25);
  traj.energies = {0.0, 1.0};
  EXPECT_THROW(avf::relative_energy_error(traj), std::domain_error);
  traj.energies.clear();
  EXPECT_THROW(avf::relative_energy_error(traj), std::invalid_argument);
}

TEST(Metrics, ObservedOrder) {
  EXPECT_NEAR(avf::observed_order(2.0458e-5, 5.0474e-6), 2.0191, 1e-4);
  EXPECT_NEAR(avf::observed_order(4.2320e-8, 6.6074e-10), 6.0011, 1e-4);
  EXPECT_EQ(avf::observed_order(3e-7, 3e-7), 0.0);
  EXPECT_THROW(avf::observed_order(0.0, 1e-3), std::domain_error);
  EXPECT_THROW(avf::observed_order(1e-3, -1.0), std::domain_error);
}

TEST(Accuracy, RiccatiFinalErrors) {
  const Problem p = avf::riccati();
  EXPECT_NEAR(final_error(p, Method::avf6, 0.04, 5) / 4.2320e-8, 1.0, 0.02);
  EXPECT_NEAR(final_error(p, Method::avf2, 0.04, 5) / 2.0458e-5, 1.0, 0.02);
  EXPECT_NEAR(final_error(p, Method::avf4, 0.005, 5) / 1.5586e-10, 1.0, 0.02);
}

TEST(Accuracy, ConvergenceSlopesOnRiccati) {
  const Problem p = avf::riccati();
  for (Method m : {Method::avf2, Method::avf3, Method::avf4, Method::avf5, Method::avf6}) {
    std::vector<double> errors;
    for (double h : {0.02, 0.01, 0.005}) errors.push_back(final_error(p, m, h, 5));
    for (double o : orders(errors)) EXPECT_NEAR(o, avf::nominal_order(m), 0.3) << avf::to_string(m);
  }
}

TEST(Accuracy, ConvergenceSlopesOnQuartic) {
  const Problem p = avf::quartic_oscillator();
  for (Method m : {Method::avf2, Method::avf4, Method::avf6}) {
    std::vector<double> errors;
    for (double h : {0.1, 0.05, 0.025}) errors.push_back(final_error(p, m, h, 5));
    for (double o : orders(errors)) EXPECT_NEAR(o, avf::nominal_order(m), 0.3) << avf::to_string(m);
  }
}

// Final-state error on the pendulum against a fine avf6 reference.
static std::vector<double> pendulum_errors(const StepperConfig& base, const std::vector<double>& hs) {
  const Problem p = avf::pendulum();
  const Vector ref = avf::integrate(p, config(Method::avf6, 0.001), 5.0, 1 << 30).final_state();
  std::vector<double> errors;
  for (double h : hs) {
    StepperConfig c = base;
    c.step = h;
    errors.push_back(max_abs(Vector(avf::integrate(p, c, 5.0, 1 << 30).final_state() - ref)));
  }
  return errors;
}

TEST(Accuracy, OddOrderSlopesOnPendulum) {
  // The quartic's rotational symmetry lifts avf3 by one order, so the odd
  // methods are measured on the pendulum.
  for (double o : orders(pendulum_errors(config(Method::avf3, 0), {0.05, 0.025, 0.0125}))) EXPECT_NEAR(o, 3.0, 0.3);
  StepperConfig rederived = config(Method::avf5, 0);
  rederived.avf5_rederived = true;
  for (double o : orders(pendulum_errors(rederived, {0.05, 0.025, 0.0125}))) EXPECT_NEAR(o, 5.0, 0.3);
}

TEST(Accuracy, PublishedFifthOrderWeightsAreFourthOrderInTwoDimensions) {
  for (double o : orders(pendulum_errors(config(Method::avf5, 0), {0.05, 0.025, 0.0125}))) EXPECT_NEAR(o, 4.0, 0.3);
}

TEST(Energy, RederivedAvf5Conserves) {
  StepperConfig c = config(Method::avf5, 0.05);
  c.avf5_rederived = true;
  for (const Problem& p : {avf::quartic_oscillator(), avf::huygens(), avf::pendulum()}) {
    const auto traj = avf::integrate(p, c, 50.0, 10);
    double worst = 0;
    for (double e : avf::relative_energy_error(traj)) worst = std::max(worst, e);
    EXPECT_LE(worst, 1e-13) << p.name;
  }
}

TEST(Accuracy, LongRunTablesOnTwoHundred) {
  // Final errors at t = 200 for h = 0.02 and 0.01. The avf6 h = 0.01 entries
  // sit near round-off and get a looser band.
  struct Row {
    Problem p;
    Method m;
    double e1, e2;
  };
  const std::vector<Row> rows{
      {avf::linear_oscillator(), Method::avf2, 5.8324e-3, 1.4562e-3},
      {avf::linear_oscillator(), Method::avf4, 2.3287e-7, 1.4554e-8},
      {avf::linear_oscillator(), Method::avf6, 9.4389e-12, 1.4611e-13},
      {avf::quartic_oscillator(), Method::avf2, 1.7558e-2, 4.3723e-3},
      {avf::quartic_oscillator(), Method::avf4, 4.5007e-6, 2.8137e-7},
      {avf::quartic_oscillator(), Method::avf6, 1.5495e-9, 2.4127e-11},
  };
  for (const auto& r : rows) {
    const std::string name = r.p.name + " " + avf::to_string(r.m);
    EXPECT_NEAR(final_error(r.p, r.m, 0.02, 200) / r.e1, 1.0, 0.02) << name;
    EXPECT_NEAR(final_error(r.p, r.m, 0.01, 200) / r.e2, 1.0, r.m == Method::avf6 ? 0.1 : 0.02) << name;
  }
}

TEST(Energy, ConservedToRoundOff) {
  for (const Problem& p : {avf::linear_oscillator(), avf::quartic_oscillator(), avf::huygens(), avf::pendulum()}) {
    for (Method m : {Method::avf2, Method::avf3, Method::avf4, Method::avf6}) {
      const auto traj = avf::integrate(p, config(m, 0.01), 200.0, 50);
      double worst = 0;
      for (double e : avf::relative_energy_error(traj)) worst = std::max(worst, e);
      EXPECT_LE(worst, 1e-12) << p.name << " " << avf::to_string(m);
    }
  }
}

TEST(BSeriesDefect, Avf2StepMatchesItsSeriesToSeventhOrder) {
  const Problem p = avf::quartic_oscillator();
  const auto a = avf::avf2_coeffs(6);
  const Vector z0 = p.initial_state;
  std::vector<double> defects;
  for (double h : {0.1, 0.05}) {
    const Vector step = avf::step_avf2(p, config(Method::avf2, h), z0);
    defects.push_back(max_abs(Vector(step - avf::bseries_eval(p.oracle(), a, z0, h, 6))));
  }
  const double ratio = defects[0] / defects[1];
  EXPECT_GE(ratio, 100);
  EXPECT_LE(ratio, 160);
}
