// Command-line driver: coefficient tables, substitution-law check,
// convergence and energy studies, and the S̃ skew-symmetry check.

#include "avf/avf.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

struct Options {
  avf::RunSpec spec;
  std::string method = "avf6";
  std::string out;
};

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "Output file (default: stdout)");
}

void add_run_options(CLI::App* cmd, Options& o, std::string default_problem) {
  o.spec.problem = std::move(default_problem);
  cmd->add_option("--problem", o.spec.problem, "riccati, linear, quartic, huygens or pendulum")
      ->capture_default_str();
  cmd->add_option("--method", o.method, "avf2, avf3, avf4, avf5 or avf6")->capture_default_str();
  cmd->add_option("--h", o.spec.steps, "Step size (repeatable or comma-separated)")->delimiter(',');
  cmd->add_option("--t-end", o.spec.t_end, "Final time")->capture_default_str();
  cmd->add_option("--quad-nodes", o.spec.quadrature_nodes, "Gauss-Legendre nodes for the averaged field")
      ->capture_default_str();
  cmd->add_option("--tol", o.spec.tolerance, "Fixed-point tolerance (max norm)")->capture_default_str();
  cmd->add_option("--max-iters", o.spec.max_iterations, "Fixed-point iteration limit")->capture_default_str();
  cmd->add_flag("--avf5-rederived", o.spec.avf5_rederived, "avf5 with the re-derived fifth-order weights");
  add_output(cmd, o);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaged vector field integrators and B-series tables"};
  app.require_subcommand(1);
  // -h is taken by the step-size flag; subcommands inherit this.
  app.set_help_flag("--help", "Print this help message and exit");

  Options tables_o, verify_o, convergence_o, energy_o, skew_o;

  auto* tables = app.add_subcommand("tables", "Print sigma, gamma, a, b, c for trees up to --max-order");
  tables->add_option("--max-order", tables_o.spec.max_order, "Largest tree order (1..6)")->capture_default_str();
  add_output(tables, tables_o);

  auto* verify = app.add_subcommand("verify-substitution",
                                    "Compare the closed-form substitution law with the partition sum");
  verify->add_option("--trials", verify_o.spec.trials, "Random coefficient maps")->capture_default_str();
  verify->add_option("--seed", verify_o.spec.seed, "RNG seed")->capture_default_str();
  add_output(verify, verify_o);

  auto* convergence = app.add_subcommand("convergence", "Final-time errors and observed orders");
  add_run_options(convergence, convergence_o, "riccati");

  auto* energy = app.add_subcommand("energy", "Solution and relative energy error along a trajectory");
  add_run_options(energy, energy_o, "quartic");
  energy->add_option("--stride", energy_o.spec.stride, "Record every n-th step")->capture_default_str();

  auto* skew = app.add_subcommand("skew-check", "Relative asymmetry of the sixth-order structure matrix");
  add_run_options(skew, skew_o, "quartic");
  skew->add_option("--samples", skew_o.spec.samples, "Random states")->capture_default_str();
  skew->add_option("--seed", skew_o.spec.seed, "RNG seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  Options& o = chosen == tables        ? tables_o
               : chosen == verify      ? verify_o
               : chosen == convergence ? convergence_o
               : chosen == energy      ? energy_o
                                       : skew_o;
  o.spec.command = chosen->get_name();
  try {
    o.spec.method = avf::parse_method(o.method);
  } catch (const std::invalid_argument& e) {
    std::cerr << o.spec.command << ": " << e.what() << "\n";
    return 2;
  }
  if (o.spec.steps.empty()) {
    if (chosen == convergence) o.spec.steps = {0.04, 0.02, 0.01, 0.005};
    if (chosen == energy) o.spec.steps = {0.01};
    if (chosen == skew) o.spec.steps = {0.1};
  }

  if (o.out.empty()) return avf::run_command(o.spec, std::cout, std::cerr);
  std::ofstream file(o.out);
  if (!file) {
    std::cerr << o.spec.command << ": cannot open " << o.out << "\n";
    return 2;
  }
  return avf::run_command(o.spec, file, std::cerr);
}
