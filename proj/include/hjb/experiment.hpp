#pragma once

// Experiment runner: hyperparameter grids over LP / guided / kernel solves
// for a sweep of sample counts, model selection and CSV output.

#include <optional>
#include <string>
#include <vector>

#include "hjb/config_reader.hpp"
#include "hjb/eval.hpp"
#include "hjb/solver.hpp"

namespace hjb {

enum class Method { lp, guided, kernel };

std::string method_name(Method m);
/// Throws ParameterError for anything but "lp", "guided", "kernel".
Method parse_method(const std::string& name);

struct ProblemConfig {
  /// lqr_double_integrator | example1 | custom
  std::string kind = "lqr_double_integrator";
  double T = 1.0;
  // custom LQR (row-major matrices)
  int d = 2;
  int p = 1;
  std::vector<double> A, B, Q, R, M;
  std::vector<double> state_lo, state_hi, control_lo, control_hi;
  // example1: g(u) = (u - u_star)^2 + g_min on [control_lo, control_hi]
  double u_star = 0.3;
  double g_min = 0.1;
};

struct HyperGrid {
  std::vector<double> lambda;
  std::vector<double> lambda_theta;
  std::vector<double> gamma;
};

struct ExperimentConfig {
  ProblemConfig problem;
  std::vector<Method> methods{Method::lp, Method::guided, Method::kernel};

  // [basis]
  /// sine_quadratic | linear_decay
  std::string basis = "sine_quadratic";
  int m_t = 10;
  int q_t = 5;
  double guided_u_scale = 10.0;

  // [kernel]
  KernelSpec kernel;
  KernelFactorization factorization = KernelFactorization::automatic;

  // [sampling]
  int n_t = 20;
  std::vector<int> sweep{5, 10, 15, 20};
  ObjectiveMode objective = ObjectiveMode::all_samples;

  // [solver]
  double epsilon = 1e-4;
  double eta = 0.0;
  double newton_tol = 1e-8;
  int max_newton_iters = 500;
  StepRule step_rule = StepRule::damped;
  HessianMode hessian = HessianMode::automatic;

  // [sweep] hyperparameter grids; lambda is unused by the LP
  HyperGrid lp_grid{{}, {1e-6, 1e-4, 1e-2, 1.0}, {1e-4, 1e-3, 1e-2, 1e-1, 1.0}};
  HyperGrid guided_grid{
      {1e-1, 1e-2, 1e-3}, {1e-4, 1e-2}, {1e-4, 1e-3, 1e-2, 1e-1}};
  HyperGrid kernel_grid{{1e-1, 1e-2, 1e-3}, {1e-4, 1e-2}, {1e-3, 1e-2}};

  // [output]
  int eval_n_t = 10;
  int eval_n_x = 10;
  int rollout_steps = 1000;
  bool record_timing = true;
  bool dump_values = true;
  bool projection_baseline = true;
  int workers = 1;

  static ExperimentConfig from_document(const ConfigDocument& doc);
  static ExperimentConfig load(const std::string& path);
  void validate() const;

  const HyperGrid& grid(Method m) const;
};

/// One line of results.csv.
struct ResultRow {
  std::string method;
  int n_t = 0;
  int n_x = 0;
  int n_u = 0;
  int n = 0;
  /// NaN when the hyperparameter does not apply.
  double lambda = 0.0;
  double lambda_theta = 0.0;
  double gamma = 0.0;
  double epsilon = 0.0;
  double eta = 0.0;
  double value_error = 0.0;
  double policy_cost = 0.0;
  int newton_iters = 0;
  double final_decrement = 0.0;
  double solve_seconds = 0.0;
  std::string status = "ok";
  /// Mean constraint violation mean_i max(0, -(b_i + a_i'theta)); used for
  /// selection when no ground truth exists. Not written to the CSV.
  double violation = 0.0;
};

/// Column names of results.csv, in order.
const std::vector<std::string>& result_columns();
std::string csv_header();
std::string csv_line(const ResultRow& row);
/// Writes header and rows; IoError naming the path on failure.
void write_results_csv(const std::string& path,
                       const std::vector<ResultRow>& rows);
/// Parses a file produced by write_results_csv (for tests and tooling).
std::vector<ResultRow> read_results_csv(const std::string& path);

/// Index of the best "ok" row: smallest value_error (or violation when
/// value_error is NaN), ties broken by the smallest (lambda, lambda_theta,
/// gamma). nullopt if no row succeeded.
std::optional<std::size_t> select_best(const std::vector<ResultRow>& rows);

/// Grid rows (t, x_1..x_d, v_model, v_true), header t,x1,...,v_model,v_true.
void dump_value_function(const ValueFunction& model, const ValueFunction& truth,
                         const GridSpec& grid, const std::string& path);

struct ExperimentResult {
  /// Best row per (method, sweep point), then the projection baseline.
  std::vector<ResultRow> best;
  /// Every hyperparameter combination.
  std::vector<ResultRow> raw;
};

/// Runs the sweep. If out_dir is non-empty writes results.csv,
/// results_raw.csv and (if enabled) values/*.csv there.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::string& out_dir = "");

}  // namespace hjb
