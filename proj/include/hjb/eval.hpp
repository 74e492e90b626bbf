#pragma once

// Evaluation against ground truth: value error, policy cost, projection
// baseline and the LQR sum-of-squares identity.

#include <utility>
#include <vector>

#include "hjb/features.hpp"

namespace hjb {

/// Regular endpoint-inclusive grid on [0,T] x state_box.
struct GridSpec {
  int n_t = 10;
  /// Points per state axis.
  int n_x = 10;
  double T = 1.0;
  Box state_box;

  static GridSpec for_problem(const ControlProblem& problem, int n_t = 10,
                              int n_x = 10);
  /// Throws ParameterError for an empty grid.
  std::vector<std::pair<double, Vec>> points() const;
  /// Tensor grid of states only (n_x per axis).
  std::vector<Vec> states() const;
};

/// Sum over the grid of (V - V*)^2.
double value_error(const ValueFunction& model, const ValueFunction& truth,
                   const GridSpec& grid);

/// Minimizer of u -> L + grad V' f. LQR problems use the closed form
/// -R0^{-1} B0' grad V / 2; others a 201-point grid per control axis refined
/// by golden-section search. Clipped to the control box.
Policy greedy_policy(const ControlProblem& problem, const ValueFunction& model);

struct PolicyCost {
  double mean = 0.0;
  std::vector<double> costs;
};

/// Mean rollout cost from every grid state at t = 0. Throws DivergenceError
/// naming the diverged initial points.
PolicyCost policy_cost(const ControlProblem& problem, const Policy& policy,
                       const GridSpec& init_grid, int n_steps = 1000);

struct EvalReport {
  double value_error = 0.0;
  double policy_cost = 0.0;
  std::vector<double> per_point_costs;
  int grid_t = 0;
  int grid_x = 0;
  int rollout_steps = 0;
};

EvalReport evaluate(const ControlProblem& problem, const ValueFunction& model,
                    const ValueFunction& truth, const GridSpec& grid,
                    int n_steps = 1000);

/// Least-squares theta fitting theta' psi + M to `truth` on the grid
/// (normal equations with a 1e-10 ridge).
Vec project_truth(const FeatureBasis& basis, const TerminalCost& terminal,
                  const ValueFunction& truth, const GridSpec& grid);

/// H*(t,x,u) - (u + K(t)x)' R0 (u + K(t)x) with V* = x'S(t)x and
/// dV*/dt = x' (dS/dt) x.
double lqr_sos_residual(const LqrProblem& lqr, const RiccatiSolution& riccati,
                        double t, const Vec& x, const Vec& u);

/// Time-invariant variant with the algebraic Riccati solution S0.
double lqr_sos_residual_stationary(const LqrProblem& lqr, const Mat& S0,
                                   const Vec& x, const Vec& u);

}  // namespace hjb
