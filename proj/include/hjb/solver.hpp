#pragma once

// Regularized SoS program solved through its log-barrier Lagrange dual, and
// the penalized LP baseline.
//
// Primal (SoS):
//   sup_{B >= 0, theta, delta}  c'theta - lambda Tr B - lambda_theta |theta|^2
//                               - gamma |delta|^2 + eps logdet B + C
//   s.t.  b_i + a_i'theta = Phi_i' B Phi_i + delta_i.
//
// Dual objective, with U(alpha) = lambda I_q + Phi' Diag(alpha) Phi:
//   F(alpha) = alpha'b + |c + A'alpha|^2 / (4 lambda_theta) - eps logdet U
//              + |alpha|^2 / (4 gamma) + eps q log(eps/e) + C.

#include <string>
#include <vector>

#include "hjb/assembly.hpp"
#include "hjb/kernels.hpp"

namespace hjb {

/// Sample embeddings Phi (n x q). Row i is [features_i, sqrt(s) e_i'] where
/// s = identity_scale; the scaled identity block is absent when s == 0, so
/// q = r or q = r + n. A kernel Gram matrix K + jitter I is represented
/// either densely (features = R', s = 0) or as a low-rank factor plus jitter
/// (features = G with K ~ G G', s = jitter); both give the same argmin.
struct Embedding {
  Mat features;
  double identity_scale = 0.0;

  static Embedding dense(Mat phi) { return {std::move(phi), 0.0}; }

  int n() const { return static_cast<int>(features.rows()); }
  int rank() const { return static_cast<int>(features.cols()); }
  int q() const { return rank() + (identity_scale > 0.0 ? n() : 0); }
  /// Explicit n x q matrix (allocates the identity block if present).
  Mat to_dense() const;
};

enum class KernelFactorization { automatic, dense, low_rank };

/// Embedding of a kernel on the sample set. `dense` factorizes K + 1e-8 I
/// by Cholesky; `low_rank` uses pivoted Cholesky of K plus the 1e-8 jitter
/// block; `automatic` picks low_rank when K has numerical rank <= n/4.
Embedding kernel_embedding(const KernelSpec& spec,
                           std::span<const Sample> samples,
                           KernelFactorization mode =
                               KernelFactorization::automatic);

/// (u/u_scale, x, s_1(t) x, ..., s_{q_t-1}(t) x) with
/// s_w(t) = (1/w) sin(w pi/2 (t/T - 1)); dimension p + q_t d.
Vec guided_embedding(const Sample& sample, int q_t, double u_scale, double T);
Embedding guided_features(std::span<const Sample> samples, int q_t,
                          double u_scale, double T);

struct HomotopyStage {
  double lambda_theta;
  double epsilon;
};

enum class HessianMode { automatic, dense, low_rank };

/// damped: alpha += dir / (1 + decrement). backtracking: try the full step
/// first, halve under an Armijo test, fall back to the damped step.
enum class StepRule { damped, backtracking };

struct SolverConfig {
  double lambda = 1e-2;
  double lambda_theta = 1e-4;
  double gamma = 1e3;
  double epsilon = 1e-4;
  double newton_tol = 1e-8;
  int max_newton_iters = 500;
  /// Empty: default_homotopy(lambda_theta, epsilon).
  std::vector<HomotopyStage> homotopy;
  HessianMode hessian = HessianMode::automatic;
  StepRule step_rule = StepRule::damped;
  /// Initial dual point (tau, ..., tau); negative means tau = 1/n.
  double alpha0 = -1.0;

  void validate() const;
  /// Stages actually run: homotopy (or the default), ending at the target.
  std::vector<HomotopyStage> stages() const;
};

/// Four stages scaling lambda_theta by 8, 4, 2, 1 and epsilon by 1e3, 1e2,
/// 1e1, 1.
std::vector<HomotopyStage> default_homotopy(double lambda_theta,
                                            double epsilon);

struct DualState {
  Vec alpha;
  double objective = 0.0;
  double decrement = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> decrement_history;
  std::vector<double> objective_history;
};

struct SolveDiagnostics {
  int iterations = 0;
  std::vector<int> stage_iterations;
  double final_decrement = 0.0;
  double final_objective = 0.0;
  double seconds = 0.0;
};

struct Solution {
  Vec theta;
  /// eps U(alpha)^{-1}; empty when q is too large to store densely.
  Mat B;
  Vec alpha;
  /// Slack of each constraint.
  Vec delta;
  /// Phi_i' B Phi_i for every constraint (zero for the LP).
  Vec sos_values;
  SolveDiagnostics diagnostics;

  bool has_B() const { return B.size() > 0; }
};

/// U(alpha) = lambda I_q + Phi' Diag(alpha) Phi, explicitly (q x q).
Mat barrier_matrix(const Embedding& emb, double lambda, const Vec& alpha);

/// F(alpha), or +infinity outside the barrier domain.
double dual_objective(const ConstraintSystem& cs, const Embedding& emb,
                      const SolverConfig& cfg, const Vec& alpha);
/// Throws DomainError outside the barrier domain.
Vec dual_gradient(const ConstraintSystem& cs, const Embedding& emb,
                  const SolverConfig& cfg, const Vec& alpha);
/// Dense n x n Hessian. Throws DomainError outside the barrier domain.
Mat dual_hessian(const ConstraintSystem& cs, const Embedding& emb,
                 const SolverConfig& cfg, const Vec& alpha);

/// Newton direction -F''^{-1} F' using the requested Hessian representation.
Vec newton_direction(const ConstraintSystem& cs, const Embedding& emb,
                     const SolverConfig& cfg, const Vec& alpha,
                     HessianMode mode);

/// Newton on F/eps with the step rule of cfg (default: alpha += dalpha /
/// (1 + decrement)), using cfg.lambda_theta and cfg.epsilon. Throws
/// ConvergenceError after max_newton_iters.
DualState damped_newton(const ConstraintSystem& cs, const Embedding& emb,
                        const SolverConfig& cfg, const Vec& alpha0);

/// theta* = (c + A'alpha)/(2 lambda_theta), B* = eps U^{-1},
/// delta* = -alpha/(2 gamma).
Solution recover_primal(const ConstraintSystem& cs, const Embedding& emb,
                        const SolverConfig& cfg, const DualState& state);

/// Homotopy over cfg.stages() with warm starts, then recover_primal.
Solution solve_sos(const ConstraintSystem& cs, const Embedding& emb,
                   const SolverConfig& cfg);

/// Maximizes c'theta - lambda_theta |theta|^2
///   - gamma sum_i max(0, -(b_i + a_i'theta))^2 + C
/// by semismooth Newton with an exact line search along each direction.
Solution solve_lp(const ConstraintSystem& cs, const SolverConfig& cfg);

/// Value of the LP objective above at theta.
double lp_objective(const ConstraintSystem& cs, const SolverConfig& cfg,
                    const Vec& theta);

}  // namespace hjb
