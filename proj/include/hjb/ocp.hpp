#pragma once

// Finite-horizon optimal control problems, LQR ground truth and rollouts.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace hjb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Axis-aligned box [lo, hi] in R^dim.
struct Box {
  Vec lo;
  Vec hi;

  Box() = default;
  Box(Vec lo_, Vec hi_);
  /// Same interval [lo, hi] on every axis.
  static Box uniform(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& x, double tol = 0.0) const;
  Vec clip(const Vec& x) const;
};

/// Terminal cost M with the analytic derivatives assembly needs.
struct TerminalCost {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<double(const Vec&)> laplacian;

  static TerminalCost zero(int dim);
  /// M(x) = x' M0 x for a symmetric M0.
  static TerminalCost quadratic(const Mat& M0);
};

using Dynamics = std::function<Vec(double t, const Vec& x, const Vec& u)>;
using RunningCost = std::function<double(double t, const Vec& x, const Vec& u)>;
using Policy = std::function<Vec(double t, const Vec& x)>;

/// Linear dynamics x' = A0 x + B0 u with cost x'Q0x + u'R0u and x'M0x at T.
struct LqrProblem {
  Mat A;
  Mat B;
  Mat Q;
  Mat R;
  Mat M;
  double T = 1.0;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int control_dim() const { return static_cast<int>(B.cols()); }
  /// Throws ParameterError unless shapes agree, Q and M are symmetric PSD and
  /// R is symmetric PD.
  void validate() const;
};

/// Abstract control problem on [0,T] x state_box x control_box.
struct ControlProblem {
  int d = 0;
  int p = 0;
  double T = 1.0;
  Dynamics dynamics;
  RunningCost running_cost;
  TerminalCost terminal;
  Box state_box;
  Box control_box;
  /// Present when the problem is an LQR; enables closed-form policies.
  std::optional<LqrProblem> lqr;

  void validate() const;
};

/// Value function handle: V, dV/dt and grad_x V.
struct ValueFunction {
  std::function<double(double, const Vec&)> value;
  std::function<double(double, const Vec&)> dt;
  std::function<Vec(double, const Vec&)> grad;
};

ControlProblem make_lqr_problem(const LqrProblem& lqr, const Box& state_box,
                                const Box& control_box);

/// Double integrator on [0,1] with Q0 = I, R0 = 0.1, M(x) = |x|^2.
LqrProblem double_integrator_lqr();
/// The double integrator on [-1,1]^2 x [-10,10].
ControlProblem double_integrator_problem();

/// f = 0, M = 0, L(t,x,u) = g(u) with a one-dimensional dummy state.
ControlProblem pure_cost_problem(std::function<double(const Vec&)> g,
                                 const Box& control_box, double T = 1.0);

/// Time-gridded solution of the Riccati differential equation.
struct RiccatiSolution {
  LqrProblem lqr;
  std::vector<double> grid;
  std::vector<Mat> S;
  double step = 0.0;

  /// S(t), linearly interpolated. Throws DomainError outside [0,T].
  Mat at(double t) const;
  /// K(t) = R0^{-1} B0' S(t).
  Mat gain(double t) const;
};

struct Trajectory {
  Vec times;
  Mat states;    // (N+1) x d
  Mat controls;  // N x p, control applied at the start of each step
  double running_cost_integral = 0.0;
  double total_cost = 0.0;
};

/// dS/dt = -Q - A'S - SA + S B R^{-1} B' S.
Mat riccati_rhs(const LqrProblem& lqr, const Mat& S);

/// Classic RK4 integration of the Riccati ODE backward from S(T) = M0.
RiccatiSolution riccati_backward_solve(const LqrProblem& lqr, int n_steps);

/// Stabilizing solution of the algebraic Riccati equation by Newton's method.
Mat algebraic_riccati_solve(const LqrProblem& lqr);

/// Frobenius norm of the algebraic Riccati residual.
double algebraic_riccati_residual(const LqrProblem& lqr, const Mat& S);

double lqr_value(const RiccatiSolution& riccati, double t, const Vec& x);
ValueFunction lqr_value_function(const RiccatiSolution& riccati);
/// u = -K(t) x (unclipped).
Policy lqr_optimal_policy(const RiccatiSolution& riccati);

/// dV/dt + L(t,x,u) + grad V' f(t,x,u).
double hamiltonian(const ControlProblem& problem, const ValueFunction& V,
                   double t, const Vec& x, const Vec& u);

/// RK4 closed-loop simulation from (0, x0) to T. Controls are clipped to the
/// control box; states are recorded as they are.
Trajectory rollout(const ControlProblem& problem, const Policy& policy,
                   const Vec& x0, int n_steps);

}  // namespace hjb
