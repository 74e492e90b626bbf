#include "hjb/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

#include "hjb/errors.hpp"

namespace hjb {

namespace {

bool is_symmetric(const Mat& X, double tol = 1e-12) {
  return X.rows() == X.cols() &&
         (X - X.transpose()).cwiseAbs().maxCoeff() <=
             tol * (1.0 + X.cwiseAbs().maxCoeff());
}

double min_eigenvalue(const Mat& X) {
  Eigen::SelfAdjointEigenSolver<Mat> es(X, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Mat symmetrize(const Mat& X) { return 0.5 * (X + X.transpose()); }

}  // namespace

Box::Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.size() == 0)
    throw ParameterError("Box: lo and hi must be nonempty and of equal size");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo(i) <= hi(i))) throw ParameterError("Box: lo > hi");
}

Box Box::uniform(int dim, double lo, double hi) {
  return Box(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
}

bool Box::contains(const Vec& x, double tol) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) < lo(i) - tol || x(i) > hi(i) + tol) return false;
  return true;
}

Vec Box::clip(const Vec& x) const { return x.cwiseMax(lo).cwiseMin(hi); }

TerminalCost TerminalCost::zero(int dim) {
  return {[](const Vec&) { return 0.0; },
          [dim](const Vec&) -> Vec { return Vec::Zero(dim); },
          [](const Vec&) { return 0.0; }};
}

TerminalCost TerminalCost::quadratic(const Mat& M0) {
  const Mat S = symmetrize(M0);
  const double trace = S.trace();
  return {[S](const Vec& x) { return x.dot(S * x); },
          [S](const Vec& x) -> Vec { return 2.0 * S * x; },
          [trace](const Vec&) { return 2.0 * trace; }};
}

void LqrProblem::validate() const {
  const auto d = A.rows();
  if (d < 1 || A.cols() != d) throw ParameterError("LQR: A must be square");
  if (B.rows() != d || B.cols() < 1)
    throw ParameterError("LQR: B must have as many rows as A");
  if (Q.rows() != d || Q.cols() != d || M.rows() != d || M.cols() != d)
    throw ParameterError("LQR: Q and M must be d x d");
  if (R.rows() != B.cols() || R.cols() != B.cols())
    throw ParameterError("LQR: R must be p x p");
  if (!(T > 0.0)) throw ParameterError("LQR: horizon must be positive");
  if (!is_symmetric(Q) || min_eigenvalue(Q) < -1e-12)
    throw ParameterError("LQR: Q must be symmetric PSD");
  if (!is_symmetric(M) || min_eigenvalue(M) < -1e-12)
    throw ParameterError("LQR: M must be symmetric PSD");
  if (!is_symmetric(R) || !(min_eigenvalue(R) > 0.0))
    throw ParameterError("LQR: R must be symmetric positive definite");
}

void ControlProblem::validate() const {
  if (d < 1 || p < 1) throw ParameterError("problem: d and p must be >= 1");
  if (!(T > 0.0)) throw ParameterError("problem: horizon must be positive");
  if (state_box.dim() != d || control_box.dim() != p)
    throw ParameterError("problem: box dimensions do not match (d, p)");
  if (!dynamics || !running_cost || !terminal.value || !terminal.grad ||
      !terminal.laplacian)
    throw ParameterError("problem: missing callback");
}

ControlProblem make_lqr_problem(const LqrProblem& lqr, const Box& state_box,
                                const Box& control_box) {
  lqr.validate();
  ControlProblem pb;
  pb.d = lqr.state_dim();
  pb.p = lqr.control_dim();
  pb.T = lqr.T;
  const Mat A = lqr.A, B = lqr.B, Q = lqr.Q, R = lqr.R;
  pb.dynamics = [A, B](double, const Vec& x, const Vec& u) -> Vec {
    return A * x + B * u;
  };
  pb.running_cost = [Q, R](double, const Vec& x, const Vec& u) {
    return x.dot(Q * x) + u.dot(R * u);
  };
  pb.terminal = TerminalCost::quadratic(lqr.M);
  pb.state_box = state_box;
  pb.control_box = control_box;
  pb.lqr = lqr;
  pb.validate();
  return pb;
}

LqrProblem double_integrator_lqr() {
  LqrProblem lqr;
  lqr.A = Mat{{0.0, 1.0}, {0.0, 0.0}};
  lqr.B = Mat{{0.0}, {1.0}};
  lqr.Q = Mat::Identity(2, 2);
  lqr.R = Mat::Constant(1, 1, 0.1);
  lqr.M = Mat::Identity(2, 2);
  lqr.T = 1.0;
  return lqr;
}

ControlProblem double_integrator_problem() {
  return make_lqr_problem(double_integrator_lqr(), Box::uniform(2, -1.0, 1.0),
                          Box::uniform(1, -10.0, 10.0));
}

ControlProblem pure_cost_problem(std::function<double(const Vec&)> g,
                                 const Box& control_box, double T) {
  ControlProblem pb;
  pb.d = 1;
  pb.p = control_box.dim();
  pb.T = T;
  pb.dynamics = [](double, const Vec&, const Vec&) -> Vec {
    return Vec::Zero(1);
  };
  pb.running_cost = [g = std::move(g)](double, const Vec&, const Vec& u) {
    return g(u);
  };
  pb.terminal = TerminalCost::zero(1);
  pb.state_box = Box::uniform(1, -1.0, 1.0);
  pb.control_box = control_box;
  pb.validate();
  return pb;
}

Mat RiccatiSolution::at(double t) const {
  const double T = grid.back();
  if (!(t >= 0.0 && t <= T)) {
    std::ostringstream os;
    os << "Riccati: time " << t << " outside [0, " << T << "]";
    throw DomainError(os.str());
  }
  const auto n = static_cast<double>(grid.size() - 1);
  const double s = std::min(t / step, n);
  const auto k = std::min(static_cast<std::size_t>(s), grid.size() - 2);
  const double w = s - static_cast<double>(k);
  return (1.0 - w) * S[k] + w * S[k + 1];
}

Mat RiccatiSolution::gain(double t) const {
  return lqr.R.llt().solve(lqr.B.transpose() * at(t));
}

Mat riccati_rhs(const LqrProblem& lqr, const Mat& S) {
  const Mat BtS = lqr.B.transpose() * S;
  return -lqr.Q - lqr.A.transpose() * S - S * lqr.A +
         BtS.transpose() * lqr.R.llt().solve(BtS);
}

RiccatiSolution riccati_backward_solve(const LqrProblem& lqr, int n_steps) {
  if (n_steps < 10) throw ParameterError("Riccati: n_steps must be >= 10");
  lqr.validate();
  const double h = lqr.T / n_steps;
  RiccatiSolution sol;
  sol.lqr = lqr;
  sol.step = h;
  sol.grid.resize(n_steps + 1);
  sol.S.resize(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) sol.grid[k] = k * h;
  sol.grid.back() = lqr.T;

  Mat S = symmetrize(lqr.M);
  sol.S[n_steps] = S;
  for (int k = n_steps; k > 0; --k) {
    // Backward in time: step of -h.
    const Mat k1 = riccati_rhs(lqr, S);
    const Mat k2 = riccati_rhs(lqr, S - 0.5 * h * k1);
    const Mat k3 = riccati_rhs(lqr, S - 0.5 * h * k2);
    const Mat k4 = riccati_rhs(lqr, S - h * k3);
    S = symmetrize(S - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    if (!S.allFinite())
      throw DivergenceError("Riccati: non-finite solution", sol.grid[k - 1]);
    sol.S[k - 1] = S;
  }
  return sol;
}

double algebraic_riccati_residual(const LqrProblem& lqr, const Mat& S) {
  return riccati_rhs(lqr, S).norm();
}

Mat algebraic_riccati_solve(const LqrProblem& lqr) {
  lqr.validate();
  LqrProblem longer = lqr;
  longer.T = 20.0;
  Mat S = riccati_backward_solve(longer, 2000).S.front();

  const auto d = lqr.state_dim();
  const Mat G = lqr.B * lqr.R.llt().solve(lqr.B.transpose());
  const Mat Id = Mat::Identity(d, d);
  double res = algebraic_riccati_residual(lqr, S);
  constexpr double kTol = 1e-8;
  for (int it = 0; it < 100; ++it) {
    // Solve (A - G S)' X + X (A - G S) = rhs(S) for the Newton correction.
    const Mat Acl = lqr.A - G * S;
    const Mat lyap = Eigen::kroneckerProduct(Id, Acl.transpose()).eval() +
                     Eigen::kroneckerProduct(Acl.transpose(), Id).eval();
    const Mat rhs = riccati_rhs(lqr, S);
    const Vec x = lyap.fullPivLu().solve(rhs.reshaped());
    const Mat S_next = symmetrize(S + x.reshaped(d, d));
    const double res_next = algebraic_riccati_residual(lqr, S_next);
    if (!std::isfinite(res_next)) break;
    // Keep polishing while the residual still drops.
    if (res_next >= res && res <= kTol) break;
    S = S_next;
    res = res_next;
    if (res <= 1e-15 * (1.0 + S.norm())) break;
  }
  if (!(res <= kTol))
    throw ConvergenceError("algebraic Riccati: Newton did not converge", res);
  return S;
}

double lqr_value(const RiccatiSolution& riccati, double t, const Vec& x) {
  return x.dot(riccati.at(t) * x);
}

ValueFunction lqr_value_function(const RiccatiSolution& riccati) {
  auto sol = std::make_shared<const RiccatiSolution>(riccati);
  ValueFunction V;
  V.value = [sol](double t, const Vec& x) { return lqr_value(*sol, t, x); };
  V.dt = [sol](double t, const Vec& x) {
    return x.dot(riccati_rhs(sol->lqr, sol->at(t)) * x);
  };
  V.grad = [sol](double t, const Vec& x) -> Vec {
    return 2.0 * sol->at(t) * x;
  };
  return V;
}

Policy lqr_optimal_policy(const RiccatiSolution& riccati) {
  auto sol = std::make_shared<const RiccatiSolution>(riccati);
  return [sol](double t, const Vec& x) -> Vec { return -sol->gain(t) * x; };
}

double hamiltonian(const ControlProblem& problem, const ValueFunction& V,
                   double t, const Vec& x, const Vec& u) {
  return V.dt(t, x) + problem.running_cost(t, x, u) +
         V.grad(t, x).dot(problem.dynamics(t, x, u));
}

Trajectory rollout(const ControlProblem& problem, const Policy& policy,
                   const Vec& x0, int n_steps) {
  if (n_steps < 10) throw ParameterError("rollout: n_steps must be >= 10");
  if (x0.size() != problem.d) throw DomainError("rollout: x0 has wrong size");
  const double h = problem.T / n_steps;
  const auto d = problem.d;

  Trajectory tr;
  tr.times.resize(n_steps + 1);
  tr.states.resize(n_steps + 1, d);
  tr.controls.resize(n_steps, problem.p);

  // Augmented field: (x', J') = (f, L) under the clipped policy.
  auto field = [&](double t, const Vec& x, Vec* u_out) {
    const Vec u = problem.control_box.clip(policy(t, x));
    if (u_out) *u_out = u;
    Vec z(d + 1);
    z.head(d) = problem.dynamics(t, x, u);
    z(d) = problem.running_cost(t, x, u);
    return z;
  };

  Vec x = x0;
  double cost = 0.0;
  tr.states.row(0) = x.transpose();
  tr.times(0) = 0.0;
  for (int k = 0; k < n_steps; ++k) {
    const double t = k * h;
    Vec u;
    const Vec k1 = field(t, x, &u);
    const Vec k2 = field(t + 0.5 * h, x + 0.5 * h * k1.head(d), nullptr);
    const Vec k3 = field(t + 0.5 * h, x + 0.5 * h * k2.head(d), nullptr);
    const Vec k4 = field(t + h, x + h * k3.head(d), nullptr);
    const Vec incr = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x += incr.head(d);
    cost += incr(d);
    tr.controls.row(k) = u.transpose();
    tr.times(k + 1) = (k + 1 == n_steps) ? problem.T : (k + 1) * h;
    if (!x.allFinite() || !std::isfinite(cost))
      throw DivergenceError("rollout: non-finite state", tr.times(k + 1));
    tr.states.row(k + 1) = x.transpose();
  }
  tr.running_cost_integral = cost;
  tr.total_cost = cost + problem.terminal.value(x);
  return tr;
}

}  // namespace hjb
