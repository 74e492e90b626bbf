#include "hjb/eval.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hjb/errors.hpp"
#include "hjb/sampling.hpp"

namespace hjb {

namespace {

double golden_section(const std::function<double(double)>& f, double a,
                      double b, int iters) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iters; ++k) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

GridSpec GridSpec::for_problem(const ControlProblem& problem, int n_t,
                               int n_x) {
  return {n_t, n_x, problem.T, problem.state_box};
}

std::vector<Vec> GridSpec::states() const {
  if (n_x < 1 || state_box.dim() < 1)
    throw ParameterError("grid: empty state grid");
  const int d = state_box.dim();
  std::vector<std::vector<double>> axes;
  for (int k = 0; k < d; ++k)
    axes.push_back(uniform_grid(n_x, state_box.lo(k), state_box.hi(k)));
  std::vector<Vec> out;
  std::vector<int> idx(d, 0);
  for (;;) {
    Vec x(d);
    for (int k = 0; k < d; ++k) x(k) = axes[k][idx[k]];
    out.push_back(std::move(x));
    int k = d - 1;
    while (k >= 0 && ++idx[k] == n_x) idx[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

std::vector<std::pair<double, Vec>> GridSpec::points() const {
  if (n_t < 1) throw ParameterError("grid: empty time grid");
  const auto xs = states();
  std::vector<std::pair<double, Vec>> out;
  for (double t : uniform_grid(n_t, 0.0, T))
    for (const Vec& x : xs) out.emplace_back(t, x);
  return out;
}

double value_error(const ValueFunction& model, const ValueFunction& truth,
                   const GridSpec& grid) {
  double sum = 0.0;
  for (const auto& [t, x] : grid.points()) {
    const double e = model.value(t, x) - truth.value(t, x);
    sum += e * e;
  }
  return sum;
}

Policy greedy_policy(const ControlProblem& problem,
                     const ValueFunction& model) {
  if (problem.lqr) {
    const Mat RinvBt =
        problem.lqr->R.llt().solve(problem.lqr->B.transpose());
    const Box box = problem.control_box;
    return [RinvBt, box, grad = model.grad](double t, const Vec& x) -> Vec {
      return box.clip(-0.5 * RinvBt * grad(t, x));
    };
  }
  constexpr int kGrid = 201;
  return [problem, grad = model.grad](double t, const Vec& x) -> Vec {
    const Vec gV = grad(t, x);
    auto objective = [&](const Vec& u) {
      return problem.running_cost(t, x, u) +
             gV.dot(problem.dynamics(t, x, u));
    };
    const int p = problem.p;
    const Box& box = problem.control_box;
    std::vector<std::vector<double>> axes;
    for (int k = 0; k < p; ++k)
      axes.push_back(uniform_grid(kGrid, box.lo(k), box.hi(k)));

    Vec best(p), u(p);
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<int> idx(p, 0);
    for (;;) {
      for (int k = 0; k < p; ++k) u(k) = axes[k][idx[k]];
      const double v = objective(u);
      if (v < best_val) {
        best_val = v;
        best = u;
      }
      int k = p - 1;
      while (k >= 0 && ++idx[k] == kGrid) idx[k--] = 0;
      if (k < 0) break;
    }
    // One golden-section pass per axis around the best grid point.
    for (int k = 0; k < p; ++k) {
      const double h = (box.hi(k) - box.lo(k)) / (kGrid - 1);
      const double a = std::max(box.lo(k), best(k) - h);
      const double b = std::min(box.hi(k), best(k) + h);
      Vec trial = best;
      const double uk = golden_section(
          [&](double s) {
            trial(k) = s;
            return objective(trial);
          },
          a, b, 60);
      trial(k) = uk;
      if (objective(trial) <= objective(best)) best = trial;
    }
    return box.clip(best);
  };
}

PolicyCost policy_cost(const ControlProblem& problem, const Policy& policy,
                       const GridSpec& init_grid, int n_steps) {
  const auto starts = init_grid.states();
  PolicyCost out;
  std::vector<std::size_t> diverged;
  double first_time = 0.0;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    try {
      out.costs.push_back(
          rollout(problem, policy, starts[k], n_steps).total_cost);
    } catch (const DivergenceError& e) {
      if (diverged.empty()) first_time = e.time();
      diverged.push_back(k);
      out.costs.push_back(std::numeric_limits<double>::infinity());
    }
  }
  if (!diverged.empty()) {
    std::ostringstream os;
    os << "policy_cost: rollouts diverged from initial points";
    for (auto k : diverged) os << ' ' << k;
    throw DivergenceError(os.str(), first_time);
  }
  double sum = 0.0;
  for (double c : out.costs) sum += c;
  out.mean = sum / static_cast<double>(out.costs.size());
  return out;
}

EvalReport evaluate(const ControlProblem& problem, const ValueFunction& model,
                    const ValueFunction& truth, const GridSpec& grid,
                    int n_steps) {
  EvalReport rep;
  rep.value_error = value_error(model, truth, grid);
  const PolicyCost pc =
      policy_cost(problem, greedy_policy(problem, model), grid, n_steps);
  rep.policy_cost = pc.mean;
  rep.per_point_costs = pc.costs;
  rep.grid_t = grid.n_t;
  rep.grid_x = grid.n_x;
  rep.rollout_steps = n_steps;
  return rep;
}

Vec project_truth(const FeatureBasis& basis, const TerminalCost& terminal,
                  const ValueFunction& truth, const GridSpec& grid) {
  const auto pts = grid.points();
  const int m = basis.m();
  if (static_cast<int>(pts.size()) < m)
    throw ParameterError("project_truth: fewer grid points than features");
  Mat Psi(static_cast<Eigen::Index>(pts.size()), m);
  Vec y(Psi.rows());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const auto& [t, x] = pts[k];
    Psi.row(static_cast<Eigen::Index>(k)) = basis.psi(t, x).transpose();
    y(static_cast<Eigen::Index>(k)) = truth.value(t, x) - terminal.value(x);
  }
  Mat N = Psi.transpose() * Psi;
  Eigen::SelfAdjointEigenSolver<Mat> es(N, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo + 1e-10 > 1e-13 * hi))
    throw NumericalError("project_truth: features are rank deficient on grid");
  N.diagonal().array() += 1e-10;
  return N.llt().solve(Psi.transpose() * y);
}

double lqr_sos_residual(const LqrProblem& lqr, const RiccatiSolution& riccati,
                        double t, const Vec& x, const Vec& u) {
  const Mat S = riccati.at(t);
  const Mat Sdot = riccati_rhs(lqr, S);
  const Vec v = u + lqr.R.llt().solve(lqr.B.transpose() * S * x);
  const double H = x.dot(Sdot * x) + x.dot(lqr.Q * x) + u.dot(lqr.R * u) +
                   2.0 * x.dot(S * (lqr.A * x + lqr.B * u));
  return H - v.dot(lqr.R * v);
}

double lqr_sos_residual_stationary(const LqrProblem& lqr, const Mat& S0,
                                   const Vec& x, const Vec& u) {
  const Vec v = u + lqr.R.llt().solve(lqr.B.transpose() * S0 * x);
  const double H = x.dot(lqr.Q * x) + u.dot(lqr.R * u) +
                   2.0 * x.dot(S0 * (lqr.A * x + lqr.B * u));
  return H - v.dot(lqr.R * v);
}

}  // namespace hjb
