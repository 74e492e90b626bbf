#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "hjb/errors.hpp"
#include "hjb/eval.hpp"

using namespace hjb;

namespace {

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

ValueFunction shifted(const ValueFunction& V, double c) {
  return {[=](double t, const Vec& x) { return V.value(t, x) + c; }, V.dt, V.grad};
}

struct Lqr {
  ControlProblem problem = double_integrator_problem();
  RiccatiSolution riccati = riccati_backward_solve(*problem.lqr, 2000);
  ValueFunction truth = lqr_value_function(riccati);
  GridSpec grid = GridSpec::for_problem(problem);
};

}  // namespace

TEST_CASE("evaluation grid") {
  Lqr L;
  auto pts = L.grid.points();
  CHECK(pts.size() == 1000);
  CHECK(pts.front().first == 0.0);
  CHECK(pts.back().first == 1.0);
  CHECK(L.grid.states().size() == 100);
  GridSpec empty = L.grid;
  empty.n_x = 0;
  CHECK_THROWS_AS(empty.points(), ParameterError);
}

TEST_CASE("value error") {
  Lqr L;
  CHECK(value_error(L.truth, L.truth, L.grid) == 0.0);
  CHECK(value_error(shifted(L.truth, 1.0), L.truth, L.grid) ==
        doctest::Approx(1000.0).epsilon(1e-12));

  auto basis = FeatureBasis::sine_quadratic(10, 1.0);
  Vec th = project_truth(basis, L.problem.terminal, L.truth, L.grid);
  ValueModel proj{basis, th, L.problem.terminal};
  ValueModel zero{basis, Vec::Zero(basis.m()), L.problem.terminal};
  CHECK(value_error(proj.handle(), L.truth, L.grid) <
        value_error(zero.handle(), L.truth, L.grid));

  // order independence
  auto pts = L.grid.points();
  std::mt19937_64 rng(1);
  std::shuffle(pts.begin(), pts.end(), rng);
  double s = 0;
  for (const auto& [t, x] : pts) {
    const double d = proj.value(t, x) - L.truth.value(t, x);
    s += d * d;
  }
  CHECK(std::abs(s - value_error(proj.handle(), L.truth, L.grid)) < 1e-12 * (1 + s));
}

TEST_CASE("projection") {
  Lqr L;
  // ten time points, one of them at T, cannot separate ten sines
  auto basis = FeatureBasis::sine_quadratic(5, 1.0);
  const auto& M = L.problem.terminal;
  SUBCASE("in-span target") {
    ValueFunction target{
        [&](double t, const Vec& x) { return kappa(1, t, 1.0) * x(0) * x(0) + M.value(x); },
        nullptr, nullptr};
    Vec th = project_truth(basis, M, target, L.grid);
    Vec want = Vec::Zero(30);
    want(4) = 1.0;
    CHECK((th - want).norm() < 1e-6);  // ridge bias
    ValueModel model{basis, th, M};
    CHECK(value_error(model.handle(), target, L.grid) < 1e-8);
  }
  SUBCASE("terminal cost target") {
    ValueFunction target{[&](double, const Vec& x) { return M.value(x); }, nullptr, nullptr};
    CHECK(project_truth(basis, M, target, L.grid).norm() < 1e-8);
  }
}

TEST_CASE("greedy policy") {
  Lqr L;
  auto pi = greedy_policy(L.problem, L.truth);
  auto opt = lqr_optimal_policy(L.riccati);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> T(0, 1), X(-0.5, 0.5);
  for (int k = 0; k < 100; ++k) {
    const double t = T(rng);
    Vec x = v2(X(rng), X(rng));
    Vec want = L.problem.control_box.clip(opt(t, x));
    CHECK((pi(t, x) - want).norm() < 1e-6);
  }
  ValueFunction flat{[](double, const Vec&) { return 0.0; },
                     [](double, const Vec&) { return 0.0; },
                     [](double, const Vec&) { return Vec(Vec::Zero(2)); }};
  CHECK(greedy_policy(L.problem, flat)(0.3, v2(1, 1)).norm() == 0.0);

  auto generic = pure_cost_problem([](const Vec& u) { return (u(0) - 3) * (u(0) - 3); },
                                   Box::uniform(1, -10, 10));
  ValueFunction zero1{[](double, const Vec&) { return 0.0; },
                      [](double, const Vec&) { return 0.0; },
                      [](double, const Vec&) { return Vec(Vec::Zero(1)); }};
  Vec u = greedy_policy(generic, zero1)(0.0, Vec::Zero(1));
  CHECK(std::abs(u(0) - 3.0) < 5e-3);
}

TEST_CASE("policy cost") {
  Lqr L;
  auto opt = policy_cost(L.problem, lqr_optimal_policy(L.riccati), L.grid);
  CHECK(opt.costs.size() == 100);
  double want = 0, worst = 0;
  auto states = L.grid.states();
  for (std::size_t k = 0; k < states.size(); ++k) {
    const double v = lqr_value(L.riccati, 0.0, states[k]);
    want += v;
    worst = std::max(worst, std::abs(opt.costs[k] - v));
  }
  want /= 100;
  CHECK(worst <= 1e-4);
  CHECK(std::abs(opt.mean - want) <= 1e-3);

  auto zero = policy_cost(L.problem, [](double, const Vec&) { return Vec(Vec::Zero(1)); },
                          L.grid);
  CHECK(zero.mean >= opt.mean);

  ControlProblem frozen = L.problem;
  frozen.dynamics = [](double, const Vec& x, const Vec&) { return Vec(Vec::Zero(x.size())); };
  frozen.running_cost = [](double, const Vec&, const Vec&) { return 0.0; };
  auto pc = policy_cost(frozen, [](double, const Vec&) { return Vec(Vec::Zero(1)); }, L.grid);
  double mean_M = 0;
  for (const Vec& x : states) mean_M += frozen.terminal.value(x);
  CHECK(pc.mean == doctest::Approx(mean_M / 100).epsilon(1e-14));
}

TEST_CASE("evaluate bundles both metrics") {
  Lqr L;
  auto rep = evaluate(L.problem, L.truth, L.truth, L.grid);
  CHECK(rep.value_error == 0.0);
  CHECK(rep.grid_t == 10);
  CHECK(rep.grid_x == 10);
  CHECK(rep.rollout_steps == 1000);
  CHECK(rep.per_point_costs.size() == 100);
  auto opt = policy_cost(L.problem, lqr_optimal_policy(L.riccati), L.grid);
  CHECK(rep.policy_cost >= opt.mean - 1e-6);
}

TEST_CASE("lqr sum-of-squares identity") {
  Lqr L;
  const auto& lqr = *L.problem.lqr;
  auto K = [&](double t) { return L.riccati.gain(t); };
  Vec x = v2(0.3, -0.8);
  Vec u = -K(0.4) * x;
  CHECK(std::abs(lqr_sos_residual(lqr, L.riccati, 0.4, x, u)) <= 1e-8);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> T(0, 1), X(-1, 1), U(-10, 10);
  Mat S0 = algebraic_riccati_solve(lqr);
  double worst = 0, worst_inf = 0;
  for (int k = 0; k < 1000; ++k) {
    Vec y = v2(X(rng), X(rng));
    Vec w = Vec::Constant(1, U(rng));
    worst = std::max(worst, std::abs(lqr_sos_residual(lqr, L.riccati, T(rng), y, w)));
    worst_inf = std::max(worst_inf, std::abs(lqr_sos_residual_stationary(lqr, S0, y, w)));
  }
  CHECK(worst <= 1e-8);
  CHECK(worst_inf <= 1e-10);
}
