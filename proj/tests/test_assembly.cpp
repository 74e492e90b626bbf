#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hjb/assembly.hpp"
#include "hjb/errors.hpp"

using namespace hjb;

namespace {

SampleSet single(double t, Vec x, Vec u) {
  SampleSet s;
  s.triples.push_back({t, std::move(x), std::move(u)});
  s.n_t = s.n_x = s.n_u = 1;
  return s;
}

}  // namespace

TEST_CASE("hand-evaluated constraint row") {
  const auto problem = double_integrator_problem();
  auto basis = FeatureBasis::sine_quadratic(10, 1.0);
  auto cs = assemble(problem, basis,
                     single(0.0, (Vec(2) << 1, 0).finished(), Vec::Zero(1)));
  CHECK(cs.n() == 1);
  CHECK(cs.m() == 60);
  CHECK(cs.b(0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("laplacian slots") {
  const auto problem = double_integrator_problem();
  auto basis = FeatureBasis::sine_quadratic(10, 1.0);
  const double t = 0.3, eta = 0.25;
  auto s = single(t, (Vec(2) << 0.4, -0.2).finished(), Vec::Constant(1, 1.5));
  auto a0 = assemble(problem, basis, s, 0.0);
  auto a1 = assemble(problem, basis, s, eta);
  Vec diff = (a1.A - a0.A).row(0).transpose();
  for (int j = 0; j < 10; ++j) {
    const double k = kappa(j + 1, t, 1.0);
    for (int i = 0; i < 4; ++i) CHECK(diff(i + 6 * j) == 0.0);
    CHECK(diff(4 + 6 * j) == doctest::Approx(eta * 2 * k).epsilon(1e-13));
    CHECK(diff(5 + 6 * j) == doctest::Approx(eta * 2 * k).epsilon(1e-13));
  }
  // Delta |x|^2 = 4
  CHECK(a1.b(0) - a0.b(0) == doctest::Approx(eta * 4.0).epsilon(1e-13));
  CHECK(a1.eta == eta);
}

TEST_CASE("consistency with the hamiltonian") {
  const auto problem = double_integrator_problem();
  auto basis = FeatureBasis::sine_quadratic(10, 1.0);
  auto samples = build_sample_set(problem, 4, 5, 5);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> N(0, 1);

  for (double eta : {0.0, 0.1}) {
    auto cs = assemble(problem, basis, samples, eta);
    CHECK(cs.n() == samples.size());
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      Vec th = Vec::NullaryExpr(basis.m(), [&] { return N(rng); });
      ValueModel model{basis, th, problem.terminal};
      auto V = model.handle();
      Vec r = cs.residuals(th);
      for (int i = 0; i < cs.n(); i += 7) {
        const auto& s = samples.triples[i];
        const double want = hamiltonian(problem, V, s.t, s.x, s.u) +
                            eta * model.laplacian(s.t, s.x);
        worst = std::max(worst, std::abs(r(i) - want) / std::max(1.0, std::abs(want)));
      }
    }
    CHECK(worst < 1e-9);
  }

  auto cs = assemble(problem, basis, samples);
  ValueModel zero{basis, Vec::Zero(basis.m()), problem.terminal};
  for (int i = 0; i < cs.n(); ++i) {
    const auto& s = samples.triples[i];
    CHECK(cs.b(i) == doctest::Approx(hamiltonian(problem, zero.handle(), s.t, s.x, s.u)));
  }
}

TEST_CASE("objective modes") {
  const auto problem = double_integrator_problem();
  auto basis = FeatureBasis::sine_quadratic(10, 1.0);
  auto samples = build_sample_set(problem, 3, 4, 2);
  auto all = assemble(problem, basis, samples, 0.0, ObjectiveMode::all_samples);
  Vec c = Vec::Zero(basis.m());
  double C = 0;
  for (const auto& s : samples.triples) {
    c += basis.psi(s.t, s.x);
    C += problem.terminal.value(s.x);
  }
  CHECK((all.c - c / samples.size()).norm() < 1e-12);
  CHECK(all.C == doctest::Approx(C / samples.size()));

  auto init = assemble(problem, basis, samples, 0.0, ObjectiveMode::initial_points);
  Vec c0 = Vec::Zero(basis.m());
  double C0 = 0;
  for (const Vec& x : sobol_points(2, 4, problem.state_box)) {
    c0 += basis.psi(0.0, x);
    C0 += problem.terminal.value(x);
  }
  CHECK((init.c - c0 / 4).norm() < 1e-12);
  CHECK(init.C == doctest::Approx(C0 / 4));
}

TEST_CASE("linearity in the running cost") {
  auto g = [](const Vec& u) { return (u(0) - 0.3) * (u(0) - 0.3) + 0.1; };
  auto p1 = pure_cost_problem(g, Box::uniform(1, -1, 1));
  auto p3 = pure_cost_problem([&](const Vec& u) { return 3 * g(u); },
                              Box::uniform(1, -1, 1));
  auto basis = FeatureBasis::linear_decay(1.0, 1);
  auto s = build_sample_set(p1, 3, 1, 5);
  auto c1 = assemble(p1, basis, s);
  auto c3 = assemble(p3, basis, s);
  CHECK((c3.b - 3 * c1.b).norm() < 1e-14);
  for (int i = 0; i < c1.n(); ++i) CHECK(c1.A(i, 0) == -1.0);
}

TEST_CASE("dimension mismatch names the sample") {
  const auto problem = double_integrator_problem();
  auto basis = FeatureBasis::sine_quadratic(2, 1.0);
  auto s = build_sample_set(problem, 1, 3, 1);
  s.triples[2].x = Vec::Zero(3);
  try {
    assemble(problem, basis, s);
    FAIL("expected AssemblyError");
  } catch (const AssemblyError& e) {
    CHECK(e.sample() == 2);
  }
}
