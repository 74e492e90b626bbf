#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hjb/errors.hpp"
#include "hjb/kernels.hpp"

using namespace hjb;

namespace {

Sample make(double t, double x1, double x2, double u) {
  Sample s;
  s.t = t;
  s.x = (Vec(2) << x1, x2).finished();
  s.u = Vec::Constant(1, u);
  return s;
}

std::vector<Sample> random_samples(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> T(0, 1), X(-1, 1), U(-10, 10);
  std::vector<Sample> out;
  for (int i = 0; i < n; ++i) out.push_back(make(T(rng), X(rng), X(rng), U(rng)));
  return out;
}

std::vector<KernelSpec> all_specs() {
  return {KernelSpec::control_affine(2, 1), KernelSpec::polynomial(2, 1, 2),
          KernelSpec::exponential(2, 1, 1.0)};
}

}  // namespace

TEST_CASE("kernel values") {
  Sample y = make(0.3, 1, 0, 10);
  CHECK(kernel_eval(KernelSpec::control_affine(2, 1), y, y) ==
        doctest::Approx(2.0).epsilon(1e-15));
  Sample z = make(0, 0, 0, 0);
  CHECK(kernel_eval(KernelSpec::polynomial(2, 1, 2), z, z) == 1.0);
  CHECK(kernel_eval(KernelSpec::exponential(2, 1, 1.0), y, y) == 1.0);
  Sample bad = y;
  bad.x = Vec::Zero(3);
  CHECK_THROWS_AS(kernel_eval(KernelSpec::control_affine(2, 1), y, bad), DomainError);
}

TEST_CASE("kernel spec validation") {
  CHECK_THROWS_AS(KernelSpec::exponential(2, 1, 0.0).validate(), ParameterError);
  CHECK_THROWS_AS(KernelSpec::polynomial(2, 1, 0).validate(), ParameterError);
  CHECK_THROWS_AS(KernelSpec::control_affine(2, 1, -1.0).validate(), ParameterError);
}

TEST_CASE("kernel symmetry") {
  std::mt19937_64 rng(1);
  for (const auto& spec : all_specs()) {
    auto s = random_samples(rng, 2000);
    double worst = 0;
    for (int i = 0; i < 1000; ++i)
      worst = std::max(worst, std::abs(kernel_eval(spec, s[2 * i], s[2 * i + 1]) -
                                       kernel_eval(spec, s[2 * i + 1], s[2 * i])));
    CHECK(worst <= 1e-14);
  }
}

TEST_CASE("gram matrices") {
  std::mt19937_64 rng(2);
  auto spec = KernelSpec::control_affine(2, 1);
  auto one = random_samples(rng, 1);
  Mat K1 = gram(spec, one);
  CHECK(K1.rows() == 1);
  CHECK(K1(0, 0) == kernel_eval(spec, one[0], one[0]));

  auto dup = random_samples(rng, 4);
  dup.push_back(dup[0]);
  Eigen::SelfAdjointEigenSolver<Mat> es(gram(KernelSpec::exponential(2, 1, 1.0), dup));
  CHECK(es.eigenvalues().minCoeff() <= 1e-10);

  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> N(1, 100);
    auto s = random_samples(rng, N(rng));
    for (const auto& sp : all_specs()) {
      Mat K = gram(sp, s);
      CHECK((K - K.transpose()).norm() == 0.0);
      Eigen::SelfAdjointEigenSolver<Mat> e(K);
      CHECK(e.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, K.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("cholesky with jitter") {
  SUBCASE("identity") {
    auto f = cholesky_jitter(Mat::Identity(3, 3));
    CHECK((f.R - std::sqrt(1 + 1e-8) * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(f.jitter == 1e-8);
  }
  SUBCASE("zero") {
    auto f = cholesky_jitter(Mat::Zero(2, 2));
    CHECK((f.R - 1e-4 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-18);
  }
  SUBCASE("random psd reconstruction") {
    std::mt19937_64 rng(4);
    auto s = random_samples(rng, 60);
    Mat K = gram(KernelSpec::control_affine(2, 1), s);
    auto f = cholesky_jitter(K);
    Mat rec = f.R.transpose() * f.R - K - f.jitter * Mat::Identity(60, 60);
    CHECK(rec.cwiseAbs().maxCoeff() < 1e-10 * K.cwiseAbs().maxCoeff());
    CHECK(f.R.diagonal().minCoeff() > 0.0);
    CHECK(f.features() == f.R.transpose());
    Mat lower = f.R.triangularView<Eigen::StrictlyLower>();
    CHECK(lower.norm() == 0.0);
  }
  SUBCASE("indefinite fails with a pivot") {
    Mat K = Mat::Identity(3, 3);
    K(2, 2) = -1.0;
    try {
      cholesky_jitter(K);
      FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
      CHECK(e.pivot() == 2);
    }
  }
}

TEST_CASE("pivoted cholesky") {
  // Five distinct times: rank <= 1 + 2 * 5.
  std::mt19937_64 rng(6);
  auto s = random_samples(rng, 300);
  for (std::size_t i = 0; i < s.size(); ++i) s[i].t = 0.25 * static_cast<double>(i % 5);
  auto spec = KernelSpec::control_affine(2, 1);
  Mat K = gram(spec, s);
  auto lr = pivoted_cholesky(spec, s, 1e-12, 300);
  CHECK(lr.converged);
  CHECK(lr.G.cols() <= 11);
  CHECK((lr.G * lr.G.transpose() - K).cwiseAbs().maxCoeff() <
        1e-9 * K.cwiseAbs().maxCoeff());
  auto capped = pivoted_cholesky(spec, s, 1e-12, 3);
  CHECK(capped.G.cols() == 3);
  CHECK_FALSE(capped.converged);
}
