#include "test_support.hpp"

#include <cmath>
#include <stdexcept>

namespace hjb::testing {

RandomInstance random_instance(std::mt19937_64& rng, int n, int m, int q) {
  std::normal_distribution<double> N(0.0, 1.0);
  RandomInstance out;
  out.cs.A = Mat::NullaryExpr(n, m, [&] { return N(rng); });
  out.cs.b = Vec::NullaryExpr(n, [&] { return N(rng); });
  out.cs.c = Vec::NullaryExpr(m, [&] { return N(rng); });
  out.cs.C = N(rng);
  out.emb = Embedding::dense(Mat::NullaryExpr(n, q, [&] { return N(rng); }));
  return out;
}

Vec random_feasible_alpha(std::mt19937_64& rng, int n, double scale) {
  std::uniform_real_distribution<double> U(0.1, 1.0);
  return Vec::NullaryExpr(n, [&] { return scale * U(rng); });
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                double rel) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel * (1.0 + std::abs(x(i)));
    Vec xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x,
                double rel) {
  const Vec f0 = f(x);
  Mat J(f0.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = rel * (1.0 + std::abs(x(j)));
    Vec xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return J;
}

double max_rel_error(const Mat& a, const Mat& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) /
                                  std::max(1.0, std::abs(b(i, j))));
  return worst;
}

namespace {

// Symmetric basis E_k: E_aa, and E_ab + E_ba for a < b.
struct SymBasis {
  int q;
  std::vector<std::pair<int, int>> idx;
  explicit SymBasis(int q_) : q(q_) {
    for (int a = 0; a < q; ++a)
      for (int b = a; b < q; ++b) idx.emplace_back(a, b);
  }
  int size() const { return static_cast<int>(idx.size()); }
  Mat to_matrix(const Vec& z) const {
    Mat B = Mat::Zero(q, q);
    for (int k = 0; k < size(); ++k) {
      const auto [a, b] = idx[k];
      B(a, b) += z(k);
      if (a != b) B(b, a) += z(k);
    }
    return B;
  }
  // <E_k, X> for symmetric X.
  Vec inner(const Mat& X) const {
    Vec out(size());
    for (int k = 0; k < size(); ++k) {
      const auto [a, b] = idx[k];
      out(k) = a == b ? X(a, a) : 2.0 * X(a, b);
    }
    return out;
  }
};

}  // namespace

PrimalSolution reference_primal_solve(const ConstraintSystem& cs,
                                      const Mat& phi, double lambda,
                                      double lambda_theta, double gamma,
                                      double epsilon) {
  const int n = cs.n(), m = cs.m(), q = static_cast<int>(phi.cols());
  const SymBasis sb(q);
  const int k = sb.size();
  const int dim = m + k;

  // Residual r = b + [A, -G] z, G_ik = Phi_i' E_k Phi_i.
  Mat G(n, k);
  for (int i = 0; i < n; ++i) {
    const Vec p = phi.row(i).transpose();
    G.row(i) = sb.inner(p * p.transpose()).transpose();
  }
  Mat L(n, dim);
  L << cs.A, -G;
  const Vec trace = sb.inner(Mat::Identity(q, q));

  auto objective = [&](const Vec& z, double eps, bool& ok) {
    const Mat B = sb.to_matrix(z.tail(k));
    Eigen::LLT<Mat> llt(B);
    ok = llt.info() == Eigen::Success;
    if (!ok) return 0.0;
    const double logdet =
        2.0 * llt.matrixLLT().diagonal().array().log().sum();
    const Vec r = cs.b + L * z;
    return cs.c.dot(z.head(m)) - lambda * trace.dot(z.tail(k)) -
           lambda_theta * z.head(m).squaredNorm() - gamma * r.squaredNorm() +
           eps * logdet;
  };

  Vec z = Vec::Zero(dim);
  z.tail(k) = sb.inner(Mat::Identity(q, q)).cwiseMin(1.0);  // B = I
  PrimalSolution out;

  // Newton with Armijo backtracking at a fixed barrier weight.
  auto newton = [&](double eps) {
    bool ok = true;
    double J = objective(z, eps, ok);
    for (int it = 0; it < 500; ++it, ++out.iterations) {
      const Mat B = sb.to_matrix(z.tail(k));
      const Mat Binv = B.inverse();
      const Vec r = cs.b + L * z;
      Vec g = -2.0 * gamma * L.transpose() * r;
      g.head(m) += cs.c - 2.0 * lambda_theta * z.head(m);
      g.tail(k) += -lambda * trace + eps * sb.inner(Binv);
      Mat H = -2.0 * gamma * L.transpose() * L;
      H.topLeftCorner(m, m).diagonal().array() -= 2.0 * lambda_theta;
      for (int a = 0; a < k; ++a) {
        Mat Ea = sb.to_matrix(Vec::Unit(k, a));
        const Mat BE = Binv * Ea * Binv;
        H.col(m + a).tail(k) -= eps * sb.inner(BE);
      }
      out.gradient_norm = g.norm();
      const Vec dir = (-H).ldlt().solve(g);
      const double dec2 = g.dot(dir);
      if (dec2 < 1e-18 * (1.0 + std::abs(J))) return;
      double step = 1.0;
      for (;; step *= 0.5) {
        if (step < 1e-14) return;  // at roundoff level
        const Vec cand = z + step * dir;
        const double Jc = objective(cand, eps, ok);
        if (ok && Jc >= J + 1e-4 * step * dec2) {
          z = cand;
          J = Jc;
          break;
        }
      }
    }
    throw std::runtime_error("reference primal: no convergence");
  };

  // Barrier continuation from a comfortable weight down to epsilon.
  double eps = std::max(epsilon, 1e-1);
  for (;;) {
    newton(eps);
    if (eps == epsilon) break;
    eps = std::max(epsilon, eps * 0.1);
  }
  out.theta = z.head(m);
  out.B = sb.to_matrix(z.tail(k));
  out.delta = cs.b + cs.A * out.theta - G * z.tail(k);
  return out;
}

}  // namespace hjb::testing
