#include "hjb/kernels.hpp"

#include <cmath>
#include <sstream>

#include "hjb/errors.hpp"

namespace hjb {

namespace {

Vec stack(const Sample& s) {
  Vec y(1 + s.x.size() + s.u.size());
  y(0) = s.t;
  y.segment(1, s.x.size()) = s.x;
  y.tail(s.u.size()) = s.u;
  return y;
}

void check_dims(const KernelSpec& spec, const Sample& s) {
  if (s.x.size() != spec.d || s.u.size() != spec.p)
    throw DomainError("kernel: sample dimensions do not match the spec");
}

// Unblocked Cholesky, only used to locate the failing pivot.
long failing_pivot(const Mat& A) {
  const auto n = A.rows();
  Mat L = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = A(j, j) - L.row(j).head(j).squaredNorm();
    if (!(diag > 0.0)) return static_cast<long>(j);
    L(j, j) = std::sqrt(diag);
    for (Eigen::Index i = j + 1; i < n; ++i)
      L(i, j) = (A(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
  return -1;
}

}  // namespace

KernelSpec KernelSpec::polynomial(int d, int p, int degree) {
  KernelSpec s;
  s.kind = KernelKind::polynomial;
  s.d = d;
  s.p = p;
  s.degree = degree;
  s.validate();
  return s;
}

KernelSpec KernelSpec::exponential(int d, int p, double sigma) {
  KernelSpec s;
  s.kind = KernelKind::exponential;
  s.d = d;
  s.p = p;
  s.sigma = sigma;
  s.validate();
  return s;
}

KernelSpec KernelSpec::control_affine(int d, int p, double u_scale,
                                      double t_scale) {
  KernelSpec s;
  s.kind = KernelKind::control_affine;
  s.d = d;
  s.p = p;
  s.u_scale = u_scale;
  s.t_scale = t_scale;
  s.validate();
  return s;
}

void KernelSpec::validate() const {
  if (d < 1 || p < 1) throw ParameterError("kernel: d and p must be >= 1");
  switch (kind) {
    case KernelKind::polynomial:
      if (degree < 1) throw ParameterError("kernel: degree must be >= 1");
      break;
    case KernelKind::exponential:
      if (!(sigma > 0.0)) throw ParameterError("kernel: sigma must be > 0");
      break;
    case KernelKind::control_affine:
      if (!(u_scale > 0.0) || !(t_scale > 0.0))
        throw ParameterError("kernel: u_scale and t_scale must be > 0");
      break;
  }
}

double kernel_eval(const KernelSpec& spec, const Sample& a, const Sample& b) {
  check_dims(spec, a);
  check_dims(spec, b);
  switch (spec.kind) {
    case KernelKind::polynomial:
      return std::pow(1.0 + stack(a).dot(stack(b)), spec.degree);
    case KernelKind::exponential:
      return std::exp(-(stack(a) - stack(b)).norm() / spec.sigma);
    case KernelKind::control_affine:
      return a.u.dot(b.u) / spec.u_scale +
             a.x.dot(b.x) * std::exp(-std::abs(a.t - b.t) / spec.t_scale);
  }
  return 0.0;
}

Mat gram(const KernelSpec& spec, std::span<const Sample> samples) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  Mat K(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i)
      K(i, j) = kernel_eval(spec, samples[i], samples[j]);
  K.triangularView<Eigen::StrictlyLower>() = K.transpose();
  return K;
}

GramFactor cholesky_jitter(const Mat& K) {
  if (K.rows() != K.cols() || K.rows() == 0)
    throw ParameterError("cholesky_jitter: K must be square and nonempty");
  const auto n = K.rows();
  for (double jitter = kGramJitter; jitter <= 1e-2 * (1.0 + 1e-9);
       jitter *= 10.0) {
    Mat A = K;
    A.diagonal().array() += jitter;
    Eigen::LLT<Mat> llt(A);
    if (llt.info() == Eigen::Success) {
      GramFactor f;
      f.K = K;
      f.R = llt.matrixU();
      f.jitter = jitter;
      return f;
    }
  }
  Mat A = K;
  A.diagonal().array() += 1e-2;
  const long pivot = failing_pivot(A);
  std::ostringstream os;
  os << "cholesky_jitter: matrix indefinite beyond jitter 1e-2 (pivot "
     << pivot << " of " << n << ")";
  throw FactorizationError(os.str(), pivot);
}

LowRankFactor pivoted_cholesky(const KernelSpec& spec,
                               std::span<const Sample> samples,
                               double rel_tol, int max_rank) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n == 0) throw ParameterError("pivoted_cholesky: no samples");
  Vec diag(n);
  for (Eigen::Index i = 0; i < n; ++i)
    diag(i) = kernel_eval(spec, samples[i], samples[i]);
  const double scale = std::max(diag.maxCoeff(), 0.0);
  const double tol = rel_tol * (scale > 0.0 ? scale : 1.0);
  const auto cap = std::min<Eigen::Index>(max_rank, n);

  LowRankFactor out;
  Mat G(n, cap);
  Eigen::Index r = 0;
  while (r < cap) {
    Eigen::Index piv;
    const double dmax = diag.maxCoeff(&piv);
    if (dmax <= tol) break;
    const double root = std::sqrt(dmax);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double kij = kernel_eval(spec, samples[i], samples[piv]);
      G(i, r) = (kij - G.row(i).head(r).dot(G.row(piv).head(r))) / root;
    }
    // Pivot rows are exact; clear roundoff so they are never chosen again.
    diag -= G.col(r).cwiseAbs2();
    diag(piv) = 0.0;
    out.pivots.push_back(static_cast<int>(piv));
    ++r;
  }
  out.G = G.leftCols(r);
  out.max_residual = diag.maxCoeff();
  out.converged = out.max_residual <= tol;
  return out;
}

}  // namespace hjb
