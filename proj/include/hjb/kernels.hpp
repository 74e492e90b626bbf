#pragma once

// Positive-definite kernels on (t, x, u) triples and Gram factorizations.

#include <span>
#include <vector>

#include "hjb/ocp.hpp"

namespace hjb {

/// One sampled point (t, x, u).
struct Sample {
  double t = 0.0;
  Vec x;
  Vec u;
};

enum class KernelKind { polynomial, exponential, control_affine };

struct KernelSpec {
  KernelKind kind = KernelKind::control_affine;
  int d = 2;
  int p = 1;
  /// polynomial: (1 + y'y')^degree
  int degree = 2;
  /// exponential: exp(-|y - y'| / sigma)
  double sigma = 1.0;
  /// control_affine: <u,u'>/u_scale + <x,x'> exp(-|t-t'|/t_scale)
  double u_scale = 100.0;
  double t_scale = 1.0;

  static KernelSpec polynomial(int d, int p, int degree);
  static KernelSpec exponential(int d, int p, double sigma);
  static KernelSpec control_affine(int d, int p, double u_scale = 100.0,
                                   double t_scale = 1.0);

  void validate() const;
};

double kernel_eval(const KernelSpec& spec, const Sample& a, const Sample& b);

/// Symmetric n x n Gram matrix (upper triangle computed, then mirrored).
Mat gram(const KernelSpec& spec, std::span<const Sample> samples);

/// K + jitter I = R'R with R upper triangular.
struct GramFactor {
  Mat K;
  Mat R;
  double jitter = 0.0;

  /// Phi = R', whose row i is the embedding of sample i.
  Mat features() const { return R.transpose(); }
};

inline constexpr double kGramJitter = 1e-8;

/// Adds kGramJitter I and factorizes, escalating the jitter by 10x up to
/// 1e-2 if needed. Throws FactorizationError with the failing pivot.
GramFactor cholesky_jitter(const Mat& K);

/// K ~ G G' by diagonal-pivoted Cholesky, stopping once every residual
/// diagonal entry is below rel_tol * max diag(K) or max_rank is reached.
struct LowRankFactor {
  Mat G;
  std::vector<int> pivots;
  /// Largest residual diagonal entry at termination.
  double max_residual = 0.0;
  bool converged = false;
};

LowRankFactor pivoted_cholesky(const KernelSpec& spec,
                               std::span<const Sample> samples,
                               double rel_tol, int max_rank);

}  // namespace hjb
