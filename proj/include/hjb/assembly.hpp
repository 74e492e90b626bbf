#pragma once

// Constraint data (a_i, b_i, c, C) of the subsampled program.

#include "hjb/features.hpp"
#include "hjb/sampling.hpp"

namespace hjb {

/// Which points enter the objective c' theta + C.
enum class ObjectiveMode {
  /// Average of V over every sample at its own (t, x).
  all_samples,
  /// Average of V(0, x) over the sampled states.
  initial_points,
};

/// Row i encodes  b_i + a_i' theta = H_theta(t_i, x_i, u_i) + eta Lap V.
struct ConstraintSystem {
  Mat A;  // n x m, rows a_i'
  Vec b;
  Vec c;
  double C = 0.0;
  double eta = 0.0;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(A.cols()); }

  /// b + A theta.
  Vec residuals(const Vec& theta) const { return b + A * theta; }
};

ConstraintSystem assemble(const ControlProblem& problem,
                          const FeatureBasis& basis, const SampleSet& samples,
                          double eta = 0.0,
                          ObjectiveMode mode = ObjectiveMode::all_samples);

}  // namespace hjb
