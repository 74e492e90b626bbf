#pragma once

// Constraint sample sets: Sobol states, uniform control and time grids.

#include <vector>

#include "hjb/kernels.hpp"

namespace hjb {

/// First `count` points of the Sobol sequence (Joe-Kuo direction numbers,
/// the all-zero point skipped) mapped affinely into `box`. dim <= 10.
std::vector<Vec> sobol_points(int dim, int count, const Box& box);

/// `count` equally spaced points including both endpoints; the midpoint
/// when count == 1.
std::vector<double> uniform_grid(int count, double lo, double hi);

struct SampleSet {
  /// Enumerated t-major, then x, then u.
  std::vector<Sample> triples;
  int n_t = 0;
  int n_x = 0;
  int n_u = 0;
  int sobol_skip = 1;

  int size() const { return static_cast<int>(triples.size()); }
};

/// Cartesian product of uniform_grid(n_t, [0,T]), n_x Sobol states and n_u
/// controls (uniform grid when p == 1, Sobol points in the box otherwise).
SampleSet build_sample_set(const ControlProblem& problem, int n_t, int n_x,
                           int n_u);

}  // namespace hjb
