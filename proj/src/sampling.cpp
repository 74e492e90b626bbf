#include "hjb/sampling.hpp"

#include <array>
#include <cstdint>

#include "hjb/errors.hpp"

namespace hjb {

namespace {

constexpr int kSobolBits = 32;
constexpr int kMaxSobolDim = 10;

struct Primitive {
  int degree;
  std::uint32_t coeffs;
  std::array<std::uint32_t, 5> m;
};

// Joe & Kuo (new-joe-kuo-6.21201), dimensions 2..10.
constexpr std::array<Primitive, kMaxSobolDim - 1> kJoeKuo{{
    {1, 0, {1, 0, 0, 0, 0}},
    {2, 1, {1, 3, 0, 0, 0}},
    {3, 1, {1, 3, 1, 0, 0}},
    {3, 2, {1, 1, 1, 0, 0}},
    {4, 1, {1, 1, 3, 3, 0}},
    {4, 4, {1, 3, 5, 13, 0}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
}};

std::array<std::uint32_t, kSobolBits> direction_numbers(int dim_index) {
  std::array<std::uint32_t, kSobolBits> v{};
  if (dim_index == 0) {
    for (int k = 0; k < kSobolBits; ++k) v[k] = 1u << (kSobolBits - 1 - k);
    return v;
  }
  const Primitive& pr = kJoeKuo[dim_index - 1];
  const int s = pr.degree;
  for (int k = 0; k < s && k < kSobolBits; ++k)
    v[k] = pr.m[k] << (kSobolBits - 1 - k);
  for (int k = s; k < kSobolBits; ++k) {
    std::uint32_t vk = v[k - s] ^ (v[k - s] >> s);
    for (int j = 1; j < s; ++j)
      if ((pr.coeffs >> (s - 1 - j)) & 1u) vk ^= v[k - j];
    v[k] = vk;
  }
  return v;
}

}  // namespace

std::vector<Vec> sobol_points(int dim, int count, const Box& box) {
  if (dim < 1 || dim > kMaxSobolDim)
    throw ParameterError("sobol_points: dimension must be in [1, 10]");
  if (count < 1) throw ParameterError("sobol_points: count must be >= 1");
  if (box.dim() != dim) throw ParameterError("sobol_points: box dimension");

  std::vector<std::array<std::uint32_t, kSobolBits>> dirs;
  for (int j = 0; j < dim; ++j) dirs.push_back(direction_numbers(j));

  std::vector<std::uint32_t> state(dim, 0u);
  std::vector<Vec> out;
  out.reserve(count);
  constexpr double kScale = 1.0 / 4294967296.0;  // 2^-32
  // Gray-code order; index i produces point i, point 0 (all zeros) skipped.
  for (std::uint32_t i = 0; static_cast<int>(out.size()) < count; ++i) {
    int c = 0;
    while ((i >> c) & 1u) ++c;
    for (int j = 0; j < dim; ++j) state[j] ^= dirs[j][c];
    Vec p(dim);
    for (int j = 0; j < dim; ++j)
      p(j) = box.lo(j) + (box.hi(j) - box.lo(j)) * (state[j] * kScale);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<double> uniform_grid(int count, double lo, double hi) {
  if (count < 1) throw ParameterError("uniform_grid: count must be >= 1");
  if (count == 1) return {0.5 * (lo + hi)};
  std::vector<double> out(count);
  for (int k = 0; k < count; ++k)
    out[k] = lo + (hi - lo) * static_cast<double>(k) / (count - 1);
  out.back() = hi;
  return out;
}

SampleSet build_sample_set(const ControlProblem& problem, int n_t, int n_x,
                           int n_u) {
  if (n_t < 1 || n_x < 1 || n_u < 1)
    throw ParameterError("build_sample_set: counts must be >= 1");
  const auto times = uniform_grid(n_t, 0.0, problem.T);
  const auto states = sobol_points(problem.d, n_x, problem.state_box);
  std::vector<Vec> controls;
  if (problem.p == 1) {
    for (double u : uniform_grid(n_u, problem.control_box.lo(0),
                                 problem.control_box.hi(0)))
      controls.push_back(Vec::Constant(1, u));
  } else {
    controls = sobol_points(problem.p, n_u, problem.control_box);
  }

  SampleSet set;
  set.n_t = n_t;
  set.n_x = n_x;
  set.n_u = n_u;
  set.triples.reserve(static_cast<std::size_t>(n_t) * n_x * n_u);
  for (double t : times)
    for (const Vec& x : states)
      for (const Vec& u : controls) set.triples.push_back({t, x, u});
  return set;
}

}  // namespace hjb
