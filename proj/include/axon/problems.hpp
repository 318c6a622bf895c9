#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "axon/errors.hpp"
#include "axon/matrix.hpp"
#include "axon/rng.hpp"
#include "axon/train.hpp"

namespace axon::problems {

/// One benchmark target: a scalar function over an axis-aligned box.
struct Problem {
  std::string name;
  std::size_t d = 1;
  std::vector<double> lo, hi;  // box bounds per axis
  std::function<double(std::span<const double>)> target;
  std::vector<double> params;  // e.g. the reaction-diffusion epsilon
};

/// Closed-form solution of -eps^2 u'' + u = 1, u(0) = u(1) = 0, evaluated in
/// the overflow-safe form
///   u(x) = 1 - (e^{(x-1)/eps} + e^{-x/eps}) / (1 + e^{-1/eps}),
/// algebraically equal to 1 - cosh((x-1/2)/eps)/cosh(1/(2 eps)) and to the
/// two-coefficient exponential form, but with every exponent <= 0 so it never
/// overflows, no matter how small eps is.
inline double reaction_diffusion_solution(double eps, double x) {
  if (!(eps > 0.0))
    throw std::invalid_argument("reaction_diffusion_solution: eps must be > 0");
  if (x < 0.0 || x > 1.0)
    throw DomainError("reaction_diffusion_solution: x outside [0, 1]");
  const double a = std::exp((x - 1.0) / eps);
  const double b = std::exp(-x / eps);
  return 1.0 - (a + b) / (1.0 + std::exp(-1.0 / eps));
}

/// The benchmark catalog: x^2, sqrt(x), exp(-x), sin(20x) on [0, 1], the
/// radial norm on [-1, 1]^2, and the reaction-diffusion solution for
/// eps in {0.1, 0.01}. Names are stable CLI identifiers.
inline std::vector<Problem> catalog() {
  std::vector<Problem> list;
  auto scalar_1d = [](std::string name, std::function<double(double)> f,
                      std::vector<double> params = {}) {
    Problem p;
    p.name = std::move(name);
    p.d = 1;
    p.lo = {0.0};
    p.hi = {1.0};
    p.target = [f = std::move(f)](std::span<const double> x) { return f(x[0]); };
    p.params = std::move(params);
    return p;
  };
  list.push_back(scalar_1d("x2", [](double x) { return x * x; }));
  list.push_back(scalar_1d("sqrt", [](double x) { return std::sqrt(x); }));
  list.push_back(scalar_1d("exp", [](double x) { return std::exp(-x); }));
  list.push_back(scalar_1d("sin20", [](double x) { return std::sin(20.0 * x); }));

  Problem radial;
  radial.name = "radial2d";
  radial.d = 2;
  radial.lo = {-1.0, -1.0};
  radial.hi = {1.0, 1.0};
  radial.target = [](std::span<const double> x) {
    return std::hypot(x[0], x[1]);
  };
  list.push_back(std::move(radial));

  for (double eps : {0.1, 0.01}) {
    std::string name = eps == 0.1 ? "rd_eps0.1" : "rd_eps0.01";
    list.push_back(scalar_1d(
        std::move(name),
        [eps](double x) { return reaction_diffusion_solution(eps, x); },
        {eps}));
  }
  return list;
}

inline const Problem* find_problem(const std::vector<Problem>& list,
                                   const std::string& name) {
  for (const auto& p : list)
    if (p.name == name) return &p;
  return nullptr;
}

enum class SampleScheme { grid, random };

/// Default training-set sizes: 1000 points in 1D, a 64 x 64 tensor grid in 2D.
inline std::size_t default_train_size(std::size_t d) {
  return d == 1 ? 1000 : 4096;
}

/// Default evaluation grid: 10^5 points in 1D, 512 per axis in 2D.
inline std::size_t default_eval_grid(std::size_t d) {
  return d == 1 ? 100000 : 512;
}

/// Sample a training set. The grid scheme uses a uniform tensor grid that
/// includes the boundary (1D: n points; 2D: ceil(sqrt(n))^2 points, x-major
/// order); the random scheme draws seeded uniform points.
inline TrainingSet sample(const Problem& problem, std::size_t n,
                          SampleScheme scheme, std::uint64_t seed = 0) {
  if (n < problem.d + 2)
    throw std::invalid_argument("sample: need at least d+2 points");
  TrainingSet data;
  data.d = problem.d;
  std::vector<std::vector<double>> points;
  if (scheme == SampleScheme::random) {
    Rng rng(seed);
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x(problem.d);
      for (std::size_t s = 0; s < problem.d; ++s)
        x[s] = rng.uniform(problem.lo[s], problem.hi[s]);
      points.push_back(std::move(x));
    }
  } else if (problem.d == 1) {
    points.reserve(n);
    const double step = (problem.hi[0] - problem.lo[0]) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
      points.push_back({problem.lo[0] + static_cast<double>(i) * step});
  } else {
    const auto per_axis = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(n))));
    points.reserve(per_axis * per_axis);
    const double sx =
        (problem.hi[0] - problem.lo[0]) / static_cast<double>(per_axis - 1);
    const double sy =
        (problem.hi[1] - problem.lo[1]) / static_cast<double>(per_axis - 1);
    for (std::size_t i = 0; i < per_axis; ++i)
      for (std::size_t j = 0; j < per_axis; ++j)
        points.push_back({problem.lo[0] + static_cast<double>(i) * sx,
                          problem.lo[1] + static_cast<double>(j) * sy});
  }
  data.X = linalg::Matrix(points.size(), problem.d);
  data.y.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t s = 0; s < problem.d; ++s) data.X(i, s) = points[i][s];
    data.y[i] = problem.target(points[i]);
  }
  return data;
}

/// Dense evaluation points for error measurement: grid_size points in 1D,
/// grid_size per axis in 2D. Independent of (and finer than) training grids.
inline std::vector<std::vector<double>> eval_points(const Problem& problem,
                                                    std::size_t grid_size) {
  std::vector<std::vector<double>> pts;
  if (problem.d == 1) {
    pts.reserve(grid_size);
    const double step =
        (problem.hi[0] - problem.lo[0]) / static_cast<double>(grid_size - 1);
    for (std::size_t i = 0; i < grid_size; ++i)
      pts.push_back({problem.lo[0] + static_cast<double>(i) * step});
  } else {
    pts.reserve(grid_size * grid_size);
    const double sx =
        (problem.hi[0] - problem.lo[0]) / static_cast<double>(grid_size - 1);
    const double sy =
        (problem.hi[1] - problem.lo[1]) / static_cast<double>(grid_size - 1);
    for (std::size_t i = 0; i < grid_size; ++i)
      for (std::size_t j = 0; j < grid_size; ++j)
        pts.push_back({problem.lo[0] + static_cast<double>(i) * sx,
                       problem.lo[1] + static_cast<double>(j) * sy});
  }
  return pts;
}

/// Relative L2 error |f - predict| / |f| over the dense evaluation grid.
inline double rel_l2_error(
    const std::function<double(std::span<const double>)>& predict,
    const Problem& problem, std::size_t eval_grid_size) {
  const auto pts = eval_points(problem, eval_grid_size);
  double err_sq = 0.0, ref_sq = 0.0;
  for (const auto& x : pts) {
    const double f = problem.target(x);
    const double diff = f - predict(x);
    err_sq += diff * diff;
    ref_sq += f * f;
  }
  if (ref_sq == 0.0)
    throw ZeroNorm("rel_l2_error: target is zero on the evaluation grid");
  return std::sqrt(err_sq / ref_sq);
}

}  // namespace axon::problems
