#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "axon/errors.hpp"

namespace axon::yarotsky {

/// The tent map: 2x on [0, 1/2), 2(1-x) on [1/2, 1], 0 elsewhere. On [0, 1]
/// it equals the one-layer ReLU form 2 relu(x) - 4 relu(x - 1/2) + 2 relu(x - 1).
inline double hat(double x) {
  if (x < 0.0 || x > 1.0) return 0.0;
  return x < 0.5 ? 2.0 * x : 2.0 * (1.0 - x);
}

/// s-fold composition of the tent map: a sawtooth with 2^{s-1} teeth.
inline double sawtooth(double x, std::size_t s) {
  for (std::size_t i = 0; i < s; ++i) x = hat(x);
  return x;
}

/// Depth-m approximant of x^2 on [0, 1]: f_m(x) = x - sum_{s=1}^m g_s(x)/4^s,
/// the piecewise-linear interpolant of x^2 on the 2^m-step dyadic grid, with
/// max error 2^{-2m-2}.
struct YarotskyApproximant {
  std::size_t m = 1;

  explicit YarotskyApproximant(std::size_t depth) : m(depth) {
    if (m < 1) throw std::invalid_argument("YarotskyApproximant: m must be >= 1");
  }

  double operator()(double x) const {
    if (x < 0.0 || x > 1.0)
      throw DomainError("YarotskyApproximant: x outside [0, 1]");
    double value = x;
    double g = x;
    double scale = 1.0;
    for (std::size_t s = 1; s <= m; ++s) {
      g = hat(g);        // g_s from g_{s-1}
      scale *= 0.25;
      value -= scale * g;
    }
    return value;
  }
};

inline double f_m(const YarotskyApproximant& approx, double x) {
  return approx(x);
}

struct BoundRow {
  std::size_t m = 0;
  double bound = 0.0;      // 2^{-2m-2}
  double max_error = 0.0;  // dense-grid max |x^2 - f_m(x)|
};

/// Max-error table of f_m against x^2 for m = 1..m_max over a uniform grid.
/// The grid must be fine enough to contain the dyadic segment midpoints where
/// the error peaks, hence the 2^{m_max+2}+1 requirement.
inline std::vector<BoundRow> verify_bound(std::size_t m_max, std::size_t grid) {
  if (m_max < 1) throw std::invalid_argument("verify_bound: m_max must be >= 1");
  const std::size_t need = (std::size_t{1} << (m_max + 2)) + 1;
  if (grid < need)
    throw std::invalid_argument("verify_bound: grid must be >= 2^(m_max+2)+1");

  std::vector<BoundRow> table(m_max);
  for (std::size_t s = 1; s <= m_max; ++s) {
    table[s - 1].m = s;
    table[s - 1].bound = std::pow(2.0, -2.0 * static_cast<double>(s) - 2.0);
  }
  const double step = 1.0 / static_cast<double>(grid - 1);
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = static_cast<double>(i) * step;
    double value = x;
    double g = x;
    double scale = 1.0;
    for (std::size_t s = 1; s <= m_max; ++s) {
      g = hat(g);
      scale *= 0.25;
      value -= scale * g;
      const double err = std::abs(x * x - value);
      if (err > table[s - 1].max_error) table[s - 1].max_error = err;
    }
  }
  return table;
}

/// The construction's per-neuron basis functions {x, g_1, ..., g_m}; the
/// combination with coefficients (1, -1/4, ..., -4^{-m}) reproduces f_m.
struct ReferenceBasis {
  std::size_t m = 1;

  std::size_t count() const { return m + 1; }

  std::vector<double> values(double x) const {
    std::vector<double> v;
    v.reserve(m + 1);
    v.push_back(x);
    double g = x;
    for (std::size_t s = 1; s <= m; ++s) {
      g = hat(g);
      v.push_back(g);
    }
    return v;
  }

  std::vector<double> coefficients() const {
    std::vector<double> c;
    c.reserve(m + 1);
    c.push_back(1.0);
    double scale = 1.0;
    for (std::size_t s = 1; s <= m; ++s) {
      scale *= 0.25;
      c.push_back(-scale);
    }
    return c;
  }
};

inline ReferenceBasis as_reference_basis(std::size_t m) {
  if (m < 1) throw std::invalid_argument("as_reference_basis: m must be >= 1");
  return ReferenceBasis{m};
}

}  // namespace axon::yarotsky
