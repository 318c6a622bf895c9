#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "axon/errors.hpp"
#include "axon/matrix.hpp"

namespace axon::linalg {

inline constexpr double kTolOrtho = 1e-10;   // allowed drift of Q^T Q from I
inline constexpr double kTolIndep = 1e-8;    // relative dependence threshold
inline constexpr double kTolPivot = 1e-12;   // relative rank threshold

/// Orthonormal basis of a sample-value matrix: V = Q R with Q^T Q = I and R
/// upper triangular with positive diagonal. R keeps the size of the initial
/// factorization while Q grows one column per gs_append.
struct OrthoBasis {
  Matrix Q;
  Matrix R;
};

namespace detail {

/// Householder QR, Trefethen & Bau Algorithm 10.1. Reflectors are accumulated
/// in `v`; `a` is overwritten with R in its upper triangle.
inline void householder_factorize(Matrix& a, std::vector<std::vector<double>>& v,
                                  std::span<const double> col_norms) {
  const std::size_t m = a.rows(), n = a.cols();
  v.assign(n, {});
  for (std::size_t k = 0; k < n; ++k) {
    double norm_x = 0.0;
    for (std::size_t i = k; i < m; ++i) norm_x += a(i, k) * a(i, k);
    norm_x = std::sqrt(norm_x);
    if (norm_x < kTolPivot * col_norms[k] || col_norms[k] == 0.0)
      throw RankDeficient("thin_qr: column " + std::to_string(k) +
                          " is numerically dependent on the previous ones");
    auto& vk = v[k];
    vk.resize(m - k);
    for (std::size_t i = k; i < m; ++i) vk[i - k] = a(i, k);
    vk[0] += (a(k, k) >= 0.0 ? norm_x : -norm_x);
    double norm_v = norm2(vk);
    for (auto& x : vk) x /= norm_v;
    for (std::size_t j = k; j < n; ++j) {
      double proj = 0.0;
      for (std::size_t i = k; i < m; ++i) proj += vk[i - k] * a(i, j);
      for (std::size_t i = k; i < m; ++i) a(i, j) -= 2.0 * proj * vk[i - k];
    }
  }
}

/// x := (H_0 H_1 ... H_{n-1}) x, reflectors applied in reverse.
inline void apply_q(std::span<double> x,
                    const std::vector<std::vector<double>>& v) {
  const std::size_t m = x.size(), n = v.size();
  for (std::size_t kk = 0; kk < n; ++kk) {
    const std::size_t k = n - 1 - kk;
    const auto& vk = v[k];
    double proj = 0.0;
    for (std::size_t i = k; i < m; ++i) proj += vk[i - k] * x[i];
    for (std::size_t i = k; i < m; ++i) x[i] -= 2.0 * proj * vk[i - k];
  }
}

}  // namespace detail

/// Thin QR of a full-column-rank matrix (rows >= cols). The sign convention
/// diag(R) > 0 makes the factorization unique. Throws RankDeficient when a
/// pivot falls below kTolPivot relative to its column norm.
inline OrthoBasis thin_qr(const Matrix& v_in) {
  const std::size_t m = v_in.rows(), n = v_in.cols();
  if (n == 0 || m < n)
    throw std::invalid_argument("thin_qr: need rows >= cols >= 1");

  std::vector<double> col_norms(n);
  for (std::size_t j = 0; j < n; ++j) col_norms[j] = norm2(v_in.col(j));

  Matrix a = v_in;
  std::vector<std::vector<double>> reflectors;
  detail::householder_factorize(a, reflectors, col_norms);

  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) r(i, j) = a(i, j);

  Matrix q(m, n);
  std::vector<double> e(m);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    detail::apply_q(e, reflectors);
    for (std::size_t i = 0; i < m; ++i) q(i, j) = e[i];
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) {
      for (std::size_t l = j; l < n; ++l) r(j, l) = -r(j, l);
      for (std::size_t i = 0; i < m; ++i) q(i, j) = -q(i, j);
    }
  }
  return {std::move(q), std::move(r)};
}

/// r = (I - Q Q^T) y. With zero columns this is the identity.
inline std::vector<double> project_residual(const Matrix& q,
                                            std::span<const double> y) {
  std::vector<double> r(y.begin(), y.end());
  if (q.cols() == 0) return r;
  const std::vector<double> qty = tmatvec(q, y);
  for (std::size_t i = 0; i < q.rows(); ++i)
    r[i] -= dot(q.row(i), qty);
  return r;
}

struct GsResult {
  std::vector<double> alpha;  // Q^T phi
  double beta = 0.0;          // norm of the orthogonal remainder
  std::vector<double> q;      // new unit column
};

/// Append phi to the basis: alpha = Q^T phi, q = (phi - Q alpha)/beta.
/// Classical Gram-Schmidt with one re-orthogonalization pass ("twice is
/// enough") so Q^T Q stays within kTolOrtho as the basis grows. Throws
/// DegenerateDirection when phi lies in the current span (beta below
/// kTolIndep relative to |phi|); the basis is untouched in that case.
inline GsResult gs_append(OrthoBasis& basis, std::span<const double> phi) {
  const Matrix& q_mat = basis.Q;
  const double phi_norm = norm2(phi);
  std::vector<double> alpha = tmatvec(q_mat, phi);
  std::vector<double> rem(phi.begin(), phi.end());
  for (std::size_t i = 0; i < q_mat.rows(); ++i)
    rem[i] -= dot(q_mat.row(i), alpha);
  // Second pass removes the O(eps * |phi|) residue the first one leaves.
  if (q_mat.cols() > 0) {
    const std::vector<double> alpha2 = tmatvec(q_mat, rem);
    for (std::size_t i = 0; i < q_mat.rows(); ++i)
      rem[i] -= dot(q_mat.row(i), alpha2);
    for (std::size_t j = 0; j < alpha.size(); ++j) alpha[j] += alpha2[j];
  }
  const double beta = norm2(rem);
  if (beta < kTolIndep * phi_norm || phi_norm == 0.0)
    throw DegenerateDirection(
        "gs_append: candidate lies in the span of the current basis");
  for (auto& x : rem) x /= beta;
  basis.Q.append_column(rem);
  return {std::move(alpha), beta, std::move(rem)};
}

/// Solve R x = b with R upper triangular (back substitution).
inline std::vector<double> solve_upper(const Matrix& r,
                                       std::span<const double> b) {
  const std::size_t n = r.cols();
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t ii = 0; ii < n; ++ii) {
    const std::size_t i = n - 1 - ii;
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= r(i, j) * x[j];
    x[i] /= r(i, i);
  }
  return x;
}

/// Solve R^T x = b with R upper triangular (forward substitution on the
/// transposed, lower-triangular system).
inline std::vector<double> solve_upper_transposed(const Matrix& r,
                                                  std::span<const double> b) {
  const std::size_t n = r.cols();
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) x[i] -= r(j, i) * x[j];
    x[i] /= r(i, i);
  }
  return x;
}

}  // namespace axon::linalg
