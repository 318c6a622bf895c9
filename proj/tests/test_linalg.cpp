#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "axon/matrix.hpp"
#include "axon/qr.hpp"
#include "axon/rng.hpp"

using axon::Rng;
using axon::linalg::Matrix;
using axon::linalg::OrthoBasis;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

double reconstruction_error(const Matrix& v, const OrthoBasis& basis) {
  // Direct multiplication oracle: rebuild Q R entry by entry.
  const Matrix qr = axon::linalg::matmul(basis.Q, basis.R);
  double diff_sq = 0.0;
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t j = 0; j < v.cols(); ++j) {
      const double d = qr(i, j) - v(i, j);
      diff_sq += d * d;
    }
  return std::sqrt(diff_sq) / axon::linalg::frobenius_norm(v);
}

}  // namespace

TEST_CASE("thin_qr of the identity is the identity") {
  const Matrix v = Matrix::identity(3);
  const auto basis = axon::linalg::thin_qr(v);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(basis.Q(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-15));
      CHECK(basis.R(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-15));
    }
}

TEST_CASE("thin_qr with orthogonal columns scales them to unit length") {
  Matrix v(3, 2);
  v(0, 0) = 2.0;
  v(1, 1) = 3.0;
  const auto basis = axon::linalg::thin_qr(v);
  CHECK(basis.Q(0, 0) == Catch::Approx(1.0));
  CHECK(basis.Q(1, 1) == Catch::Approx(1.0));
  CHECK(basis.Q(2, 0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(basis.Q(2, 1) == Catch::Approx(0.0).margin(1e-15));
  CHECK(basis.R(0, 0) == Catch::Approx(2.0));
  CHECK(basis.R(1, 1) == Catch::Approx(3.0));
  CHECK(basis.R(0, 1) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("thin_qr reconstructs random well-conditioned matrices") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix v = random_matrix(100, 4, rng);
    const auto basis = axon::linalg::thin_qr(v);
    CHECK(reconstruction_error(v, basis) <= 1e-12);
    CHECK(axon::linalg::orthonormality_error(basis.Q) <= axon::linalg::kTolOrtho);
    for (std::size_t j = 0; j < 4; ++j) CHECK(basis.R(j, j) > 0.0);
  }
}

TEST_CASE("thin_qr rejects rank-deficient input") {
  Matrix v(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    v(i, 0) = 1.0;
    v(i, 1) = 1.0;  // duplicate column
  }
  CHECK_THROWS_AS(axon::linalg::thin_qr(v), axon::RankDeficient);
}

TEST_CASE("project_residual removes the spanned component") {
  SECTION("y in span gives zero") {
    Rng rng(3);
    const Matrix v = random_matrix(50, 3, rng);
    const auto basis = axon::linalg::thin_qr(v);
    std::vector<double> coeff{1.0, -2.0, 0.5};
    const std::vector<double> y = axon::linalg::matvec(basis.Q, coeff);
    const auto r = axon::linalg::project_residual(basis.Q, y);
    CHECK(axon::linalg::norm2(r) <= 1e-12 * axon::linalg::norm2(y));
  }
  SECTION("empty basis is the identity") {
    const Matrix q(3, 0);
    const std::vector<double> y{1.0, 2.0, 3.0};
    const auto r = axon::linalg::project_residual(q, y);
    CHECK(r == y);
  }
  SECTION("coordinate projection") {
    Matrix q(3, 1);
    q(0, 0) = 1.0;
    const std::vector<double> y{1.0, 2.0, 3.0};
    const auto r = axon::linalg::project_residual(q, y);
    CHECK(r[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(r[1] == Catch::Approx(2.0));
    CHECK(r[2] == Catch::Approx(3.0));
  }
}

TEST_CASE("project_residual is idempotent") {
  Rng rng(11);
  const Matrix v = random_matrix(80, 5, rng);
  const auto basis = axon::linalg::thin_qr(v);
  std::vector<double> y(80);
  for (auto& x : y) x = rng.normal();
  const auto r1 = axon::linalg::project_residual(basis.Q, y);
  const auto r2 = axon::linalg::project_residual(basis.Q, r1);
  const double y_norm = axon::linalg::norm2(y);
  for (std::size_t i = 0; i < y.size(); ++i)
    CHECK(std::abs(r2[i] - r1[i]) <= 1e-12 * y_norm);
}

TEST_CASE("gs_append handles the canonical cases") {
  SECTION("existing column is degenerate") {
    Rng rng(5);
    const Matrix v = random_matrix(30, 2, rng);
    auto basis = axon::linalg::thin_qr(v);
    const std::vector<double> q1 = basis.Q.col(0);
    CHECK_THROWS_AS(axon::linalg::gs_append(basis, q1),
                    axon::DegenerateDirection);
    CHECK(basis.Q.cols() == 2);  // untouched on failure
  }
  SECTION("empty basis only normalizes") {
    OrthoBasis basis{Matrix(2, 0), Matrix()};
    const std::vector<double> phi{3.0, 4.0};
    const auto gs = axon::linalg::gs_append(basis, phi);
    CHECK(gs.alpha.empty());
    CHECK(gs.beta == Catch::Approx(5.0));
    CHECK(gs.q[0] == Catch::Approx(0.6));
    CHECK(gs.q[1] == Catch::Approx(0.8));
    CHECK(basis.Q.cols() == 1);
  }
  SECTION("one coordinate column") {
    Matrix q(2, 1);
    q(0, 0) = 1.0;
    OrthoBasis basis{q, Matrix()};
    const std::vector<double> phi{1.0, 1.0};
    const auto gs = axon::linalg::gs_append(basis, phi);
    REQUIRE(gs.alpha.size() == 1);
    CHECK(gs.alpha[0] == Catch::Approx(1.0));
    CHECK(gs.beta == Catch::Approx(1.0));
    CHECK(gs.q[0] == Catch::Approx(0.0).margin(1e-15));
    CHECK(gs.q[1] == Catch::Approx(1.0));
  }
}

TEST_CASE("gs_append keeps the basis orthonormal over many appends") {
  // Correlated candidates (powers and shifts of a smooth profile) stress the
  // re-orthogonalization more than independent noise would.
  const std::size_t n = 500;
  Rng rng(17);
  Matrix v(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    v(i, 0) = 1.0;
    v(i, 1) = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  auto basis = axon::linalg::thin_qr(v);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(v(i, 1)) + rng.normal();
  double last_residual = axon::linalg::norm2(
      axon::linalg::project_residual(basis.Q, y));
  const double y_norm = axon::linalg::norm2(y);
  for (int step = 0; step < 62; ++step) {
    std::vector<double> phi(n);
    const double freq = 0.5 + 0.25 * static_cast<double>(step);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = v(i, 1);
      phi[i] = std::max(0.0, std::sin(freq * x) + 0.01 * rng.normal());
    }
    try {
      axon::linalg::gs_append(basis, phi);
    } catch (const axon::DegenerateDirection&) {
      continue;
    }
    CHECK(axon::linalg::orthonormality_error(basis.Q) <= axon::linalg::kTolOrtho);
    const double residual = axon::linalg::norm2(
        axon::linalg::project_residual(basis.Q, y));
    CHECK(residual <= last_residual + 1e-12 * y_norm);
    last_residual = residual;
  }
  CHECK(basis.Q.cols() >= 32);
}

TEST_CASE("triangular solves invert R") {
  Rng rng(23);
  Matrix r(4, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    r(i, i) = 1.0 + std::abs(rng.normal());
    for (std::size_t j = i + 1; j < 4; ++j) r(i, j) = rng.normal();
  }
  std::vector<double> x{1.0, -2.0, 3.0, 0.5};
  const auto b = axon::linalg::matvec(r, x);
  const auto solved = axon::linalg::solve_upper(r, b);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(solved[i] == Catch::Approx(x[i]).epsilon(1e-12));

  // R^T solve: check against explicit transpose multiplication.
  std::vector<double> bt(4, 0.0);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) bt[i] += r(j, i) * x[j];
  const auto solved_t = axon::linalg::solve_upper_transposed(r, bt);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(solved_t[i] == Catch::Approx(x[i]).epsilon(1e-12));
}
