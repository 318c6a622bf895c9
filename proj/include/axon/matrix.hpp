#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace axon::linalg {

/// Dense row-major matrix of doubles. Kept deliberately small: the library
/// only needs products with tall skinny factors and column appends.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }

  std::vector<double> col(std::size_t j) const {
    std::vector<double> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
  }

  void append_column(std::span<const double> v) {
    if (rows_ == 0) rows_ = v.size();
    if (v.size() != rows_)
      throw std::invalid_argument("append_column: length mismatch");
    std::vector<double> grown(rows_ * (cols_ + 1));
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j)
        grown[i * (cols_ + 1) + j] = (*this)(i, j);
      grown[i * (cols_ + 1) + cols_] = v[i];
    }
    data_ = std::move(grown);
    ++cols_;
  }

  const std::vector<double>& data() const { return data_; }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(std::span<const double> v) {
  return std::sqrt(dot(v, v));
}

inline double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// y = A x
inline std::vector<double> matvec(const Matrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

/// y = A^T x
inline std::vector<double> tmatvec(const Matrix& a, std::span<const double> x) {
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto row = a.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += row[j] * xi;
  }
  return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline double frobenius_norm(const Matrix& a) {
  double acc = 0.0;
  for (double x : a.data()) acc += x * x;
  return std::sqrt(acc);
}

/// max_ij |(Q^T Q - I)_ij|
inline double orthonormality_error(const Matrix& q) {
  double worst = 0.0;
  for (std::size_t j = 0; j < q.cols(); ++j) {
    for (std::size_t l = j; l < q.cols(); ++l) {
      double acc = 0.0;
      for (std::size_t i = 0; i < q.rows(); ++i) acc += q(i, j) * q(i, l);
      const double target = (j == l) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(acc - target));
    }
  }
  return worst;
}

}  // namespace axon::linalg
