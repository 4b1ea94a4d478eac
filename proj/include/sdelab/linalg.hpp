#pragma once

// Small dense linear algebra for the d x d transforms (d is single digits).

#include <cstddef>
#include <span>
#include <vector>

namespace sdelab {

using Vector = std::vector<double>;

double dot(std::span<const double> x, std::span<const double> y);
double norm(std::span<const double> x);
/// Euclidean distance between two equally sized vectors.
double distance(std::span<const double> x, std::span<const double> y);

/// Unit vector e_index (zero-based) of length `dim`.
Vector unit_vector(std::size_t dim, std::size_t index);

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector column(std::size_t j) const;

  Vector apply(std::span<const double> x) const;
  /// y = this * x, writing into `y` (size rows()).
  void apply(std::span<const double> x, std::span<double> y) const;

  Matrix operator*(const Matrix& rhs) const;
  Matrix transpose() const;
  Matrix scaled(double factor) const;

  /// Square root of the sum of squared entries.
  double frobenius() const;

  /// Largest absolute entrywise difference to `other` (same shape).
  double max_abs_diff(const Matrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Orthogonal reflection A = I - 2 n n^T with A * from = to, where `from` and
/// `to` are unit vectors.  Returns the identity if they coincide to 1e-12.
Matrix householder_map(std::span<const double> from, std::span<const double> to);

}  // namespace sdelab
