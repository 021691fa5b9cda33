#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace corrscreen {

// Dense row-major matrix. Used for small systems, materialized covariance
// matrices, and sampled predictor blocks; not a general linear algebra type.
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

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Gaussian elimination with partial pivoting for the tiny systems that define
// the adversarial coefficient constructions. Throws std::invalid_argument on
// shape errors and std::runtime_error naming the pivot step when a pivot
// falls below 1e-12 times the largest row norm of the input.
std::vector<double> solve_linear_system(const Matrix& a, const std::vector<double>& b);

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Throws std::runtime_error naming the failing row when the matrix is not
// positive definite to working precision.
Matrix cholesky_factor(const Matrix& a);

// Largest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
// O(n^3) per sweep; intended for oracle-sized matrices.
double largest_eigenvalue_symmetric(const Matrix& a);

}  // namespace corrscreen
