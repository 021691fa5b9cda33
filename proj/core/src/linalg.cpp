#include "corrscreen/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace corrscreen {

namespace {

constexpr std::size_t kMaxSolveDim = 64;
constexpr double kPivotRelTol = 1e-12;

double max_row_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row(i)) s = std::max(s, std::abs(v));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace

std::vector<double> solve_linear_system(const Matrix& a, const std::vector<double>& b) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) {
    throw std::invalid_argument("solve_linear_system: matrix must be square and nonempty");
  }
  if (n > kMaxSolveDim) {
    throw std::invalid_argument("solve_linear_system: dimension " + std::to_string(n) +
                                " exceeds the supported limit of " + std::to_string(kMaxSolveDim));
  }
  if (b.size() != n) {
    throw std::invalid_argument("solve_linear_system: right-hand side has wrong length");
  }

  Matrix work = a;
  std::vector<double> rhs = b;
  const double tol = kPivotRelTol * max_row_norm(a);

  for (std::size_t step = 0; step < n; ++step) {
    std::size_t pivot_row = step;
    double pivot_mag = std::abs(work(step, step));
    for (std::size_t r = step + 1; r < n; ++r) {
      const double mag = std::abs(work(r, step));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = r;
      }
    }
    if (pivot_mag <= tol) {
      throw std::runtime_error("solve_linear_system: singular to working precision at pivot step " +
                               std::to_string(step + 1) + " (best pivot " + std::to_string(pivot_mag) +
                               ")");
    }
    if (pivot_row != step) {
      for (std::size_t c = step; c < n; ++c) std::swap(work(step, c), work(pivot_row, c));
      std::swap(rhs[step], rhs[pivot_row]);
    }
    const double pivot = work(step, step);
    for (std::size_t r = step + 1; r < n; ++r) {
      const double factor = work(r, step) / pivot;
      if (factor == 0.0) continue;
      work(r, step) = 0.0;
      for (std::size_t c = step + 1; c < n; ++c) work(r, c) -= factor * work(step, c);
      rhs[r] -= factor * rhs[step];
    }
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= work(i, c) * x[c];
    x[i] = s / work(i, i);
  }
  return x;
}

Matrix cholesky_factor(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) {
    throw std::invalid_argument("cholesky_factor: matrix must be square and nonempty");
  }
  Matrix l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw std::runtime_error("cholesky_factor: matrix is not positive definite (row " +
                               std::to_string(j + 1) + ")");
    }
    const double diag = std::sqrt(d);
    l(j, j) = diag;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / diag;
    }
  }
  return l;
}

double largest_eigenvalue_symmetric(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) {
    throw std::invalid_argument("largest_eigenvalue_symmetric: matrix must be square and nonempty");
  }
  if (n == 1) return a(0, 0);

  Matrix m = a;
  // Cyclic Jacobi: sweep upper triangle, rotating away each off-diagonal
  // entry, until the off-diagonal mass is negligible relative to the diagonal.
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(m(i, i)));
  diag_scale = std::max(diag_scale, 1e-300);

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * m(i, j) * m(i, j);
    if (std::sqrt(off) <= 1e-14 * n * diag_scale) break;

    for (std::size_t p = 0; p < n - 1; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = m(p, p);
        const double aqq = m(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }

  double best = m(0, 0);
  for (std::size_t i = 1; i < n; ++i) best = std::max(best, m(i, i));
  return best;
}

}  // namespace corrscreen
