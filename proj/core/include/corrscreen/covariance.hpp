#pragma once

#include <cstddef>
#include <memory>

#include "corrscreen/linalg.hpp"

namespace corrscreen {

enum class CovarianceKind { kAr1, kEquicorrelated, kIdentity, kDenseExplicit };

// Symbolic description of the predictor correlation matrix. Structured kinds
// never materialize the matrix; entries come from the closed-form rule, so a
// structure with p = 10^6 costs nothing to hold.
class CovarianceStructure {
 public:
  // entry(i,j) = rho^|i-j|, rho in (0,1).
  static CovarianceStructure ar1(double rho, std::size_t p);
  // entry(i,j) = rho off the diagonal, 1 on it, rho in (0,1).
  static CovarianceStructure equicorrelated(double rho, std::size_t p);
  static CovarianceStructure identity(std::size_t p);
  // Explicit symmetric unit-diagonal matrix; positive definiteness is checked
  // at construction. Capped at p <= 4096 since explicit matrices exist only
  // for oracle-scale work.
  static CovarianceStructure dense(Matrix r);

  CovarianceKind kind() const { return kind_; }
  std::size_t dimension() const { return p_; }
  double rho() const { return rho_; }
  const Matrix& dense_matrix() const;

  // (i,j) entry of the correlation matrix, 1-based. Throws std::out_of_range
  // outside [1,p].
  double entry(std::size_t i, std::size_t j) const;

  // Upper bound on the largest eigenvalue: exact 1+(p-1)rho for the
  // equicorrelated kind, the analytic bound (1+rho)/(1-rho) for AR(1), 1 for
  // identity, and a numerical eigensolve for explicit matrices.
  double spectral_bound() const;

  // Dense copy of the correlation matrix for oracle use; p <= 4096.
  Matrix materialize() const;

  // Same kind and parameters, different dimension. Explicit matrices cannot
  // be resized; requesting a different p for them throws.
  CovarianceStructure with_dimension(std::size_t p) const;

 private:
  CovarianceStructure(CovarianceKind kind, double rho, std::size_t p,
                      std::shared_ptr<const Matrix> dense)
      : kind_(kind), rho_(rho), p_(p), dense_(std::move(dense)) {}

  CovarianceKind kind_;
  double rho_;
  std::size_t p_;
  std::shared_ptr<const Matrix> dense_;  // kDenseExplicit only
};

}  // namespace corrscreen
