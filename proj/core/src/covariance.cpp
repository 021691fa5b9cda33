#include "corrscreen/covariance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace corrscreen {

namespace {

constexpr std::size_t kDenseDimensionCap = 4096;

void require_dimension(std::size_t p) {
  if (p == 0) throw std::invalid_argument("covariance structure needs p >= 1");
}

void require_rho(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("correlation parameter must lie in (0,1), got " +
                                std::to_string(rho));
  }
}

}  // namespace

CovarianceStructure CovarianceStructure::ar1(double rho, std::size_t p) {
  require_dimension(p);
  require_rho(rho);
  return {CovarianceKind::kAr1, rho, p, nullptr};
}

CovarianceStructure CovarianceStructure::equicorrelated(double rho, std::size_t p) {
  require_dimension(p);
  require_rho(rho);
  return {CovarianceKind::kEquicorrelated, rho, p, nullptr};
}

CovarianceStructure CovarianceStructure::identity(std::size_t p) {
  require_dimension(p);
  return {CovarianceKind::kIdentity, 0.0, p, nullptr};
}

CovarianceStructure CovarianceStructure::dense(Matrix r) {
  const std::size_t p = r.rows();
  require_dimension(p);
  if (r.cols() != p) throw std::invalid_argument("explicit covariance matrix must be square");
  if (p > kDenseDimensionCap) {
    throw std::invalid_argument("explicit covariance matrices are capped at p <= " +
                                std::to_string(kDenseDimensionCap));
  }
  for (std::size_t i = 0; i < p; ++i) {
    if (std::abs(r(i, i) - 1.0) > 1e-12) {
      throw std::invalid_argument("explicit covariance matrix must have unit diagonal (row " +
                                  std::to_string(i + 1) + ")");
    }
    for (std::size_t j = i + 1; j < p; ++j) {
      if (std::abs(r(i, j) - r(j, i)) > 1e-12) {
        throw std::invalid_argument("explicit covariance matrix must be symmetric");
      }
    }
  }
  // PD check; the factor itself is recomputed by samplers when needed.
  try {
    cholesky_factor(r);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("explicit covariance matrix is not positive definite");
  }
  return {CovarianceKind::kDenseExplicit, 0.0, p,
          std::make_shared<const Matrix>(std::move(r))};
}

const Matrix& CovarianceStructure::dense_matrix() const {
  if (kind_ != CovarianceKind::kDenseExplicit) {
    throw std::logic_error("dense_matrix() is only available for explicit structures");
  }
  return *dense_;
}

double CovarianceStructure::entry(std::size_t i, std::size_t j) const {
  if (i < 1 || i > p_ || j < 1 || j > p_) {
    throw std::out_of_range("covariance entry index out of range: (" + std::to_string(i) + "," +
                            std::to_string(j) + ") with p = " + std::to_string(p_));
  }
  switch (kind_) {
    case CovarianceKind::kAr1: {
      const std::size_t d = i > j ? i - j : j - i;
      return std::pow(rho_, static_cast<double>(d));
    }
    case CovarianceKind::kEquicorrelated:
      return i == j ? 1.0 : rho_;
    case CovarianceKind::kIdentity:
      return i == j ? 1.0 : 0.0;
    case CovarianceKind::kDenseExplicit:
      return (*dense_)(i - 1, j - 1);
  }
  return 0.0;  // unreachable
}

double CovarianceStructure::spectral_bound() const {
  switch (kind_) {
    case CovarianceKind::kAr1:
      return (1.0 + rho_) / (1.0 - rho_);
    case CovarianceKind::kEquicorrelated:
      return 1.0 + static_cast<double>(p_ - 1) * rho_;
    case CovarianceKind::kIdentity:
      return 1.0;
    case CovarianceKind::kDenseExplicit:
      return largest_eigenvalue_symmetric(*dense_);
  }
  return 0.0;  // unreachable
}

Matrix CovarianceStructure::materialize() const {
  if (p_ > kDenseDimensionCap) {
    throw std::invalid_argument("refusing to materialize a covariance matrix with p = " +
                                std::to_string(p_) + " (cap " +
                                std::to_string(kDenseDimensionCap) + ")");
  }
  if (kind_ == CovarianceKind::kDenseExplicit) return *dense_;
  Matrix r(p_, p_);
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j < p_; ++j) r(i, j) = entry(i + 1, j + 1);
  return r;
}

CovarianceStructure CovarianceStructure::with_dimension(std::size_t p) const {
  require_dimension(p);
  if (kind_ == CovarianceKind::kDenseExplicit) {
    if (p != p_) {
      throw std::invalid_argument("explicit covariance matrices cannot be resized");
    }
    return *this;
  }
  return {kind_, rho_, p, nullptr};
}

}  // namespace corrscreen
