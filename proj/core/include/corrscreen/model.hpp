#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <vector>

#include "corrscreen/covariance.hpp"

namespace corrscreen {

// Sparse linear-Gaussian data-generating law:
//   y = intercept + sum_i beta_i x_i + noise,  x ~ N(0, R),  noise ~ N(0, sd^2).
// Coefficient indices are 1-based, matching the variable numbering used
// everywhere in reports. Immutable after construction.
class RegressionModel {
 public:
  RegressionModel(double intercept, std::map<int, double> coefficients, double noise_sd,
                  CovarianceStructure covariance);

  double intercept() const { return intercept_; }
  const std::map<int, double>& coefficients() const { return coefficients_; }
  double noise_sd() const { return noise_sd_; }
  const CovarianceStructure& covariance() const { return covariance_; }
  std::size_t dimension() const { return covariance_.dimension(); }

  // Sorted 1-based indices of the nonzero coefficients.
  std::vector<std::size_t> support() const;

 private:
  double intercept_;
  std::map<int, double> coefficients_;
  double noise_sd_;
  CovarianceStructure covariance_;
};

// Population moments of (y, x) under a RegressionModel. cov_y_x excludes
// nothing: it is Cov(y, x_i) under the full law (noise is independent of x,
// so it contributes only to var_y).
struct MarginalMoments {
  std::vector<double> cov_y_x;  // size p
  double var_y = 0.0;
  std::vector<double> cor_y_x;  // cov_y_x / sqrt(var_y); predictors have unit variance
};

// Computes cov_y_x = R beta in O(p * |support|) via the structure's entry
// rule, var_y = beta' R beta + sd^2, and the correlations. Structured kinds
// are never materialized.
MarginalMoments marginal_moments(const RegressionModel& model);

// Coefficients for the AR(1) construction: beta_1 and beta_3 are chosen so
// that Cov(y, x_1) = 0 while Cov(y, x_2) = a != 0. Solves
//   [ 1  rho^2 ] [beta1]   [0]
//   [ rho  rho ] [beta3] = [a].
struct Ar1Coefficients {
  double beta1;
  double beta3;
};
Ar1Coefficients solve_ar1_beta(double rho, double a);

// Coefficients for the equicorrelated construction: beta_1..beta_5 solve the
// 5x5 system whose first four rows pin Cov(y, x_i) = important_cov for
// i <= 4 and whose all-rho fifth row pins Cov(y, x_j) = unimportant_cov for
// every j > 5. Throws the solver's singularity error when the system
// degenerates (e.g. rho = 0).
std::array<double, 5> solve_equi_beta(double rho, double important_cov = 1.0,
                                      double unimportant_cov = 4.0);

}  // namespace corrscreen
