#include "corrscreen/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace corrscreen {

RegressionModel::RegressionModel(double intercept, std::map<int, double> coefficients,
                                 double noise_sd, CovarianceStructure covariance)
    : intercept_(intercept),
      coefficients_(std::move(coefficients)),
      noise_sd_(noise_sd),
      covariance_(std::move(covariance)) {
  if (!(noise_sd_ >= 0.0) || !std::isfinite(noise_sd_)) {
    throw std::invalid_argument("noise_sd must be finite and non-negative");
  }
  const auto p = static_cast<long>(covariance_.dimension());
  for (const auto& [index, value] : coefficients_) {
    if (index < 1 || index > p) {
      throw std::invalid_argument("coefficient index " + std::to_string(index) +
                                  " outside [1, " + std::to_string(p) + "]");
    }
    if (value == 0.0) {
      throw std::invalid_argument("coefficient map must not contain explicit zeros (index " +
                                  std::to_string(index) + ")");
    }
    if (!std::isfinite(value)) {
      throw std::invalid_argument("coefficient at index " + std::to_string(index) +
                                  " is not finite");
    }
  }
}

std::vector<std::size_t> RegressionModel::support() const {
  std::vector<std::size_t> s;
  s.reserve(coefficients_.size());
  for (const auto& [index, value] : coefficients_) s.push_back(static_cast<std::size_t>(index));
  return s;  // std::map iterates in sorted order
}

MarginalMoments marginal_moments(const RegressionModel& model) {
  const std::size_t p = model.dimension();
  const auto& cov = model.covariance();
  MarginalMoments m;
  m.cov_y_x.assign(p, 0.0);

  for (const auto& [index, beta] : model.coefficients()) {
    const auto j = static_cast<std::size_t>(index);
    for (std::size_t i = 1; i <= p; ++i) {
      m.cov_y_x[i - 1] += beta * cov.entry(i, j);
    }
  }

  double quad = 0.0;  // beta' R beta
  for (const auto& [index, beta] : model.coefficients()) {
    quad += beta * m.cov_y_x[static_cast<std::size_t>(index) - 1];
  }
  m.var_y = quad + model.noise_sd() * model.noise_sd();

  if (!(m.var_y > 0.0)) {
    throw std::domain_error("response variance is zero; correlations are undefined");
  }
  const double sd_y = std::sqrt(m.var_y);
  m.cor_y_x.resize(p);
  for (std::size_t i = 0; i < p; ++i) m.cor_y_x[i] = m.cov_y_x[i] / sd_y;
  return m;
}

Ar1Coefficients solve_ar1_beta(double rho, double a) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("solve_ar1_beta requires rho in (0,1), got " + std::to_string(rho));
  }
  if (a == 0.0) {
    throw std::invalid_argument("solve_ar1_beta requires a != 0; a = 0 collapses to beta = 0");
  }
  Matrix system(2, 2);
  system(0, 0) = 1.0;
  system(0, 1) = rho * rho;
  system(1, 0) = rho;
  system(1, 1) = rho;
  const std::vector<double> x = solve_linear_system(system, {0.0, a});
  return {x[0], x[1]};
}

std::array<double, 5> solve_equi_beta(double rho, double important_cov, double unimportant_cov) {
  // Unit diagonal with rho elsewhere in rows 1-4; row 5 is all rho, including
  // its diagonal, which encodes the covariance seen by every variable outside
  // the support.
  Matrix system(5, 5, rho);
  for (std::size_t i = 0; i < 4; ++i) system(i, i) = 1.0;
  const std::vector<double> rhs = {important_cov, important_cov, important_cov, important_cov,
                                   unimportant_cov};
  const std::vector<double> x = solve_linear_system(system, rhs);
  return {x[0], x[1], x[2], x[3], x[4]};
}

}  // namespace corrscreen
