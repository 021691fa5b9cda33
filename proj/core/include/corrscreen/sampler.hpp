#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "corrscreen/linalg.hpp"
#include "corrscreen/model.hpp"
#include "corrscreen/rng.hpp"

namespace corrscreen {

// Materialized sample: n response values with their n x p predictor rows.
struct Dataset {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> y;  // n
  std::vector<double> x;  // n * p, row-major

  std::span<const double> row(std::size_t k) const { return {x.data() + k * p, p}; }
  std::span<double> row(std::size_t k) { return {x.data() + k * p, p}; }
};

// Draws rows of x ~ N(0, R) in O(p) per row for structured kinds:
//   AR(1):          x_1 = z_1, x_j = rho x_{j-1} + sqrt(1-rho^2) z_j
//   equicorrelated: x_j = sqrt(rho) u + sqrt(1-rho) z_j with one shared u
//   identity:       x_j = z_j
// Explicit matrices use a lower-triangular factor computed once (O(p^2) per
// row). Every kind consumes its variates front-to-back from the stream, and
// the AR(1) recursion consumes exactly the same p variates as the dense
// factor path would, which is what makes the two comparable row-for-row.
class PredictorRowSampler {
 public:
  PredictorRowSampler(const CovarianceStructure& structure, RngStream& rng);

  void sample_row(std::span<double> out);
  std::size_t dimension() const { return structure_.dimension(); }

 private:
  CovarianceStructure structure_;
  RngStream* rng_;
  Matrix chol_;            // dense kind only
  std::vector<double> z_;  // dense kind scratch
};

// Streams (x row, y) pairs from the full regression law. Per observation the
// consumption order is fixed: the p predictor variates, then one noise
// variate.
class ModelRowSampler {
 public:
  ModelRowSampler(const RegressionModel& model, RngStream& rng);

  // Fills x_out with one predictor row and returns the matching response.
  double sample_row(std::span<double> x_out);
  std::size_t dimension() const { return predictor_sampler_.dimension(); }

 private:
  PredictorRowSampler predictor_sampler_;
  RngStream* rng_;
  double intercept_;
  double noise_sd_;
  std::vector<std::pair<std::size_t, double>> support_;  // 0-based index, beta
};

// n i.i.d. rows from N(0, R), returned as an n x p matrix.
Matrix sample_predictors(const CovarianceStructure& structure, std::size_t n, RngStream& rng);

// n i.i.d. observations of the full model. Requires n >= 3 (sample
// correlations downstream need at least that).
Dataset sample_dataset(const RegressionModel& model, std::size_t n, RngStream& rng);

// Debug-scale CSV dump with header "y,x1,...,xp". Refuses p > 10^4.
void dump_dataset_csv(const Dataset& dataset, std::ostream& out);

}  // namespace corrscreen
