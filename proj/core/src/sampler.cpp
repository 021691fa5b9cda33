#include "corrscreen/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace corrscreen {

PredictorRowSampler::PredictorRowSampler(const CovarianceStructure& structure, RngStream& rng)
    : structure_(structure), rng_(&rng) {
  if (structure_.kind() == CovarianceKind::kDenseExplicit) {
    chol_ = cholesky_factor(structure_.dense_matrix());
    z_.resize(structure_.dimension());
  }
}

void PredictorRowSampler::sample_row(std::span<double> out) {
  const std::size_t p = structure_.dimension();
  if (out.size() != p) {
    throw std::invalid_argument("sample_row: output span has length " +
                                std::to_string(out.size()) + ", expected p = " +
                                std::to_string(p));
  }
  switch (structure_.kind()) {
    case CovarianceKind::kIdentity:
      rng_->fill_normals(out.data(), p);
      break;
    case CovarianceKind::kAr1: {
      const double rho = structure_.rho();
      const double innovation_sd = std::sqrt(1.0 - rho * rho);
      double prev = rng_->next_normal();
      out[0] = prev;
      for (std::size_t j = 1; j < p; ++j) {
        prev = rho * prev + innovation_sd * rng_->next_normal();
        out[j] = prev;
      }
      break;
    }
    case CovarianceKind::kEquicorrelated: {
      const double rho = structure_.rho();
      const double factor_loading = std::sqrt(rho);
      const double idio_sd = std::sqrt(1.0 - rho);
      const double shared = factor_loading * rng_->next_normal();
      for (std::size_t j = 0; j < p; ++j) {
        out[j] = shared + idio_sd * rng_->next_normal();
      }
      break;
    }
    case CovarianceKind::kDenseExplicit: {
      rng_->fill_normals(z_.data(), p);
      for (std::size_t i = 0; i < p; ++i) {
        double s = 0.0;
        const double* l_row = &chol_(i, 0);
        for (std::size_t k = 0; k <= i; ++k) s += l_row[k] * z_[k];
        out[i] = s;
      }
      break;
    }
  }
}

ModelRowSampler::ModelRowSampler(const RegressionModel& model, RngStream& rng)
    : predictor_sampler_(model.covariance(), rng),
      rng_(&rng),
      intercept_(model.intercept()),
      noise_sd_(model.noise_sd()) {
  support_.reserve(model.coefficients().size());
  for (const auto& [index, beta] : model.coefficients()) {
    support_.emplace_back(static_cast<std::size_t>(index) - 1, beta);
  }
}

double ModelRowSampler::sample_row(std::span<double> x_out) {
  predictor_sampler_.sample_row(x_out);
  double y = intercept_;
  for (const auto& [j, beta] : support_) y += beta * x_out[j];
  y += noise_sd_ * rng_->next_normal();
  return y;
}

Matrix sample_predictors(const CovarianceStructure& structure, std::size_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample_predictors requires n >= 1");
  PredictorRowSampler sampler(structure, rng);
  Matrix x(n, structure.dimension());
  for (std::size_t k = 0; k < n; ++k) sampler.sample_row(x.row(k));
  return x;
}

Dataset sample_dataset(const RegressionModel& model, std::size_t n, RngStream& rng) {
  if (n < 3) throw std::invalid_argument("sample_dataset requires n >= 3");
  ModelRowSampler sampler(model, rng);
  Dataset d;
  d.n = n;
  d.p = model.dimension();
  d.y.resize(n);
  d.x.resize(n * d.p);
  for (std::size_t k = 0; k < n; ++k) d.y[k] = sampler.sample_row(d.row(k));
  return d;
}

void dump_dataset_csv(const Dataset& dataset, std::ostream& out) {
  constexpr std::size_t kDumpDimensionCap = 10'000;
  if (dataset.p > kDumpDimensionCap) {
    throw std::invalid_argument("dump_dataset_csv: refusing p = " + std::to_string(dataset.p) +
                                " (> " + std::to_string(kDumpDimensionCap) +
                                "); dumps are for desk-scale debugging");
  }
  out << "y";
  for (std::size_t j = 1; j <= dataset.p; ++j) out << ",x" << j;
  out << "\n";
  char buf[32];
  for (std::size_t k = 0; k < dataset.n; ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", dataset.y[k]);
    out << buf;
    for (const double v : dataset.row(k)) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace corrscreen
