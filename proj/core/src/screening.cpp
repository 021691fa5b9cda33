#include "corrscreen/screening.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace corrscreen {

namespace {

constexpr double kTieTolerance = 1e-12;

// Floor below which a centered sum of squares is treated as a zero-variance
// column: accumulated rounding in an exactly-constant column is bounded by
// roughly n^3 eps^2 (1 + mean^2), while any genuinely varying column sits far
// above it.
double degenerate_floor(std::size_t n, double mean) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double nd = static_cast<double>(n);
  return nd * nd * nd * eps * eps * (1.0 + mean * mean);
}

}  // namespace

RetentionRule RetentionRule::power(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw std::invalid_argument("retention exponent theta must lie in (0,1)");
  }
  return {Kind::kPower, theta, 0};
}

RetentionRule RetentionRule::fixed_k(std::size_t k) {
  if (k == 0) throw std::invalid_argument("fixed retention count must be positive");
  return {Kind::kFixedK, 0.0, k};
}

std::size_t resolve_k(const RetentionRule& rule, std::size_t n, std::size_t p) {
  if (n < 3) throw std::invalid_argument("resolve_k requires n >= 3");
  std::size_t k = 1;
  switch (rule.kind) {
    case RetentionRule::Kind::kTopN:
      k = n;
      break;
    case RetentionRule::Kind::kNOverLogN:
      k = static_cast<std::size_t>(std::floor(static_cast<double>(n) /
                                              std::log(static_cast<double>(n))));
      break;
    case RetentionRule::Kind::kPower:
      k = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 1.0 - rule.theta)));
      break;
    case RetentionRule::Kind::kFixedK:
      k = rule.k;
      break;
  }
  k = std::min(k, p);
  return std::max<std::size_t>(k, 1);
}

MarginalStatistics marginal_correlations(const Dataset& dataset) {
  const std::size_t n = dataset.n;
  const std::size_t p = dataset.p;
  if (n < 3) throw std::invalid_argument("marginal_correlations requires n >= 3");

  std::vector<double> mean_x(p, 0.0);
  double mean_y = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mean_y += dataset.y[k];
    const double* row = dataset.x.data() + k * p;
    for (std::size_t j = 0; j < p; ++j) mean_x[j] += row[j];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  mean_y *= inv_n;
  for (double& m : mean_x) m *= inv_n;

  std::vector<double> sxx(p, 0.0);
  std::vector<double> sxy(p, 0.0);
  double syy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double yc = dataset.y[k] - mean_y;
    syy += yc * yc;
    const double* row = dataset.x.data() + k * p;
    for (std::size_t j = 0; j < p; ++j) {
      const double xc = row[j] - mean_x[j];
      sxx[j] += xc * xc;
      sxy[j] += xc * yc;
    }
  }

  if (syy <= degenerate_floor(n, mean_y)) {
    throw std::invalid_argument("marginal_correlations: response has zero sample variance");
  }

  MarginalStatistics result;
  result.values.resize(p);
  const double inv_sd_y = 1.0 / std::sqrt(syy);
  for (std::size_t j = 0; j < p; ++j) {
    if (sxx[j] <= degenerate_floor(n, mean_x[j])) {
      result.values[j] = 0.0;
      result.degenerate.push_back(j + 1);
    } else {
      result.values[j] = sxy[j] / (std::sqrt(sxx[j])) * inv_sd_y;
    }
  }
  return result;
}

StreamingCorrelation::StreamingCorrelation(std::size_t p)
    : p_(p), sum_x_(p), sum_xx_(p), sum_xy_(p) {}

void StreamingCorrelation::add_row(std::span<const double> x, double y) {
  if (x.size() != p_) {
    throw std::invalid_argument("StreamingCorrelation: row has length " +
                                std::to_string(x.size()) + ", expected " + std::to_string(p_));
  }
  sum_y_.add(y);
  sum_yy_.add(y * y);
  for (std::size_t j = 0; j < p_; ++j) {
    const double v = x[j];
    sum_x_[j].add(v);
    sum_xx_[j].add(v * v);
    sum_xy_[j].add(v * y);
  }
  ++rows_;
}

MarginalStatistics StreamingCorrelation::finalize() const {
  const std::size_t n = rows_;
  if (n < 3) throw std::invalid_argument("StreamingCorrelation: needs at least 3 rows");
  const double nd = static_cast<double>(n);
  const double sy = sum_y_.value();
  const double mean_y = sy / nd;
  const double syy = std::max(sum_yy_.value() - sy * sy / nd, 0.0);
  if (syy <= degenerate_floor(n, mean_y)) {
    throw std::invalid_argument("StreamingCorrelation: response has zero sample variance");
  }

  MarginalStatistics result;
  result.values.resize(p_);
  const double inv_sd_y = 1.0 / std::sqrt(syy);
  for (std::size_t j = 0; j < p_; ++j) {
    const double sx = sum_x_[j].value();
    const double sxx = std::max(sum_xx_[j].value() - sx * sx / nd, 0.0);
    if (sxx <= degenerate_floor(n, sx / nd)) {
      result.values[j] = 0.0;
      result.degenerate.push_back(j + 1);
      continue;
    }
    const double sxy = sum_xy_[j].value() - sx * sy / nd;
    result.values[j] = sxy / std::sqrt(sxx) * inv_sd_y;
  }
  return result;
}

MarginalStatistics two_sample_t(const Dataset& dataset) {
  const std::size_t n = dataset.n;
  const std::size_t p = dataset.p;

  std::size_t n0 = 0;
  std::size_t n1 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (dataset.y[k] == 0.0) {
      ++n0;
    } else if (dataset.y[k] == 1.0) {
      ++n1;
    } else {
      throw std::invalid_argument("two_sample_t: response must be exactly 0 or 1 (row " +
                                  std::to_string(k + 1) + ")");
    }
  }
  if (n0 == 0 || n1 == 0) {
    throw std::invalid_argument("two_sample_t: both groups must be nonempty");
  }
  if (n0 + n1 < 3) {
    throw std::invalid_argument("two_sample_t: pooled variance needs n >= 3");
  }

  std::vector<double> mean0(p, 0.0);
  std::vector<double> mean1(p, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = dataset.x.data() + k * p;
    auto& mean = dataset.y[k] == 1.0 ? mean1 : mean0;
    for (std::size_t j = 0; j < p; ++j) mean[j] += row[j];
  }
  for (std::size_t j = 0; j < p; ++j) {
    mean0[j] /= static_cast<double>(n0);
    mean1[j] /= static_cast<double>(n1);
  }

  std::vector<double> ss(p, 0.0);  // pooled within-group sum of squares
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = dataset.x.data() + k * p;
    const auto& mean = dataset.y[k] == 1.0 ? mean1 : mean0;
    for (std::size_t j = 0; j < p; ++j) {
      const double c = row[j] - mean[j];
      ss[j] += c * c;
    }
  }

  const double df = static_cast<double>(n0 + n1 - 2);
  const double inv_counts = 1.0 / static_cast<double>(n0) + 1.0 / static_cast<double>(n1);

  MarginalStatistics result;
  result.values.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    const double diff = mean1[j] - mean0[j];
    const double pooled_var = ss[j] / df;
    const double denom = std::sqrt(pooled_var * inv_counts);
    if (denom <= 0.0 || !std::isfinite(denom)) {
      result.degenerate.push_back(j + 1);
      if (diff > 0.0) {
        result.values[j] = std::numeric_limits<double>::infinity();
      } else if (diff < 0.0) {
        result.values[j] = -std::numeric_limits<double>::infinity();
      } else {
        result.values[j] = 0.0;
      }
    } else {
      result.values[j] = diff / denom;
    }
  }
  return result;
}

ScreeningResult screen(std::vector<double> w, std::size_t k) {
  const std::size_t p = w.size();
  if (p == 0) throw std::invalid_argument("screen: empty statistic vector");
  if (k < 1 || k > p) {
    throw std::invalid_argument("screen: k = " + std::to_string(k) + " outside [1, " +
                                std::to_string(p) + "]");
  }

  ScreeningResult result;
  result.k = k;

  std::vector<std::uint32_t> order(p);
  std::iota(order.begin(), order.end(), 0u);
  const auto ranks_before = [&w](std::uint32_t a, std::uint32_t b) {
    const double da = std::abs(w[a]);
    const double db = std::abs(w[b]);
    if (da != db) return da > db;
    return a < b;
  };

  if (k < p) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                     ranks_before);
    double boundary_in = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) boundary_in = std::min(boundary_in, std::abs(w[order[i]]));
    double boundary_out = -std::numeric_limits<double>::infinity();
    for (std::size_t i = k; i < p; ++i)
      boundary_out = std::max(boundary_out, std::abs(w[order[i]]));
    result.tie_flag =
        boundary_in == boundary_out || std::abs(boundary_in - boundary_out) <= kTieTolerance;
  }

  result.retained.reserve(k);
  for (std::size_t i = 0; i < k; ++i) result.retained.push_back(order[i] + 1);
  std::sort(result.retained.begin(), result.retained.end());
  result.w = std::move(w);
  return result;
}

bool survives(const ScreeningResult& result, std::size_t variable) {
  if (variable < 1 || variable > result.w.size()) {
    throw std::out_of_range("survives: variable " + std::to_string(variable) + " outside [1, " +
                            std::to_string(result.w.size()) + "]");
  }
  return std::binary_search(result.retained.begin(), result.retained.end(), variable);
}

}  // namespace corrscreen
