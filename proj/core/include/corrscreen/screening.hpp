#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "corrscreen/sampler.hpp"

namespace corrscreen {

// Map from (n, p) to the retained count k. TopN mirrors the usual simulation
// convention (keep the n largest |w_i|); the others are the standard
// alternatives.
struct RetentionRule {
  enum class Kind { kTopN, kNOverLogN, kPower, kFixedK };

  Kind kind = Kind::kTopN;
  double theta = 0.0;   // kPower only, in (0,1)
  std::size_t k = 0;    // kFixedK only

  static RetentionRule top_n() { return {Kind::kTopN, 0.0, 0}; }
  static RetentionRule n_over_log_n() { return {Kind::kNOverLogN, 0.0, 0}; }
  static RetentionRule power(double theta);
  static RetentionRule fixed_k(std::size_t k);
};

// Resolves the retained count: TopN -> min(n,p); NOverLogN -> min(floor(n/ln n), p);
// Power(theta) -> min(floor(n^(1-theta)), p); FixedK -> min(k,p). Always >= 1.
std::size_t resolve_k(const RetentionRule& rule, std::size_t n, std::size_t p);

// Per-variable sample statistics. `degenerate` lists the 1-based indices of
// zero-variance columns, which score 0 (correlation) or carry an infinite
// sentinel (t statistic) rather than aborting a large simulation.
struct MarginalStatistics {
  std::vector<double> values;           // size p
  std::vector<std::size_t> degenerate;  // sorted, 1-based
};

// Sample Pearson correlation of every column with y, two-pass (column means,
// then centered products). Requires n >= 3 and a response with nonzero sample
// variance.
MarginalStatistics marginal_correlations(const Dataset& dataset);

// One-pass correlation accumulator with Neumaier-compensated sums, for the
// fused generate-and-screen path where x is never materialized. Feeding it
// the rows of a materialized dataset reproduces marginal_correlations to
// ~1e-9.
class StreamingCorrelation {
 public:
  explicit StreamingCorrelation(std::size_t p);

  void add_row(std::span<const double> x, double y);
  std::size_t rows() const { return rows_; }
  MarginalStatistics finalize() const;

 private:
  struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
      const double t = sum + v;
      if (std::abs(sum) >= std::abs(v)) {
        carry += (sum - t) + v;
      } else {
        carry += (v - t) + sum;
      }
      sum = t;
    }
    double value() const { return sum + carry; }
  };

  std::size_t p_;
  std::size_t rows_ = 0;
  std::vector<CompensatedSum> sum_x_;
  std::vector<CompensatedSum> sum_xx_;
  std::vector<CompensatedSum> sum_xy_;
  CompensatedSum sum_y_;
  CompensatedSum sum_yy_;
};

// Pooled-variance two-sample t statistic per column, with groups defined by a
// binary response (y values must be exactly 0 or 1, both groups nonempty).
// Columns with zero pooled variance get +/-inf (nonzero mean split) or 0
// (constant column), and are flagged in `degenerate`.
MarginalStatistics two_sample_t(const Dataset& dataset);

struct ScreeningResult {
  std::vector<double> w;                // the statistics that were ranked
  std::vector<std::size_t> retained;    // sorted ascending, 1-based
  std::size_t k = 0;
  // True when the k-th and (k+1)-th largest |w| agree within 1e-12, i.e. the
  // cut landed on a tie and the lower-index rule decided it.
  bool tie_flag = false;
};

// Retains the k variables with largest |w|, ties broken by lower index.
// Expected O(p) partial selection; a full sort is never used for large p.
ScreeningResult screen(std::vector<double> w, std::size_t k);

// Membership test, 1-based. Throws std::out_of_range outside [1, p].
bool survives(const ScreeningResult& result, std::size_t variable);

}  // namespace corrscreen
