#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "corrscreen/model.hpp"
#include "corrscreen/screening.hpp"
#include "corrscreen/version.hpp"

namespace corrscreen {

// AR(1) preset: support {1,3} with coefficients from solve_ar1_beta, so x1 is
// important but marginally uncorrelated with y.
struct Example1Spec {
  double rho = 0.25;
  double a = 3.0;
  double sigma = 1.0;
};

// Equicorrelated preset: support {1..5} from solve_equi_beta, so x1..x4 are
// important but their |Cor(y, x_i)| is uniformly below that of every
// unimportant variable beyond index 5.
struct Example2Spec {
  double rho = 0.1;
  double sigma = 1.0;
  double important_cov = 1.0;
  double unimportant_cov = 4.0;
};

using ModelSpec = std::variant<Example1Spec, Example2Spec, RegressionModel>;

// Map from sample size to predictor count.
struct DimensionRule {
  enum class Kind { kLinear, kSquare, kFixed };

  Kind kind = Kind::kLinear;
  double factor = 2.0;     // kLinear: p = round(factor * n)
  std::size_t fixed_p = 0; // kFixed

  static DimensionRule linear(double factor);
  static DimensionRule square() { return {Kind::kSquare, 0.0, 0}; }
  static DimensionRule fixed(std::size_t p);

  std::size_t resolve(std::size_t n) const;
};

struct ExperimentConfig {
  ModelSpec model_spec = Example1Spec{};
  std::vector<std::size_t> n_values;
  DimensionRule p_rule = DimensionRule::linear(2.0);
  RetentionRule retention = RetentionRule::top_n();
  std::size_t replications = 100;
  // 1-based variable indices whose survival is recorded; empty means the
  // spec's defaults ({1} for example 1, {1,2,3,4} for example 2, the full
  // support for custom models).
  std::vector<std::size_t> tracked;
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::size_t workers = 0;  // 0 -> hardware concurrency
  // Replications with n*p above this stream the data through the compensated
  // one-pass accumulator instead of materializing x.
  std::size_t memory_budget_entries = 200'000'000;
  std::string label;  // report tag; empty -> derived from the model spec
};

struct VariableOutcome {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t variable = 0;
  std::size_t failure_count = 0;
  std::size_t replications = 0;
  double failure_proportion = 0.0;
  double mc_se = 0.0;  // sqrt(prop * (1 - prop) / replications)
};

struct ExperimentReport {
  std::string label;
  std::vector<VariableOutcome> rows;  // ordered by (n, variable)
  std::uint64_t master_seed = 0;
  std::string generator;
  std::string config_hash;
  double wall_seconds = 0.0;
};

// Builds the concrete model for one (spec, p) pair. Throws when p cannot
// accommodate the spec's support.
RegressionModel resolve_model(const ModelSpec& spec, std::size_t p);

std::vector<std::size_t> default_tracked(const ModelSpec& spec);
std::string spec_label(const ModelSpec& spec);

// Stream id for replication rep_index of the n_index-th sample size.
// Appending sample sizes to a config never changes existing streams.
std::uint64_t replication_stream_id(std::size_t n_index, std::size_t rep_index);

// Runs a single replication and reports survival for each tracked variable
// (order matches the tracked list). Deterministic given (config, indices).
std::vector<bool> run_replication(const ExperimentConfig& config, std::size_t n_index,
                                  std::size_t rep_index);

// Full Monte Carlo protocol: replications x sample sizes, scheduled across a
// worker pool. Aggregation is position-keyed, so the report is identical for
// any worker count.
ExperimentReport run_experiment(const ExperimentConfig& config);

// FNV-1a hash of the experiment definition (model, sizes, retention, seed,
// memory budget -- not the worker count, which cannot affect results).
// Returned as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

// Brute-force estimate of the probability that `variable` fails screening:
// dense lower-triangular sampling, textbook correlation loops, a full sort,
// and polar-method normals -- sharing none of the fast path. Small instances
// only (p <= 500).
double oracle_failure_probability(const RegressionModel& model, std::size_t n, std::size_t k,
                                  std::size_t variable, std::size_t trials, std::uint64_t seed,
                                  std::size_t workers = 0);

// CSV with header example,n,p,variable,failure_count,replications,
// failure_proportion,mc_se,seed and one row per (n, tracked variable).
void write_report_csv(const ExperimentReport& report, std::ostream& out);

// Plain-text sidecar: version, generator, config hash, seed, wall time, and
// an optional settings echo line that reparses to the same invocation.
void write_report_sidecar(const ExperimentReport& report, const std::string& settings_echo,
                          std::ostream& out);

}  // namespace corrscreen
