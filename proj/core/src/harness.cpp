#include "corrscreen/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "corrscreen/sampler.hpp"

namespace corrscreen {

namespace {

std::size_t effective_workers(std::size_t requested, std::size_t tasks) {
  std::size_t w = requested;
  if (w == 0) w = std::max<unsigned>(std::thread::hardware_concurrency(), 1u);
  return std::max<std::size_t>(std::min(w, tasks), 1);
}

// Runs fn(task_index) for every index in [0, tasks) across a pool. The first
// exception wins and is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t tasks, std::size_t workers, Fn&& fn) {
  if (tasks == 0) return;
  workers = effective_workers(workers, tasks);
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= tasks || failed.load(std::memory_order_relaxed)) return;
      try {
        fn(t);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ull;
  void feed(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state ^= bytes[i];
      state *= 0x100000001b3ull;
    }
  }
  void feed(const std::string& s) { feed(s.data(), s.size()); }
};

void serialize_spec(const ModelSpec& spec, std::ostream& out) {
  if (const auto* e1 = std::get_if<Example1Spec>(&spec)) {
    out << "example1;rho=" << e1->rho << ";a=" << e1->a << ";sigma=" << e1->sigma;
  } else if (const auto* e2 = std::get_if<Example2Spec>(&spec)) {
    out << "example2;rho=" << e2->rho << ";sigma=" << e2->sigma << ";icov=" << e2->important_cov
        << ";ucov=" << e2->unimportant_cov;
  } else {
    const auto& m = std::get<RegressionModel>(spec);
    out << "custom;kind=" << static_cast<int>(m.covariance().kind()) << ";p=" << m.dimension()
        << ";rho=" << (m.covariance().kind() == CovarianceKind::kDenseExplicit
                           ? 0.0
                           : m.covariance().rho())
        << ";b0=" << m.intercept() << ";sigma=" << m.noise_sd() << ";beta=";
    for (const auto& [index, beta] : m.coefficients()) out << index << ":" << beta << ",";
  }
}

void validate_config(const ExperimentConfig& config, const std::vector<std::size_t>& tracked) {
  if (config.n_values.empty()) throw std::invalid_argument("experiment needs at least one n");
  if (config.replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (config.replications > (1ull << 32)) {
    throw std::invalid_argument("replications exceed the stream-id budget");
  }
  if (tracked.empty()) throw std::invalid_argument("no tracked variables");
  for (const std::size_t n : config.n_values) {
    if (n < 3) throw std::invalid_argument("sample sizes must be >= 3");
    // Fails early if p cannot host the support or the rule is degenerate.
    const std::size_t p = config.p_rule.resolve(n);
    const RegressionModel model = resolve_model(config.model_spec, p);
    const auto support = model.support();
    for (const std::size_t t : tracked) {
      if (t < 1 || t > p) {
        throw std::invalid_argument("tracked variable " + std::to_string(t) +
                                    " outside [1, p=" + std::to_string(p) + "]");
      }
      if (!std::binary_search(support.begin(), support.end(), t)) {
        std::fprintf(stderr,
                     "warning: tracked variable %zu is not in the model support (n=%zu)\n", t, n);
      }
    }
  }
}

}  // namespace

DimensionRule DimensionRule::linear(double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("linear dimension factor must be positive");
  return {Kind::kLinear, factor, 0};
}

DimensionRule DimensionRule::fixed(std::size_t p) {
  if (p == 0) throw std::invalid_argument("fixed dimension must be positive");
  return {Kind::kFixed, 0.0, p};
}

std::size_t DimensionRule::resolve(std::size_t n) const {
  switch (kind) {
    case Kind::kLinear: {
      const auto p = static_cast<std::size_t>(std::llround(factor * static_cast<double>(n)));
      if (p == 0) throw std::invalid_argument("linear dimension rule produced p = 0");
      return p;
    }
    case Kind::kSquare:
      return n * n;
    case Kind::kFixed:
      return fixed_p;
  }
  return 0;  // unreachable
}

RegressionModel resolve_model(const ModelSpec& spec, std::size_t p) {
  if (const auto* e1 = std::get_if<Example1Spec>(&spec)) {
    if (p < 3) {
      throw std::invalid_argument("example 1 needs p >= 3, got p = " + std::to_string(p));
    }
    const Ar1Coefficients beta = solve_ar1_beta(e1->rho, e1->a);
    return RegressionModel(0.0, {{1, beta.beta1}, {3, beta.beta3}}, e1->sigma,
                           CovarianceStructure::ar1(e1->rho, p));
  }
  if (const auto* e2 = std::get_if<Example2Spec>(&spec)) {
    if (p < 5) {
      throw std::invalid_argument("example 2 needs p >= 5, got p = " + std::to_string(p));
    }
    const std::array<double, 5> beta = solve_equi_beta(e2->rho, e2->important_cov,
                                                       e2->unimportant_cov);
    std::map<int, double> coefficients;
    for (int i = 0; i < 5; ++i) coefficients[i + 1] = beta[static_cast<std::size_t>(i)];
    return RegressionModel(0.0, std::move(coefficients), e2->sigma,
                           CovarianceStructure::equicorrelated(e2->rho, p));
  }
  const auto& base = std::get<RegressionModel>(spec);
  if (p == base.dimension()) return base;
  return RegressionModel(base.intercept(), base.coefficients(), base.noise_sd(),
                         base.covariance().with_dimension(p));
}

std::vector<std::size_t> default_tracked(const ModelSpec& spec) {
  if (std::holds_alternative<Example1Spec>(spec)) return {1};
  if (std::holds_alternative<Example2Spec>(spec)) return {1, 2, 3, 4};
  return std::get<RegressionModel>(spec).support();
}

std::string spec_label(const ModelSpec& spec) {
  if (std::holds_alternative<Example1Spec>(spec)) return "example1";
  if (std::holds_alternative<Example2Spec>(spec)) return "example2";
  return "custom";
}

std::uint64_t replication_stream_id(std::size_t n_index, std::size_t rep_index) {
  return mix64((static_cast<std::uint64_t>(n_index) << 32) ^ static_cast<std::uint64_t>(rep_index));
}

std::vector<bool> run_replication(const ExperimentConfig& config, std::size_t n_index,
                                  std::size_t rep_index) {
  const std::size_t n = config.n_values.at(n_index);
  const std::size_t p = config.p_rule.resolve(n);
  const RegressionModel model = resolve_model(config.model_spec, p);
  const std::size_t k = resolve_k(config.retention, n, p);
  const std::vector<std::size_t> tracked =
      config.tracked.empty() ? default_tracked(config.model_spec) : config.tracked;

  RngStream stream(config.master_seed, replication_stream_id(n_index, rep_index));

  MarginalStatistics stats;
  if (p != 0 && n <= config.memory_budget_entries / p) {
    const Dataset dataset = sample_dataset(model, n, stream);
    stats = marginal_correlations(dataset);
  } else {
    ModelRowSampler sampler(model, stream);
    StreamingCorrelation accumulator(p);
    std::vector<double> row(p);
    for (std::size_t i = 0; i < n; ++i) {
      const double y = sampler.sample_row(row);
      accumulator.add_row(row, y);
    }
    stats = accumulator.finalize();
  }

  const ScreeningResult result = screen(std::move(stats.values), k);
  std::vector<bool> survived;
  survived.reserve(tracked.size());
  for (const std::size_t variable : tracked) survived.push_back(survives(result, variable));
  return survived;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const std::vector<std::size_t> tracked =
      config.tracked.empty() ? default_tracked(config.model_spec) : config.tracked;
  validate_config(config, tracked);

  const std::size_t reps = config.replications;
  const std::size_t n_count = config.n_values.size();
  const std::size_t tasks = n_count * reps;
  const std::size_t tracked_count = tracked.size();

  std::vector<std::uint8_t> survived(tasks * tracked_count, 0);

  const auto started = std::chrono::steady_clock::now();
  parallel_for(tasks, config.workers, [&](std::size_t task) {
    const std::size_t n_index = task / reps;
    const std::size_t rep_index = task % reps;
    std::vector<bool> outcome;
    try {
      outcome = run_replication(config, n_index, rep_index);
    } catch (const std::exception& e) {
      throw std::runtime_error("replication failed (n=" +
                               std::to_string(config.n_values[n_index]) +
                               ", rep=" + std::to_string(rep_index) + "): " + e.what());
    }
    for (std::size_t i = 0; i < tracked_count; ++i) {
      survived[task * tracked_count + i] = outcome[i] ? 1 : 0;
    }
  });
  const auto finished = std::chrono::steady_clock::now();

  ExperimentReport report;
  report.label = config.label.empty() ? spec_label(config.model_spec) : config.label;
  report.master_seed = config.master_seed;
  report.generator = kGeneratorName;
  report.config_hash = config_hash(config);
  report.wall_seconds = std::chrono::duration<double>(finished - started).count();

  for (std::size_t n_index = 0; n_index < n_count; ++n_index) {
    const std::size_t n = config.n_values[n_index];
    const std::size_t p = config.p_rule.resolve(n);
    for (std::size_t i = 0; i < tracked_count; ++i) {
      VariableOutcome row;
      row.n = n;
      row.p = p;
      row.variable = tracked[i];
      row.replications = reps;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const std::size_t task = n_index * reps + rep;
        if (!survived[task * tracked_count + i]) ++row.failure_count;
      }
      row.failure_proportion = static_cast<double>(row.failure_count) / static_cast<double>(reps);
      row.mc_se = std::sqrt(row.failure_proportion * (1.0 - row.failure_proportion) /
                            static_cast<double>(reps));
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string config_hash(const ExperimentConfig& config) {
  std::ostringstream canon;
  canon.precision(17);
  serialize_spec(config.model_spec, canon);
  canon << "|n=";
  for (const std::size_t n : config.n_values) canon << n << ",";
  canon << "|prule=" << static_cast<int>(config.p_rule.kind) << ":" << config.p_rule.factor << ":"
        << config.p_rule.fixed_p;
  canon << "|retention=" << static_cast<int>(config.retention.kind) << ":" << config.retention.theta
        << ":" << config.retention.k;
  canon << "|reps=" << config.replications;
  canon << "|tracked=";
  const std::vector<std::size_t> tracked =
      config.tracked.empty() ? default_tracked(config.model_spec) : config.tracked;
  for (const std::size_t t : tracked) canon << t << ",";
  canon << "|seed=" << config.master_seed;
  canon << "|budget=" << config.memory_budget_entries;

  Fnv1a hash;
  hash.feed(canon.str());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash.state));
  return buf;
}

double oracle_failure_probability(const RegressionModel& model, std::size_t n, std::size_t k,
                                  std::size_t variable, std::size_t trials, std::uint64_t seed,
                                  std::size_t workers) {
  const std::size_t p = model.dimension();
  if (p > 500) throw std::invalid_argument("oracle_failure_probability is limited to p <= 500");
  if (n < 3) throw std::invalid_argument("oracle_failure_probability requires n >= 3");
  if (k < 1 || k > p) throw std::invalid_argument("oracle retained count outside [1, p]");
  if (variable < 1 || variable > p) throw std::invalid_argument("oracle variable outside [1, p]");
  if (trials == 0) throw std::invalid_argument("oracle needs at least one trial");

  // Deliberately plain pipeline, independent of the samplers and screening
  // code: dense factor, polar-method normals, textbook correlations, full
  // sort.
  const Matrix r = model.covariance().materialize();
  std::vector<double> factor(p * p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double d = r(j, j);
    for (std::size_t t = 0; t < j; ++t) d -= factor[j * p + t] * factor[j * p + t];
    if (!(d > 0.0)) throw std::runtime_error("oracle: covariance not positive definite");
    factor[j * p + j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < p; ++i) {
      double s = r(i, j);
      for (std::size_t t = 0; t < j; ++t) s -= factor[i * p + t] * factor[j * p + t];
      factor[i * p + j] = s / factor[j * p + j];
    }
  }

  std::vector<double> beta(p, 0.0);
  for (const auto& [index, value] : model.coefficients()) {
    beta[static_cast<std::size_t>(index) - 1] = value;
  }
  const double sigma = model.noise_sd();
  const double intercept = model.intercept();

  std::atomic<std::size_t> failures{0};
  parallel_for(trials, workers, [&](std::size_t trial) {
    RngStream stream(seed, trial);
    bool have_spare = false;
    double spare = 0.0;
    auto polar_normal = [&]() {
      if (have_spare) {
        have_spare = false;
        return spare;
      }
      double u, v, s;
      do {
        u = 2.0 * stream.next_uniform() - 1.0;
        v = 2.0 * stream.next_uniform() - 1.0;
        s = u * u + v * v;
      } while (s >= 1.0 || s == 0.0);
      const double m = std::sqrt(-2.0 * std::log(s) / s);
      spare = v * m;
      have_spare = true;
      return u * m;
    };

    std::vector<double> z(p);
    std::vector<double> xs(n * p);
    std::vector<double> ys(n);
    for (std::size_t row = 0; row < n; ++row) {
      for (std::size_t j = 0; j < p; ++j) z[j] = polar_normal();
      double* x = xs.data() + row * p;
      for (std::size_t i = 0; i < p; ++i) {
        double s = 0.0;
        for (std::size_t t = 0; t <= i; ++t) s += factor[i * p + t] * z[t];
        x[i] = s;
      }
      double y = intercept;
      for (std::size_t j = 0; j < p; ++j) y += beta[j] * x[j];
      ys[row] = y + sigma * polar_normal();
    }

    double ybar = 0.0;
    for (std::size_t row = 0; row < n; ++row) ybar += ys[row];
    ybar /= static_cast<double>(n);
    double syy = 0.0;
    for (std::size_t row = 0; row < n; ++row) syy += (ys[row] - ybar) * (ys[row] - ybar);

    std::vector<std::pair<double, std::size_t>> ranked(p);
    for (std::size_t j = 0; j < p; ++j) {
      double xbar = 0.0;
      for (std::size_t row = 0; row < n; ++row) xbar += xs[row * p + j];
      xbar /= static_cast<double>(n);
      double sxx = 0.0;
      double sxy = 0.0;
      for (std::size_t row = 0; row < n; ++row) {
        const double xc = xs[row * p + j] - xbar;
        sxx += xc * xc;
        sxy += xc * (ys[row] - ybar);
      }
      const double w = sxy / std::sqrt(sxx * syy);
      ranked[j] = {std::abs(w), j + 1};
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    bool survived = false;
    for (std::size_t pos = 0; pos < k; ++pos) {
      if (ranked[pos].second == variable) {
        survived = true;
        break;
      }
    }
    if (!survived) failures.fetch_add(1, std::memory_order_relaxed);
  });

  return static_cast<double>(failures.load()) / static_cast<double>(trials);
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "example,n,p,variable,failure_count,replications,failure_proportion,mc_se,seed\n";
  char buf[64];
  for (const VariableOutcome& row : report.rows) {
    out << report.label << ',' << row.n << ',' << row.p << ',' << row.variable << ','
        << row.failure_count << ',' << row.replications << ',';
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f", row.failure_proportion, row.mc_se);
    out << buf << ',' << report.master_seed << "\n";
  }
}

void write_report_sidecar(const ExperimentReport& report, const std::string& settings_echo,
                          std::ostream& out) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", report.wall_seconds);
  out << "version: " << kVersion << "\n"
      << "generator: " << report.generator << "\n"
      << "config_hash: " << report.config_hash << "\n"
      << "master_seed: " << report.master_seed << "\n"
      << "wall_seconds: " << buf << "\n";
  if (!settings_echo.empty()) out << "settings: " << settings_echo << "\n";
}

}  // namespace corrscreen
