#include "corrscreen/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "corrscreen/harness.hpp"
#include "corrscreen/model.hpp"
#include "corrscreen/rng.hpp"
#include "corrscreen/sampler.hpp"
#include "corrscreen/screening.hpp"

namespace corrscreen {

namespace {

void expect(bool condition, const std::string& message, std::string& failure) {
  if (!condition && failure.empty()) failure = message;
}

std::string check_rng_known_answers() {
  std::string failure;
  // Reference blocks produced by an independent Philox 4x64 implementation.
  const std::array<std::uint64_t, 4> b1 = Philox4x64::block({1, 0, 0, 0}, {0, 0});
  expect(b1 == std::array<std::uint64_t, 4>{0x02f4ba6408e4d89bull, 0x3dd62b0b9ca8c5b2ull,
                                            0x1c8667a55d902e79ull, 0x907d7a052fd5b4dcull},
         "block(ctr=1, key=(0,0)) mismatch", failure);
  const std::array<std::uint64_t, 4> b2 = Philox4x64::block({1, 0, 0, 0}, {42, 0});
  expect(b2 == std::array<std::uint64_t, 4>{0xd1f8817d4d62880eull, 0x307266b65cc8797eull,
                                            0xde1f04e7f084ed03ull, 0x65034a8e78cd1e59ull},
         "block(ctr=1, key=(42,0)) mismatch", failure);
  const std::array<std::uint64_t, 4> b3 = Philox4x64::block({1, 0, 0, 0}, {42, 1});
  expect(b3 == std::array<std::uint64_t, 4>{0x719965f2debb5c86ull, 0xd0ff12852bfefaa0ull,
                                            0x824f8a46917b59d3ull, 0x633af9b3183bb36aull},
         "block(ctr=1, key=(42,1)) mismatch", failure);
  return failure;
}

std::string check_solver() {
  std::string failure;
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  for (int rep = 0; rep < 50 && failure.empty(); ++rep) {
    const std::size_t n = 1 + gen() % 8;
    Matrix a(n, n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = uni(gen);
      for (std::size_t j = 0; j < n; ++j) a(i, j) = uni(gen);
      a(i, i) += 4.0;  // keep well conditioned
    }
    const std::vector<double> x = solve_linear_system(a, b);
    double binf = 0.0;
    for (double v : b) binf = std::max(binf, std::abs(v));
    for (std::size_t i = 0; i < n; ++i) {
      double r = -b[i];
      for (std::size_t j = 0; j < n; ++j) r += a(i, j) * x[j];
      expect(std::abs(r) <= 1e-10 * (1.0 + binf), "solver residual too large", failure);
    }
  }
  bool threw = false;
  try {
    Matrix zero(2, 2, 0.0);
    solve_linear_system(zero, {1.0, 1.0});
  } catch (const std::runtime_error&) {
    threw = true;
  }
  expect(threw, "singular system not rejected", failure);
  return failure;
}

std::string check_constructions() {
  std::string failure;
  const Ar1Coefficients c = solve_ar1_beta(0.25, 3.0);
  expect(std::abs(c.beta1 + 0.8) <= 1e-12 && std::abs(c.beta3 - 12.8) <= 1e-12,
         "ar1 coefficients off at rho=0.25, a=3", failure);

  const auto e = solve_equi_beta(0.1);
  for (int i = 0; i < 4; ++i) {
    expect(std::abs(e[static_cast<std::size_t>(i)] + 10.0 / 3.0) <= 1e-10,
           "equi beta_1..4 off at rho=0.1", failure);
  }
  expect(std::abs(e[4] - 160.0 / 3.0) <= 1e-10, "equi beta_5 off at rho=0.1", failure);

  const RegressionModel m1 = resolve_model(Example1Spec{}, 8);
  const MarginalMoments mm1 = marginal_moments(m1);
  expect(std::abs(mm1.cov_y_x[0]) <= 1e-12, "Cov(y,x1) != 0 in the AR(1) construction", failure);
  expect(std::abs(mm1.cov_y_x[1] - 3.0) <= 1e-12, "Cov(y,x2) != a in the AR(1) construction",
         failure);

  const RegressionModel m2 = resolve_model(Example2Spec{}, 10);
  const MarginalMoments mm2 = marginal_moments(m2);
  for (std::size_t i = 0; i < 4; ++i) {
    expect(std::abs(mm2.cov_y_x[i] - 1.0) <= 1e-10, "Cov(y,x_i) != 1 for i <= 4", failure);
  }
  for (std::size_t j = 5; j < 10; ++j) {
    expect(std::abs(mm2.cov_y_x[j] - 4.0) <= 1e-10, "Cov(y,x_j) != 4 for j > 5", failure);
  }
  return failure;
}

std::string check_moments_dense_agreement() {
  std::string failure;
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> uni(0.05, 0.9);
  for (int rep = 0; rep < 6 && failure.empty(); ++rep) {
    const std::size_t p = 50;
    const double rho = uni(gen);
    const CovarianceStructure cov = (rep % 2 == 0) ? CovarianceStructure::ar1(rho, p)
                                                   : CovarianceStructure::equicorrelated(rho, p);
    std::map<int, double> beta;
    for (int s = 0; s < 4; ++s) beta[1 + static_cast<int>(gen() % p)] = uni(gen) * 5.0 - 2.5;
    for (auto it = beta.begin(); it != beta.end();) {
      it = it->second == 0.0 ? beta.erase(it) : std::next(it);
    }
    if (beta.empty()) beta[1] = 1.0;
    const RegressionModel model(0.0, beta, 1.0, cov);
    const MarginalMoments m = marginal_moments(model);

    const Matrix r = cov.materialize();
    for (std::size_t i = 0; i < p; ++i) {
      double dense = 0.0;
      for (const auto& [index, value] : beta) {
        dense += r(i, static_cast<std::size_t>(index) - 1) * value;
      }
      expect(std::abs(dense - m.cov_y_x[i]) <= 1e-10 * (1.0 + std::abs(dense)),
             "structured moments disagree with dense R*beta", failure);
    }
  }
  return failure;
}

std::string check_spectral_bounds() {
  std::string failure;
  const CovarianceStructure equi = CovarianceStructure::equicorrelated(0.3, 60);
  const double exact = equi.spectral_bound();
  const double numeric = largest_eigenvalue_symmetric(equi.materialize());
  expect(std::abs(exact - numeric) <= 1e-8, "equicorrelated eigenvalue mismatch", failure);

  const CovarianceStructure ar1 = CovarianceStructure::ar1(0.25, 10);
  const double bound = ar1.spectral_bound();
  const double dense = largest_eigenvalue_symmetric(ar1.materialize());
  expect(bound >= dense && (bound - dense) / dense <= 0.05,
         "AR(1) spectral bound not a tight upper bound at p=10", failure);
  return failure;
}

std::string check_sampler_factor_equivalence() {
  std::string failure;
  const std::size_t p = 16;
  const std::size_t n = 8;
  const CovarianceStructure ar1 = CovarianceStructure::ar1(0.4, p);
  RngStream recursion_stream(99, 1);
  const Matrix by_recursion = sample_predictors(ar1, n, recursion_stream);
  RngStream dense_stream(99, 1);
  const Matrix by_factor =
      sample_predictors(CovarianceStructure::dense(ar1.materialize()), n, dense_stream);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      expect(std::abs(by_recursion(i, j) - by_factor(i, j)) <= 1e-10,
             "AR(1) recursion diverges from the dense factor path", failure);
    }
  }
  return failure;
}

std::string check_screen_matches_sort() {
  std::string failure;
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int rep = 0; rep < 200 && failure.empty(); ++rep) {
    const std::size_t p = 1 + gen() % 300;
    std::vector<double> w(p);
    for (double& v : w) v = (gen() % 4 == 0) ? 0.25 : uni(gen);  // inject ties
    const std::size_t k = 1 + gen() % p;

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{1});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double da = std::abs(w[a - 1]);
      const double db = std::abs(w[b - 1]);
      if (da != db) return da > db;
      return a < b;
    });
    std::vector<std::size_t> expected(order.begin(), order.begin() + static_cast<long>(k));
    std::sort(expected.begin(), expected.end());

    const ScreeningResult result = screen(w, k);
    expect(result.retained == expected, "partial selection disagrees with full sort", failure);
  }
  return failure;
}

std::string check_t_rank_equivalence() {
  std::string failure;
  std::mt19937_64 gen(31);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 20 && failure.empty(); ++rep) {
    const std::size_t n = 40 + gen() % 40;
    const std::size_t p = 1 + gen() % 25;
    Dataset d;
    d.n = n;
    d.p = p;
    d.y.resize(n);
    d.x.resize(n * p);
    for (std::size_t i = 0; i < n; ++i) {
      d.y[i] = (i < n / 2) ? 0.0 : 1.0;
      for (std::size_t j = 0; j < p; ++j) d.x[i * p + j] = normal(gen) + d.y[i] * normal(gen);
    }
    const MarginalStatistics w = marginal_correlations(d);
    const MarginalStatistics t = two_sample_t(d);

    auto ranking = [](const std::vector<double>& v) {
      std::vector<std::size_t> idx(v.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const double da = std::abs(v[a]);
        const double db = std::abs(v[b]);
        if (da != db) return da > db;
        return a < b;
      });
      return idx;
    };
    expect(ranking(w.values) == ranking(t.values),
           "two-sample t ranking diverges from |w| ranking", failure);
  }
  return failure;
}

std::string check_streaming_agreement() {
  std::string failure;
  RngStream stream(5, 5);
  const RegressionModel model = resolve_model(Example2Spec{}, 40);
  const Dataset d = sample_dataset(model, 500, stream);
  const MarginalStatistics two_pass = marginal_correlations(d);
  StreamingCorrelation acc(d.p);
  for (std::size_t i = 0; i < d.n; ++i) acc.add_row(d.row(i), d.y[i]);
  const MarginalStatistics one_pass = acc.finalize();
  for (std::size_t j = 0; j < d.p; ++j) {
    expect(std::abs(two_pass.values[j] - one_pass.values[j]) <= 1e-9,
           "streaming correlations diverge from the two-pass path", failure);
  }
  return failure;
}

std::string check_harness_determinism() {
  std::string failure;
  ExperimentConfig config;
  config.model_spec = Example1Spec{};
  config.n_values = {30, 60};
  config.replications = 20;
  config.master_seed = 2024;

  const auto once = run_replication(config, 1, 7);
  const auto again = run_replication(config, 1, 7);
  expect(once == again, "replication not deterministic", failure);

  config.workers = 1;
  const ExperimentReport serial = run_experiment(config);
  config.workers = 2;
  const ExperimentReport threaded = run_experiment(config);
  std::ostringstream a;
  std::ostringstream b;
  write_report_csv(serial, a);
  write_report_csv(threaded, b);
  expect(a.str() == b.str(), "report differs across worker counts", failure);
  return failure;
}

}  // namespace

std::vector<CheckResult> run_selfchecks() {
  const std::vector<std::pair<std::string, std::function<std::string()>>> checks = {
      {"rng-known-answers", check_rng_known_answers},
      {"small-solver", check_solver},
      {"closed-form-constructions", check_constructions},
      {"moments-dense-agreement", check_moments_dense_agreement},
      {"spectral-bounds", check_spectral_bounds},
      {"sampler-factor-equivalence", check_sampler_factor_equivalence},
      {"screen-matches-full-sort", check_screen_matches_sort},
      {"t-rank-equivalence", check_t_rank_equivalence},
      {"streaming-two-pass-agreement", check_streaming_agreement},
      {"harness-determinism", check_harness_determinism},
  };

  std::vector<CheckResult> results;
  results.reserve(checks.size());
  for (const auto& [name, fn] : checks) {
    CheckResult r;
    r.name = name;
    try {
      r.detail = fn();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace corrscreen
