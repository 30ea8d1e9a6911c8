#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace acagp;

namespace {

ExperimentConfig small(std::size_t realizations = 6) {
  ExperimentConfig c;
  c.n = 60;
  c.m = 60;
  c.realizations = realizations;
  return c;
}

RealizationReport synthetic(std::vector<double> aca_e, std::vector<double> gp_e, std::vector<double> svd_e) {
  RealizationReport r;
  r.svd = std::move(svd_e);
  r.aca.errors = std::move(aca_e);
  r.acagp.errors = std::move(gp_e);
  r.aca.evals.assign(r.svd.size(), 0);
  r.acagp.evals.assign(r.svd.size(), 0);
  return r;
}

bool same_stats(const std::vector<RankStats>& a, const std::vector<RankStats>& b) {
  if (a.size() != b.size())
    return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& x = a[k];
    const auto& y = b[k];
    if (x.aca.e_log_mean != y.aca.e_log_mean || x.acagp.e_log_mean != y.acagp.e_log_mean ||
        x.svd.e_log_mean != y.svd.e_log_mean || x.aca.e_log_std != y.aca.e_log_std ||
        x.gain_log_mean != y.gain_log_mean || x.inf_gain_count != y.inf_gain_count)
      return false;
  }
  return true;
}

} // namespace

TEST(Realization, DeterministicAndDominatedBySvd) {
  const ExperimentConfig cfg = small();
  const RealizationReport a = run_realization(cfg, 3), b = run_realization(cfg, 3);
  EXPECT_EQ(a.aca.errors, b.aca.errors);
  EXPECT_EQ(a.acagp.errors, b.acagp.errors);
  EXPECT_EQ(a.svd, b.svd);
  EXPECT_EQ(a.theta, b.theta);
  for (std::size_t k = 0; k < cfg.k_max; ++k) {
    EXPECT_GE(a.aca.errors[k], a.svd[k] - 1e-12);
    EXPECT_GE(a.acagp.errors[k], a.svd[k] - 1e-12);
  }
  EXPECT_TRUE(a.admissible);
}

TEST(Realization, FarCloudsDecayFast) {
  ExperimentConfig cfg = small();
  cfg.target_dist = 5.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const RealizationReport r = run_realization(cfg, i);
    EXPECT_LT(r.aca.errors[2], 1e-3);
    EXPECT_LT(r.acagp.errors[2], 1e-3);
    EXPECT_LT(r.svd[2], 1e-3);
  }
}

TEST(Aggregate, LogStatistics) {
  const auto stats = aggregate({synthetic({1e-2}, {1e-2}, {1e-3}), synthetic({1e-4}, {1e-4}, {1e-5})}, 1, 1);
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_NEAR(stats[0].aca.e_log_mean, -3.0, 1e-14);
  EXPECT_NEAR(stats[0].aca.e_log_std, 1.0, 1e-14);

  const auto single = aggregate({synthetic({1e-2}, {1e-3}, {1e-4})}, 1, 1);
  EXPECT_EQ(single[0].aca.e_log_std, 0.0);
  EXPECT_EQ(single[0].acagp.e_log_std, 0.0);
}

TEST(Aggregate, GainIsGeometricMean) {
  // E_svd = 1, E_acagp = 2: gain = E_aca - 1.
  const auto stats = aggregate({synthetic({3.0}, {2.0}, {1.0}), synthetic({9.0}, {2.0}, {1.0})}, 1, 1);
  EXPECT_NEAR(stats[0].gain_log_mean, 4.0, 1e-12);
  EXPECT_EQ(stats[0].gain_count, 2u);

  const auto with_inf = aggregate({synthetic({3.0}, {2.0}, {1.0}), synthetic({3.0}, {1.0}, {1.0})}, 1, 1);
  EXPECT_EQ(with_inf[0].inf_gain_count, 1u);
  EXPECT_EQ(with_inf[0].gain_count, 1u);
  EXPECT_NEAR(with_inf[0].gain_log_mean, 2.0, 1e-12);
}

TEST(Aggregate, ConcatenationIsLinear) {
  const ExperimentConfig cfg = small(8);
  const auto all = run_realizations(cfg, 1);
  std::vector<RealizationReport> first(all.begin(), all.begin() + 3), second(all.begin() + 3, all.end());
  std::vector<RealizationReport> joined = first;
  joined.insert(joined.end(), second.begin(), second.end());
  EXPECT_TRUE(same_stats(aggregate(joined, cfg.n, cfg.m), aggregate(all, cfg.n, cfg.m)));
}

TEST(Benchmark, ThreadCountDoesNotChangeResults) {
  const ExperimentConfig cfg = small(9);
  const auto one = run_benchmark(cfg, 1);
  const auto four = run_benchmark(cfg, 4);
  EXPECT_TRUE(same_stats(one, four));
  std::ostringstream a, b;
  io::write_results_csv(a, one);
  io::write_results_csv(b, four);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Benchmark, RankOneIndependentOfFraction) {
  ExperimentConfig cfg = small(10);
  cfg.epsilon_r = 0.1;
  const auto a = run_benchmark(cfg);
  cfg.epsilon_r = 0.3;
  const auto b = run_benchmark(cfg);
  EXPECT_EQ(a[0].acagp.e_log_mean, b[0].acagp.e_log_mean);
  EXPECT_EQ(a[0].acagp.e_log_std, b[0].acagp.e_log_std);
  EXPECT_EQ(a[0].gain_log_mean, b[0].gain_log_mean);
}

TEST(Benchmark, GainAboveOneAtLowRanks) {
  ExperimentConfig cfg;
  const auto stats = run_benchmark(cfg);
  for (std::size_t k = 2; k <= 6; ++k)
    EXPECT_GT(stats[k - 1].gain_log_mean, 1.0) << "rank " << k;
}

TEST(Benchmark, SeedStability) {
  ExperimentConfig cfg;
  cfg.base_seed = 100;
  const auto a = run_benchmark(cfg);
  cfg.base_seed = 200;
  const auto b = run_benchmark(cfg);
  const double root_n = std::sqrt(static_cast<double>(cfg.realizations));
  for (std::size_t k = 0; k < cfg.k_max; ++k) {
    EXPECT_LT(std::abs(a[k].aca.e_log_mean - b[k].aca.e_log_mean), 3 * a[k].aca.e_log_std / root_n) << "rank " << k + 1;
    EXPECT_LT(std::abs(a[k].acagp.e_log_mean - b[k].acagp.e_log_mean), 3 * a[k].acagp.e_log_std / root_n)
        << "rank " << k + 1;
    EXPECT_LT(std::abs(a[k].svd.e_log_mean - b[k].svd.e_log_mean), 3 * a[k].svd.e_log_std / root_n) << "rank " << k + 1;
  }
}

TEST(Sweep, RankOneConstantAndSingleValueMatchesBenchmark) {
  ExperimentConfig cfg = small(8);
  const auto sweep = run_eps_sweep(cfg, {0.1, 0.25, 0.5});
  ASSERT_EQ(sweep.size(), 3u);
  for (const auto& pt : sweep) {
    EXPECT_EQ(pt.stats[0].tilde_ratio_log_mean, sweep[0].stats[0].tilde_ratio_log_mean);
    EXPECT_EQ(pt.stats[0].gain_log_mean, sweep[0].stats[0].gain_log_mean);
  }
  cfg.epsilon_r = 0.25;
  EXPECT_TRUE(same_stats(run_eps_sweep(cfg, {0.25})[0].stats, run_benchmark(cfg)));
}

TEST(Config, Validation) {
  ExperimentConfig c;
  c.xi = 1.5;
  EXPECT_THROW(c.validate(), InputError);
  c = ExperimentConfig{};
  c.epsilon_r = 0.0;
  EXPECT_THROW(c.validate(), InputError);
  c = ExperimentConfig{};
  c.k_max = 300;
  EXPECT_THROW(c.validate(), InputError);
  c = ExperimentConfig{};
  c.n = c.m = 3000;
  EXPECT_THROW(c.validate(), CapExceeded);
}

TEST(RuleOfThumb, Values) {
  EXPECT_NEAR(epsilon_r_rule(10, 400), 2 * std::sqrt(10.0 / 400.0), 1e-15);
  EXPECT_NEAR(epsilon_r_rule(10, 400) / 2, 0.158, 1e-3);
  EXPECT_EQ(epsilon_r_rule(7, 7), 2.0);
  EXPECT_NEAR(epsilon_r_rule(1, 400), 0.1, 1e-15);
  EXPECT_EQ(default_epsilon_r(400, 400, 400), 1.0);
}
