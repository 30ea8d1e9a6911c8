#pragma once

#include <acagp/errors.hpp>
#include <acagp/geometric_pivots.hpp>
#include <acagp/geometry.hpp>
#include <acagp/kernel.hpp>
#include <acagp/lowrank.hpp>
#include <acagp/oracle.hpp>
#include <acagp/rng.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace acagp {

//
// Two-cloud benchmark: random xi x 1 clouds at a prescribed true distance,
// classical ACA and ACA-GP on the same matrix, truncated SVD as reference,
// base-10 log statistics over many seeded realizations.
//
struct ExperimentConfig {
  double xi = 1.0;
  std::size_t n = 200;
  std::size_t m = 200;
  double target_dist = 1.5;
  std::size_t realizations = 100;
  std::size_t k_max = 10;
  double epsilon_r = 0.25;
  std::uint64_t base_seed = 1;
  double eta = 1.0;
  std::size_t delta = 8;
  CircleMode circles = CircleMode::Auto;

  void validate() const {
    if (!(xi > 0.0 && xi <= 1.0))
      throw InputError("xi must lie in (0, 1]");
    if (n == 0 || m == 0 || realizations == 0 || k_max == 0)
      throw InputError("n, m, realizations and max rank must be positive");
    if (k_max > std::min(n, m))
      throw InputError("max rank exceeds min(n, m)");
    if (!(target_dist > 0.0) || !(eta > 0.0))
      throw InputError("distance and eta must be positive");
    if (!(epsilon_r > 0.0 && epsilon_r <= 1.0))
      throw InputError("central fraction must lie in (0, 1]");
    if (n * m > default_dense_cap)
      throw CapExceeded("n * m exceeds the dense assembly cap required by the SVD reference");
  }
};

inline std::string to_string(CircleMode mode) {
  switch (mode) {
  case CircleMode::Auto: return "auto";
  case CircleMode::On: return "on";
  case CircleMode::Off: return "off";
  }
  return "auto";
}

/// 2 sqrt(k_max / cloud_size): the doubled central-fraction estimate.
inline double epsilon_r_rule(std::size_t k_max, std::size_t cloud_size) noexcept {
  return 2.0 * std::sqrt(static_cast<double>(k_max) / static_cast<double>(cloud_size));
}

struct MethodRun {
  std::vector<double> errors;       // relative error at ranks 1..k_max
  std::vector<std::uint64_t> evals; // cumulative kernel evaluations at ranks 1..k_max
  std::size_t rank = 0;             // rank actually reached
  std::uint64_t total_evals = 0;
};

struct RealizationReport {
  std::size_t index = 0;
  double theta = 0.0;
  bool admissible = false;
  std::vector<double> svd;
  MethodRun aca;
  MethodRun acagp;
  std::size_t central_rows = 0;
  std::size_t central_cols = 0;
};

namespace detail {

inline MethodRun summarize(const Eigen::MatrixXd& a, const Skeleton& sk, std::size_t k_max) {
  MethodRun run;
  run.errors = relative_errors(a, sk, k_max);
  run.rank = sk.rank();
  run.total_evals = sk.eval_count();
  for (std::size_t k = 1; k <= k_max; ++k)
    run.evals.push_back(k <= sk.rank() ? sk.trace()[k - 1].evals : sk.eval_count());
  return run;
}

inline double log10_floor(double e) noexcept { return std::log10(std::max(e, 1e-300)); }

struct LogStats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

inline LogStats log_stats(const std::vector<double>& logs) {
  LogStats s;
  s.count = logs.size();
  if (logs.empty())
    return s;
  for (double v : logs)
    s.mean += v;
  s.mean /= static_cast<double>(logs.size());
  double var = 0.0;
  for (double v : logs)
    var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(logs.size()));
  return s;
}

} // namespace detail

/// Per-rank ErrorReports of one method against the SVD reference.
inline std::vector<ErrorReport> error_reports(const MethodRun& run, const std::vector<double>& svd) {
  std::vector<ErrorReport> out;
  for (std::size_t k = 0; k < run.errors.size(); ++k)
    out.push_back({k + 1, run.errors[k], svd[k], tilde_error(run.errors[k], svd[k])});
  return out;
}

//
// One seeded realization (seed = base_seed + index): placement, then ACA with
// the same stream, then ACA-GP continuing the stream, all on one matrix.
//
template <Kernel K = InverseDistanceKernel>
RealizationReport run_realization(const ExperimentConfig& cfg, std::size_t index, const K& kernel_fn = K{}) {
  Rng rng(cfg.base_seed + index);
  PlacedClouds clouds = place_clouds(cfg.xi, cfg.n, cfg.m, cfg.target_dist, rng);

  RealizationReport rep;
  rep.index = index;
  rep.theta = clouds.theta;
  rep.admissible = is_admissible(clouds.x, clouds.y, AdmissibilityParams{cfg.eta});

  KernelHandle<K> dense_kernel(kernel_fn);
  const Eigen::MatrixXd a = dense_kernel.assemble_dense(clouds.x, clouds.y);
  rep.svd = svd_rank_errors(a, cfg.k_max);

  StoppingParams stop;
  stop.epsilon = 0.0;
  stop.k_max = cfg.k_max;

  KernelHandle<K> aca_kernel(kernel_fn);
  rep.aca = detail::summarize(a, aca(clouds.x, clouds.y, aca_kernel, stop, rng), cfg.k_max);

  GpOptions opts;
  opts.epsilon_r = cfg.epsilon_r;
  opts.delta = cfg.delta;
  opts.circles = cfg.circles;
  KernelHandle<K> gp_kernel(kernel_fn);
  const AcaGpResult gp = aca_gp_detailed(clouds.x, clouds.y, gp_kernel, stop, opts, rng);
  rep.acagp = detail::summarize(a, gp.skeleton, cfg.k_max);
  rep.central_rows = gp.subsets.rows.indices.size();
  rep.central_cols = gp.subsets.cols.indices.size();
  return rep;
}

struct MethodStats {
  double e_log_mean = 0.0;
  double e_log_std = 0.0;
  double kernel_evals_mean = 0.0;
};

struct RankStats {
  std::size_t rank = 0;
  MethodStats aca;
  MethodStats acagp;
  MethodStats svd;
  /// Geometric mean of the finite gains and the std of their log10.
  double gain_log_mean = 0.0;
  double gain_log_std = 0.0;
  std::size_t gain_count = 0;
  std::size_t inf_gain_count = 0;
  /// Realizations whose gain was finite but not positive (ACA at the SVD level).
  std::size_t nonpositive_gain_count = 0;
  /// Geometric mean of tilde_acagp / tilde_aca and the std of its log10.
  double tilde_ratio_log_mean = 0.0;
  double tilde_ratio_log_std = 0.0;
  std::size_t tilde_ratio_count = 0;
};

inline std::vector<RankStats> aggregate(const std::vector<RealizationReport>& reports, std::size_t n, std::size_t m) {
  if (reports.empty())
    throw InputError("aggregate: no realizations");
  const std::size_t k_max = reports.front().svd.size();
  const auto count = static_cast<double>(reports.size());
  std::vector<RankStats> out;
  for (std::size_t k = 0; k < k_max; ++k) {
    RankStats rs;
    rs.rank = k + 1;
    std::vector<double> la, lg, ls, gains, ratios;
    double ea = 0.0, eg = 0.0;
    for (const auto& r : reports) {
      la.push_back(detail::log10_floor(r.aca.errors[k]));
      lg.push_back(detail::log10_floor(r.acagp.errors[k]));
      ls.push_back(detail::log10_floor(r.svd[k]));
      ea += static_cast<double>(r.aca.evals[k]);
      eg += static_cast<double>(r.acagp.evals[k]);

      const Gain g = gain(r.aca.errors[k], r.acagp.errors[k], r.svd[k]);
      if (g.infinite)
        ++rs.inf_gain_count;
      else if (g.value > 0.0)
        gains.push_back(std::log10(g.value));
      else
        ++rs.nonpositive_gain_count;

      const auto ta = tilde_error(r.aca.errors[k], r.svd[k]);
      const auto tg = tilde_error(r.acagp.errors[k], r.svd[k]);
      if (ta && tg && *ta > 0.0 && *tg > 0.0)
        ratios.push_back(std::log10(*tg / *ta));
    }
    const auto sa = detail::log_stats(la), sg = detail::log_stats(lg), ss = detail::log_stats(ls);
    rs.aca = {sa.mean, sa.std, ea / count};
    rs.acagp = {sg.mean, sg.std, eg / count};
    rs.svd = {ss.mean, ss.std, static_cast<double>(n) * static_cast<double>(m)};
    const auto sgain = detail::log_stats(gains);
    rs.gain_count = sgain.count;
    rs.gain_log_mean = std::pow(10.0, sgain.mean);
    rs.gain_log_std = sgain.std;
    const auto sratio = detail::log_stats(ratios);
    rs.tilde_ratio_count = sratio.count;
    rs.tilde_ratio_log_mean = std::pow(10.0, sratio.mean);
    rs.tilde_ratio_log_std = sratio.std;
    out.push_back(rs);
  }
  return out;
}

/// All realizations of `cfg`, in index order. threads == 0 uses every core.
template <Kernel K = InverseDistanceKernel>
std::vector<RealizationReport> run_realizations(const ExperimentConfig& cfg, unsigned threads = 0, const K& kernel_fn = K{}) {
  cfg.validate();
  if (threads == 0)
    threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.realizations));

  std::vector<RealizationReport> reports(cfg.realizations);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.realizations; i = next++) {
      try {
        reports[i] = run_realization(cfg, i, kernel_fn);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = cfg.realizations;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);
  return reports;
}

template <Kernel K = InverseDistanceKernel>
std::vector<RankStats> run_benchmark(const ExperimentConfig& cfg, unsigned threads = 0, const K& kernel_fn = K{}) {
  return aggregate(run_realizations(cfg, threads, kernel_fn), cfg.n, cfg.m);
}

struct SweepPoint {
  double epsilon_r = 0.0;
  std::vector<RankStats> stats;
};

/// One benchmark per central fraction, all on the same realization seeds.
template <Kernel K = InverseDistanceKernel>
std::vector<SweepPoint> run_eps_sweep(const ExperimentConfig& cfg, const std::vector<double>& fractions,
                                      unsigned threads = 0, const K& kernel_fn = K{}) {
  if (fractions.empty())
    throw InputError("sweep: no central fractions");
  std::vector<SweepPoint> out;
  for (double e : fractions) {
    ExperimentConfig c = cfg;
    c.epsilon_r = e;
    out.push_back({e, run_benchmark(c, threads, kernel_fn)});
  }
  return out;
}

} // namespace acagp
