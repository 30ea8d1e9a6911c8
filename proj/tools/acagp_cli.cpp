// Command-line front end: approximate, benchmark, sweep-central, genetic.

#include <acagp.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace acagp;
using io::json;

constexpr int exit_input = 2;
constexpr int exit_inadmissible = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "xi=1,n=100,m=100,dist=2.5"; every key optional.
struct GenSpec {
  double xi = 1.0;
  std::size_t n = 100;
  std::size_t m = 100;
  double dist = 2.5;
};

GenSpec parse_gen(const std::string& text) {
  GenSpec g;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw UsageError("--gen: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "xi") {
        g.xi = std::stod(value, &used);
      } else if (key == "dist") {
        g.dist = std::stod(value, &used);
      } else if (key == "n" || key == "m") {
        const long long v = std::stoll(value, &used);
        if (v <= 0)
          throw UsageError("--gen: " + key + " must be positive");
        (key == "n" ? g.n : g.m) = static_cast<std::size_t>(v);
      } else {
        throw UsageError("--gen: unknown key '" + key + "'");
      }
      if (used != value.size())
        throw UsageError("--gen: malformed value '" + value + "'");
    } catch (const std::logic_error&) {
      throw UsageError("--gen: malformed value '" + value + "'");
    }
  }
  return g;
}

// "start:stop:step" (inclusive) or a single value.
std::vector<double> parse_range(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::logic_error&) {
      throw UsageError("--central: malformed range '" + text + "'");
    }
    if (used != item.size())
      throw UsageError("--central: malformed range '" + text + "'");
    parts.push_back(v);
  }
  std::vector<double> values;
  if (parts.size() == 1) {
    values = parts;
  } else if (parts.size() == 3) {
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0) || !(start <= stop))
      throw UsageError("--central: range needs start <= stop and step > 0");
    for (std::size_t i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > stop + 1e-9 * step)
        break;
      values.push_back(v);
    }
  } else {
    throw UsageError("--central: expected start:stop:step or a single value");
  }
  for (double v : values)
    if (!(v > 0.0 && v <= 1.0))
      throw UsageError("--central: fractions must lie in (0, 1]");
  return values;
}

CircleMode parse_circles(const std::string& s) {
  if (s == "auto")
    return CircleMode::Auto;
  if (s == "on")
    return CircleMode::On;
  if (s == "off")
    return CircleMode::Off;
  throw UsageError("--circles must be auto, on or off");
}

// Writes to --out when given, standard output otherwise.
class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_)
        throw InputError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool to_stdout() const { return !file_; }

private:
  std::unique_ptr<std::ofstream> file_;
};

struct ExperimentFlags {
  ExperimentConfig cfg;
  std::string circles = "auto";
  unsigned threads = 0;
  bool large_scale = false;
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("--xi", cfg.xi, "aspect ratio of the cloud rectangles, in (0, 1]")->capture_default_str();
    app->add_option("--n", cfg.n, "points in cloud X")->capture_default_str();
    app->add_option("--m", cfg.m, "points in cloud Y")->capture_default_str();
    app->add_option("--dist", cfg.target_dist, "true distance between the clouds")->capture_default_str();
    app->add_option("--realizations", cfg.realizations, "number of random realizations")->capture_default_str();
    app->add_option("--max-rank", cfg.k_max, "highest rank recorded")->capture_default_str();
    app->add_option("--delta", cfg.delta, "central subset offset beyond the max rank")->capture_default_str();
    app->add_option("--circles", circles, "rank-2/3 circle heuristics: auto, on, off")->capture_default_str();
    app->add_option("--eta", cfg.eta, "admissibility parameter")->capture_default_str();
    app->add_option("--seed", cfg.base_seed, "base seed; realization i uses seed + i")->capture_default_str();
    app->add_option("--threads", threads, "worker threads (0 = all cores); output does not depend on it")
        ->capture_default_str();
    app->add_flag("--large-scale", large_scale, "n = m = 400 and 1000 realizations");
    app->add_option("--out", out, "output CSV (standard output when omitted)");
  }

  ExperimentConfig resolve(CLI::App* app) {
    ExperimentConfig c = cfg;
    if (large_scale) {
      if (app->count("--n") == 0)
        c.n = 400;
      if (app->count("--m") == 0)
        c.m = 400;
      if (app->count("--realizations") == 0)
        c.realizations = 1000;
    }
    c.circles = parse_circles(circles);
    return c;
  }
};

int cmd_approximate(const std::vector<std::string>& clouds, const std::string& gen, const std::string& method,
                    double epsilon, std::size_t max_rank, double central, std::size_t delta, const std::string& circles,
                    double eta, bool force, std::uint64_t seed, const std::string& out_path) {
  if (method != "aca" && method != "acagp")
    throw UsageError("--method must be aca or acagp");
  if (clouds.empty() == gen.empty())
    throw UsageError("exactly one of --clouds X.json Y.json or --gen is required");
  if (!(epsilon >= 0.0))
    throw UsageError("--epsilon must be non-negative");

  Rng rng(seed);
  json source;
  std::optional<PlacedClouds> placed;
  if (!gen.empty()) {
    const GenSpec g = parse_gen(gen);
    placed.emplace(place_clouds(g.xi, g.n, g.m, g.dist, rng));
    source = {{"generator", {{"xi", g.xi}, {"n", g.n}, {"m", g.m}, {"dist", g.dist}}}};
  } else {
    placed.emplace(PlacedClouds{io::read_cloud(clouds.at(0)), io::read_cloud(clouds.at(1)), 0.0});
    source = {{"clouds", clouds}};
  }
  const PointCloud& x = placed->x;
  const PointCloud& y = placed->y;

  if (!is_admissible(x, y, AdmissibilityParams{eta})) {
    if (!force) {
      std::cerr << "error: clouds are not admissible for eta=" << eta << " (use --force to proceed)\n";
      return exit_inadmissible;
    }
    std::cerr << "warning: clouds are not admissible for eta=" << eta << "; proceeding (--force)\n";
  }

  StoppingParams stop;
  stop.epsilon = epsilon;
  stop.k_max = max_rank;
  const std::size_t k_max = stop.resolved_k_max(x.size(), y.size());

  KernelHandle<> kernel;
  std::optional<Skeleton> sk;
  json gp_info = nullptr;
  GpOptions opts;
  if (central > 0.0)
    opts.epsilon_r = central;
  opts.delta = delta;
  opts.circles = parse_circles(circles);
  const double eps_r = opts.epsilon_r.value_or(default_epsilon_r(k_max, x.size(), y.size()));
  if (method == "aca") {
    sk.emplace(aca(x, y, kernel, stop, rng));
  } else {
    if (!(eps_r > 0.0 && eps_r <= 1.0))
      throw UsageError("--central must lie in (0, 1]");
    AcaGpResult r = aca_gp_detailed(x, y, kernel, stop, opts, rng);
    gp_info = {{"central_rows", r.subsets.rows.indices.size()},
               {"central_cols", r.subsets.cols.indices.size()},
               {"central_fraction_rows", r.subsets.rows.epsilon_r},
               {"central_fraction_cols", r.subsets.cols.epsilon_r},
               {"circles", r.circles_enabled}};
    sk.emplace(std::move(r.skeleton));
  }

  json doc = io::skeleton_to_json(*sk);
  doc["config"] = {{"version", version},
                   {"method", method},
                   {"source", source},
                   {"epsilon", epsilon},
                   {"max_rank", k_max},
                   {"epsilon_p", stop.epsilon_p},
                   {"central", method == "acagp" ? json(eps_r) : json(nullptr)},
                   {"delta", delta},
                   {"circles", circles},
                   {"eta", eta},
                   {"force", force},
                   {"seed", seed}};
  if (!gp_info.is_null())
    doc["central_subsets"] = gp_info;

  Output out(out_path);
  out.stream() << doc.dump(1) << '\n';

  const double rel = sk->approx_norm() > 0.0 ? sk->residual_norm() / sk->approx_norm() : 0.0;
  std::ostream& summary = out.to_stdout() ? std::cerr : std::cout;
  summary << "rank=" << sk->rank() << " rel_residual=" << io::fmt9(rel)
          << " compression=" << io::fmt9(compression_ratio(*sk)) << " kernel_evals=" << sk->eval_count() << '\n';
  return 0;
}

int cmd_benchmark(ExperimentFlags& flags, CLI::App* app) {
  const ExperimentConfig cfg = flags.resolve(app);
  const auto stats = run_benchmark(cfg, flags.threads);
  Output out(flags.out);
  io::write_comment_header(out.stream(), {std::string("acagp ") + version, "command: benchmark", "config: " + io::describe(cfg)});
  io::write_results_csv(out.stream(), stats);
  return 0;
}

int cmd_sweep(ExperimentFlags& flags, CLI::App* app, const std::string& range) {
  const std::vector<double> fractions = parse_range(range);
  ExperimentConfig cfg = flags.resolve(app);
  cfg.epsilon_r = fractions.front();
  const auto sweep = run_eps_sweep(cfg, fractions, flags.threads);
  Output out(flags.out);
  std::string desc = io::describe(cfg);
  desc = desc.substr(0, desc.find(" central=")) + desc.substr(desc.find(" delta="));
  io::write_comment_header(out.stream(),
                           {std::string("acagp ") + version, "command: sweep-central", "central: " + range, "config: " + desc});
  io::write_sweep_csv(out.stream(), sweep);
  return 0;
}

int cmd_genetic(std::size_t n, std::size_t m, std::size_t k_max, double xi, double dist, std::uint64_t seed,
                const std::string& out_path, const std::string& grid_path) {
  if (n > genetic_size_cap || m > genetic_size_cap)
    throw UsageError("genetic: n and m must not exceed " + std::to_string(genetic_size_cap));
  if (n == 0 || m == 0 || k_max == 0)
    throw UsageError("genetic: n, m and max rank must be positive");
  k_max = std::min({k_max, n, m});

  Rng rng(seed);
  const PlacedClouds clouds = place_clouds(xi, n, m, dist, rng);
  KernelHandle<> kernel;
  const Eigen::MatrixXd a = kernel.assemble_dense(clouds.x, clouds.y);
  const GeneticResult g = genetic_search(a, k_max, !grid_path.empty());
  StoppingParams stop;
  stop.epsilon = 0.0;
  stop.k_max = k_max;
  const Skeleton sk = aca(clouds.x, clouds.y, kernel, stop, rng);
  const std::vector<double> e_aca = relative_errors(a, sk, k_max);
  const std::vector<double> e_svd = svd_rank_errors(a, k_max);

  const std::vector<std::string> header = {
      std::string("acagp ") + version, "command: genetic",
      "config: xi=" + io::fmt9(xi) + " n=" + std::to_string(n) + " m=" + std::to_string(m) + " dist=" + io::fmt9(dist) +
          " max_rank=" + std::to_string(k_max) + " seed=" + std::to_string(seed)};
  Output out(out_path);
  io::write_comment_header(out.stream(), header);
  out.stream() << "rank,genetic,aca,svd,genetic_i,genetic_j\n";
  for (std::size_t k = 0; k < k_max; ++k) {
    out.stream() << k + 1 << ',' << (k < g.errors.size() ? io::fmt9(g.errors[k]) : "nan") << ','
                 << io::fmt9(e_aca[k]) << ',' << io::fmt9(e_svd[k]) << ',';
    if (k < g.pivots.size())
      out.stream() << g.pivots[k].row << ',' << g.pivots[k].col;
    else
      out.stream() << ',';
    out.stream() << '\n';
  }

  if (!grid_path.empty()) {
    Output grid(grid_path);
    io::write_comment_header(grid.stream(), header);
    grid.stream() << "rank,i,j,error\n";
    for (std::size_t k = 0; k < g.grids.size(); ++k)
      for (Eigen::Index i = 0; i < g.grids[k].rows(); ++i)
        for (Eigen::Index j = 0; j < g.grids[k].cols(); ++j)
          grid.stream() << k + 1 << ',' << i << ',' << j << ',' << io::fmt9(g.grids[k](i, j)) << '\n';
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank approximation of kernel interaction matrices with ACA and ACA-GP"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  // approximate
  auto* approx = app.add_subcommand("approximate", "build a skeleton for two clouds and write it as JSON");
  std::vector<std::string> clouds;
  std::string gen, method = "acagp", circles = "auto", approx_out;
  double epsilon = 1e-6, central = 0.0, eta = 1.0;
  std::size_t max_rank = 0, delta = 8;
  std::uint64_t seed = 1;
  bool force = false;
  approx->add_option("--clouds", clouds, "X.json Y.json")->expected(2);
  approx->add_option("--gen", gen, "generate clouds: xi=..,n=..,m=..,dist=..");
  approx->add_option("--method", method, "aca or acagp")->capture_default_str();
  approx->add_option("--epsilon", epsilon, "global tolerance (0: rank only)")->capture_default_str();
  approx->add_option("--max-rank", max_rank, "maximal rank (0: floor(min(n,m)/2))")->capture_default_str();
  approx->add_option("--central", central, "central fraction (0: default rule)")->capture_default_str();
  approx->add_option("--delta", delta, "central subset offset")->capture_default_str();
  approx->add_option("--circles", circles, "auto, on or off")->capture_default_str();
  approx->add_option("--eta", eta, "admissibility parameter")->capture_default_str();
  approx->add_flag("--force", force, "proceed with non-admissible clouds");
  approx->add_option("--seed", seed, "random seed")->capture_default_str();
  approx->add_option("--out", approx_out, "skeleton JSON (standard output when omitted)");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "ACA vs ACA-GP vs SVD statistics over random realizations");
  ExperimentFlags bench_flags;
  bench_flags.attach(bench);
  bench->add_option("--central", bench_flags.cfg.epsilon_r, "central fraction")->capture_default_str();

  // sweep-central
  auto* sweep = app.add_subcommand("sweep-central", "benchmark over a range of central fractions");
  ExperimentFlags sweep_flags;
  sweep_flags.attach(sweep);
  std::string range = "0.1:0.5:0.05";
  sweep->add_option("--central", range, "start:stop:step or a single value")->capture_default_str();

  // genetic
  auto* genetic = app.add_subcommand("genetic", "exhaustive greedy pivot search vs ACA vs SVD on small clouds");
  std::size_t gn = 24, gm = 24, gk = 10;
  double gxi = 1.0, gdist = 1.5;
  std::uint64_t gseed = 1;
  std::string gout, ggrid;
  genetic->add_option("--n", gn, "points in cloud X (<= 64)")->capture_default_str();
  genetic->add_option("--m", gm, "points in cloud Y (<= 64)")->capture_default_str();
  genetic->add_option("--max-rank", gk, "ranks to search")->capture_default_str();
  genetic->add_option("--xi", gxi, "aspect ratio")->capture_default_str();
  genetic->add_option("--dist", gdist, "true distance")->capture_default_str();
  genetic->add_option("--seed", gseed, "random seed")->capture_default_str();
  genetic->add_option("--out", gout, "per-rank CSV (standard output when omitted)");
  genetic->add_option("--grid", ggrid, "also dump the full per-pivot error grid to this CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : exit_input;
  }

  try {
    if (*approx)
      return cmd_approximate(clouds, gen, method, epsilon, max_rank, central, delta, circles, eta, force, seed, approx_out);
    if (*bench)
      return cmd_benchmark(bench_flags, bench);
    if (*sweep)
      return cmd_sweep(sweep_flags, sweep, range);
    if (*genetic)
      return cmd_genetic(gn, gm, gk, gxi, gdist, gseed, gout, ggrid);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  } catch (const acagp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  }
  return exit_input;
}
