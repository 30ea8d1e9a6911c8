#pragma once

#include <acagp/errors.hpp>
#include <acagp/experiments.hpp>
#include <acagp/geometry.hpp>
#include <acagp/lowrank.hpp>
#include <acagp/oracle.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace acagp::io {

using json = nlohmann::json;

/// 9 significant digits; "inf"/"nan" literals for non-finite values.
inline std::string fmt9(double v) {
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Point clouds: {"points": [[x, y], ...]}

inline json cloud_to_json(const PointCloud& cloud) {
  json pts = json::array();
  for (const auto& p : cloud)
    pts.push_back({p.x, p.y});
  return json{{"points", std::move(pts)}};
}

inline PointCloud cloud_from_json(const json& j) {
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array())
    throw InputError("cloud JSON must be an object with a \"points\" array");
  std::vector<Point2> pts;
  for (const auto& p : j["points"]) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw InputError("cloud JSON points must be [x, y] number pairs");
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return PointCloud(std::move(pts));
}

inline PointCloud read_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  return cloud_from_json(j);
}

inline void write_cloud(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write " + path);
  out << cloud_to_json(cloud).dump() << '\n';
}

//
// Skeleton export. U and V are lists of factor columns; pivot_trace records
// how each pivot was chosen.
//
inline json skeleton_to_json(const Skeleton& sk) {
  auto columns = [](const Skeleton& s, bool left) {
    json cols = json::array();
    for (std::size_t l = 0; l < s.rank(); ++l) {
      const Eigen::VectorXd& c = left ? s.u(l) : s.v(l);
      cols.push_back(std::vector<double>(c.data(), c.data() + c.size()));
    }
    return cols;
  };
  json trace = json::array();
  for (const auto& p : sk.trace())
    trace.push_back({{"rank", p.rank},
                     {"i", p.row},
                     {"j", p.col},
                     {"pivot_value", p.value},
                     {"selector", std::string(to_string(p.selector))},
                     {"probes", p.probes}});
  return json{{"rank", sk.rank()},
              {"rows", sk.rows()},
              {"cols", sk.cols()},
              {"pivot_rows", sk.pivot_rows()},
              {"pivot_cols", sk.pivot_cols()},
              {"U", columns(sk, true)},
              {"V", columns(sk, false)},
              {"approx_norm", sk.approx_norm()},
              {"residual_norm", sk.residual_norm()},
              {"kernel_evals", sk.eval_count()},
              {"pivot_trace", std::move(trace)}};
}

/// JSON form of a gain: value, or null plus "infinite": true.
inline json gain_to_json(const Gain& g) {
  if (g.infinite)
    return json{{"value", nullptr}, {"infinite", true}};
  return json{{"value", g.value}, {"infinite", false}};
}

inline std::string describe(const ExperimentConfig& c) {
  return "xi=" + fmt9(c.xi) + " n=" + std::to_string(c.n) + " m=" + std::to_string(c.m) + " dist=" + fmt9(c.target_dist) +
         " realizations=" + std::to_string(c.realizations) + " max_rank=" + std::to_string(c.k_max) +
         " central=" + fmt9(c.epsilon_r) + " delta=" + std::to_string(c.delta) + " circles=" + to_string(c.circles) +
         " eta=" + fmt9(c.eta) + " seed=" + std::to_string(c.base_seed);
}

inline void write_comment_header(std::ostream& os, const std::vector<std::string>& lines) {
  for (const auto& l : lines)
    os << "# " << l << '\n';
}

inline constexpr const char* results_csv_header =
    "rank,method,e_log_mean,e_log_std,gain_log_mean,gain_log_std,inf_gain_count,kernel_evals_mean";

inline void write_results_csv(std::ostream& os, const std::vector<RankStats>& stats) {
  os << results_csv_header << '\n';
  for (const auto& s : stats) {
    auto row = [&](const char* method, const MethodStats& ms, bool with_gain) {
      os << s.rank << ',' << method << ',' << fmt9(ms.e_log_mean) << ',' << fmt9(ms.e_log_std) << ',';
      if (with_gain) {
        if (s.gain_count > 0)
          os << fmt9(s.gain_log_mean) << ',' << fmt9(s.gain_log_std);
        else if (s.inf_gain_count > 0)
          os << "inf,";
        else
          os << "nan,";
        os << ',' << s.inf_gain_count;
      } else {
        os << ",,";
      }
      os << ',' << fmt9(ms.kernel_evals_mean) << '\n';
    };
    row("aca", s.aca, false);
    row("acagp", s.acagp, true);
    row("svd", s.svd, false);
  }
}

inline constexpr const char* sweep_csv_header =
    "epsilon_r,rank,tilde_ratio_log_mean,tilde_ratio_log_std,gain_log_mean,gain_log_std,inf_gain_count";

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& sweep) {
  os << sweep_csv_header << '\n';
  for (const auto& pt : sweep)
    for (const auto& s : pt.stats) {
      os << fmt9(pt.epsilon_r) << ',' << s.rank << ',';
      if (s.tilde_ratio_count > 0)
        os << fmt9(s.tilde_ratio_log_mean) << ',' << fmt9(s.tilde_ratio_log_std);
      else
        os << "nan,";
      os << ',';
      if (s.gain_count > 0)
        os << fmt9(s.gain_log_mean) << ',' << fmt9(s.gain_log_std);
      else if (s.inf_gain_count > 0)
        os << "inf,";
      else
        os << "nan,";
      os << ',' << s.inf_gain_count << '\n';
    }
}

} // namespace acagp::io
