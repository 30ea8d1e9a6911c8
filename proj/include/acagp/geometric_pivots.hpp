#pragma once

#include <acagp/errors.hpp>
#include <acagp/geometry.hpp>
#include <acagp/kernel.hpp>
#include <acagp/lowrank.hpp>
#include <acagp/rng.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

//
// ACA with geometrical pivots (ACA-GP).
//
// Rank 1 is pivoted at the points closest to the barycenters (on the side
// facing the other cloud). Later pivots are restricted to the central subsets,
// the points within a fraction eps_r of the diameter from the first pivot:
//   rank 2  random central row, column walked along the circle through
//           x_i1, y_j1, x_i2 until the residual stops increasing
//   rank 3  row nearest to the conjugate circle at x_i1, column walked along
//           the conjugate circle at y_j1
//   rank 4+ random trial row, then residual argmax over central columns and
//           central rows
// Factor scaling, norm recursion and stopping are those of classical ACA.
//
namespace acagp {

enum class CircleMode { Auto, On, Off };

struct GpOptions {
  /// Initial central fraction; unset selects default_epsilon_r().
  std::optional<double> epsilon_r;
  /// Extra points required in each central subset beyond k_max.
  std::size_t delta = 8;
  CircleMode circles = CircleMode::Auto;
  /// Auto enables the rank-2/3 circles when both clouds' principal aspect ratio reaches this value.
  double aspect_threshold = 0.75;
};

/// max(0.25, 2 sqrt(k_max / min(n, m))), clamped to 1.
inline double default_epsilon_r(std::size_t k_max, std::size_t n, std::size_t m) noexcept {
  const double rule = 2.0 * std::sqrt(static_cast<double>(k_max) / static_cast<double>(std::min(n, m)));
  return std::min(1.0, std::max(0.25, rule));
}

struct CentralSubset {
  std::vector<std::size_t> indices; // ascending
  double epsilon_r = 0.0;           // fraction after growth
};

struct CentralSubsets {
  CentralSubset rows;
  CentralSubset cols;
};

/// Index closest to the barycenter among points strictly on the half-plane facing `toward`.
inline std::size_t first_pivot_index(const PointCloud& cloud, Point2 toward) noexcept {
  const Point2 c = cloud.barycenter();
  const Point2 dir = toward - c;
  std::optional<std::size_t> best;
  double best_d = 0.0;
  for (int pass = 0; pass < 2 && !best; ++pass) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (pass == 0 && !(dot(cloud[i] - c, dir) > 0.0))
        continue;
      const double d = distance(cloud[i], c);
      if (!best || d < best_d) {
        best = i;
        best_d = d;
      }
    }
  }
  return *best;
}

inline std::pair<std::size_t, std::size_t> first_pivot(const PointCloud& x, const PointCloud& y) noexcept {
  return {first_pivot_index(x, y.barycenter()), first_pivot_index(y, x.barycenter())};
}

//
// Indices within eps_r * diam of the pivot point, eps_r grown by 10% until at
// least `target` points are enclosed. target is clamped to the cloud size.
//
inline CentralSubset central_subset(const PointCloud& cloud, std::size_t pivot, double epsilon_r, std::size_t target) {
  if (!(epsilon_r > 0.0))
    throw InputError("central_subset: epsilon_r must be positive");
  target = std::min(target, cloud.size());
  const Point2 centre = cloud[pivot];
  CentralSubset out{{}, epsilon_r};
  while (true) {
    out.indices.clear();
    const double radius = out.epsilon_r * cloud.diameter();
    for (std::size_t i = 0; i < cloud.size(); ++i)
      if (distance(cloud[i], centre) <= radius)
        out.indices.push_back(i);
    if (out.indices.size() >= target)
      return out;
    out.epsilon_r *= 1.1;
  }
}

struct PivotChoice {
  std::size_t row = 0;
  std::size_t col = 0;
  double residual = 0.0;
  Selector selector = Selector::central;
  std::size_t probes = 0;
};

//
// Walks `ordered` candidates, stopping at the first one whose residual
// magnitude does not exceed the previous one's; the previous candidate is
// returned. If the candidates run out, the last (largest) one is returned.
//
template <class ResidualFn>
std::optional<std::pair<std::size_t, double>> descend_until_residual_drops(const std::vector<std::size_t>& ordered,
                                                                          ResidualFn&& residual, std::size_t& probes) {
  std::optional<std::pair<std::size_t, double>> prev;
  for (std::size_t j : ordered) {
    const double r = residual(j);
    ++probes;
    if (prev && std::abs(r) <= std::abs(prev->second))
      return prev;
    prev = {j, r};
  }
  return prev;
}

/// Candidates sorted by distance to `circle`, ties to the smaller index.
inline std::vector<std::size_t> order_by_circle_distance(const PointCloud& cloud, const std::vector<std::size_t>& candidates,
                                                         const Circle& circle) {
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(candidates.size());
  for (std::size_t i : candidates)
    keyed.emplace_back(point_circle_distance(cloud[i], circle), i);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::size_t> out;
  out.reserve(keyed.size());
  for (const auto& kv : keyed)
    out.push_back(kv.second);
  return out;
}

struct Rank2Choice {
  PivotChoice pivot;
  Circle circle;
};

//
// Rank-2 pivot. `rows` and `cols` are the central subsets without the first
// pivot. Throws DegenerateError when x_i1, y_j1, x_i2 are collinear; returns
// nullopt when a subset is empty.
//
template <Kernel K>
std::optional<Rank2Choice> select_rank2(const PointCloud& x, const PointCloud& y, const Skeleton& sk,
                                        const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                                        KernelHandle<K>& kernel, Rng& rng) {
  if (rows.empty() || cols.empty() || sk.rank() == 0)
    return std::nullopt;
  const PivotRecord& first = sk.trace()[0];
  const std::size_t i2 = rows[rng.index(rows.size())];
  const Circle c2 = circumcircle(x[first.row], y[first.col], x[i2]);

  PivotChoice choice{i2, 0, 0.0, Selector::circle2, 0};
  const auto best = descend_until_residual_drops(
      order_by_circle_distance(y, cols, c2), [&](std::size_t j) { return residual_entry(sk, i2, j, kernel, x, y); },
      choice.probes);
  choice.col = best->first;
  choice.residual = best->second;
  return Rank2Choice{choice, c2};
}

//
// Rank-3 pivot from the conjugate circles of c2 at x_i1 and y_j1, each
// leaning toward the other cloud's first pivot. Throws DegenerateError if a
// conjugate circle cannot be built.
//
template <Kernel K>
std::optional<PivotChoice> select_rank3(const PointCloud& x, const PointCloud& y, const Skeleton& sk, const Circle& c2,
                                        const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                                        KernelHandle<K>& kernel) {
  if (rows.empty() || cols.empty() || sk.rank() == 0)
    return std::nullopt;
  const Point2 xp = x[sk.trace()[0].row];
  const Point2 yp = y[sk.trace()[0].col];
  const Circle cx = conjugate_circle(c2, xp, yp - xp);
  const Circle cy = conjugate_circle(c2, yp, xp - yp);

  const std::size_t i3 = order_by_circle_distance(x, rows, cx).front();
  PivotChoice choice{i3, 0, 0.0, Selector::circle3, 0};
  const auto best = descend_until_residual_drops(
      order_by_circle_distance(y, cols, cy), [&](std::size_t j) { return residual_entry(sk, i3, j, kernel, x, y); },
      choice.probes);
  choice.col = best->first;
  choice.residual = best->second;
  return choice;
}

//
// Higher-rank pivot: random trial row, column maximizing |R(trial, j)| over
// the central columns, then row maximizing |R(i, j_k)| over the central rows.
// Ties go to the smaller index.
//
template <Kernel K>
std::optional<PivotChoice> select_higher(const PointCloud& x, const PointCloud& y, const Skeleton& sk,
                                         const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                                         KernelHandle<K>& kernel, Rng& rng) {
  if (rows.empty() || cols.empty())
    return std::nullopt;
  PivotChoice choice;
  const std::size_t trial = rows[rng.index(rows.size())];

  double best = -1.0;
  for (std::size_t j : cols) {
    const double r = std::abs(residual_entry(sk, trial, j, kernel, x, y));
    if (r > best) {
      best = r;
      choice.col = j;
    }
  }
  best = -1.0;
  for (std::size_t i : rows) {
    const double r = residual_entry(sk, i, choice.col, kernel, x, y);
    if (std::abs(r) > best) {
      best = std::abs(r);
      choice.row = i;
      choice.residual = r;
    }
  }
  choice.probes = rows.size() + cols.size();
  return choice;
}

struct AcaGpResult {
  Skeleton skeleton;
  CentralSubsets subsets; // final (possibly grown) subsets, empty below rank 2
  bool circles_enabled = false;
};

namespace detail {

inline void erase_index(std::vector<std::size_t>& v, std::size_t idx) {
  const auto it = std::lower_bound(v.begin(), v.end(), idx);
  if (it != v.end() && *it == idx)
    v.erase(it);
}

// Grows the subset by 10% steps until it holds an unused index or covers the cloud.
inline bool refill(const PointCloud& cloud, std::size_t pivot, CentralSubset& subset, std::vector<std::size_t>& work,
                   const std::vector<bool>& used) {
  while (work.empty()) {
    if (subset.indices.size() == cloud.size())
      return false;
    subset = central_subset(cloud, pivot, subset.epsilon_r * 1.1, subset.indices.size() + 1);
    for (std::size_t i : subset.indices)
      if (!used[i])
        work.push_back(i);
  }
  return true;
}

// Rows are the larger cloud; equal sizes are ordered by barycenter, then by points.
inline bool keep_orientation(const PointCloud& x, const PointCloud& y) {
  if (x.size() != y.size())
    return x.size() > y.size();
  const Point2 a = x.barycenter(), b = y.barycenter();
  if (a.x != b.x)
    return a.x < b.x;
  if (a.y != b.y)
    return a.y < b.y;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].x != y[i].x)
      return x[i].x < y[i].x;
    if (x[i].y != y[i].y)
      return x[i].y < y[i].y;
  }
  return true;
}

template <Kernel K>
AcaGpResult aca_gp_oriented(const PointCloud& x, const PointCloud& y, KernelHandle<K>& kernel, const StoppingParams& stop,
                            const GpOptions& opts, Rng& rng) {
  const std::size_t n = x.size(), m = y.size();
  const std::size_t k_max = stop.resolved_k_max(n, m);
  const std::uint64_t start = kernel.eval_count();
  AcaGpResult out{Skeleton(n, m), {}, false};
  Skeleton& sk = out.skeleton;
  auto finish = [&]() -> AcaGpResult {
    sk.set_eval_count(kernel.eval_count() - start);
    return std::move(out);
  };

  const auto [i1, j1] = first_pivot(x, y);
  const Eigen::VectorXd v1 = residual_row(sk, i1, kernel, x, y);
  if (v1[static_cast<Eigen::Index>(j1)] == 0.0)
    return finish();
  const Eigen::VectorXd u1 = residual_col(sk, j1, kernel, x, y);
  append_cross(sk, u1, v1, PivotRecord{0, i1, j1, 0.0, Selector::first, 0, kernel.eval_count() - start});
  const double pivot_floor = stop.epsilon_p * std::abs(sk.trace()[0].value);
  if (sk.rank() >= k_max || sk.residual_norm() <= stop.epsilon * sk.approx_norm())
    return finish();

  const double eps_r = opts.epsilon_r.value_or(default_epsilon_r(k_max, n, m));
  if (!(eps_r > 0.0 && eps_r <= 1.0))
    throw InputError("aca_gp: epsilon_r must lie in (0, 1]");
  out.subsets.rows = central_subset(x, i1, eps_r, k_max + opts.delta);
  out.subsets.cols = central_subset(y, j1, eps_r, k_max + opts.delta);
  std::vector<bool> row_used(n, false), col_used(m, false);
  row_used[i1] = true;
  col_used[j1] = true;
  std::vector<std::size_t> rows = out.subsets.rows.indices, cols = out.subsets.cols.indices;
  erase_index(rows, i1);
  erase_index(cols, j1);

  out.circles_enabled =
      opts.circles == CircleMode::On ||
      (opts.circles == CircleMode::Auto && principal_aspect_ratio(x) >= opts.aspect_threshold &&
       principal_aspect_ratio(y) >= opts.aspect_threshold);
  std::optional<Circle> c2;

  while (sk.rank() < k_max) {
    if (!refill(x, i1, out.subsets.rows, rows, row_used) || !refill(y, j1, out.subsets.cols, cols, col_used))
      break;
    const std::size_t r = sk.rank() + 1;
    std::optional<PivotChoice> choice;
    try {
      if (r == 2 && out.circles_enabled) {
        if (auto c = select_rank2(x, y, sk, rows, cols, kernel, rng)) {
          choice = c->pivot;
          c2 = c->circle;
        }
      } else if (r == 3 && c2) {
        choice = select_rank3(x, y, sk, *c2, rows, cols, kernel);
      }
    } catch (const DegenerateError&) {
      choice.reset();
    }
    if (!choice)
      choice = select_higher(x, y, sk, rows, cols, kernel, rng);
    if (!choice)
      break;

    erase_index(rows, choice->row);
    erase_index(cols, choice->col);
    row_used[choice->row] = true;
    col_used[choice->col] = true;
    if (!(std::abs(choice->residual) > pivot_floor))
      break;

    const Eigen::VectorXd v_tilde = residual_row(sk, choice->row, kernel, x, y);
    const Eigen::VectorXd u_tilde = residual_col(sk, choice->col, kernel, x, y);
    append_cross(sk, u_tilde, v_tilde, PivotRecord{0, choice->row, choice->col, 0.0, choice->selector, choice->probes,
                                                      kernel.eval_count() - start});
    if (sk.residual_norm() <= stop.epsilon * sk.approx_norm())
      break;
  }
  return finish();
}

} // namespace detail

//
// Full ACA-GP run with its central subsets. The internal computation always
// puts the larger cloud (or, for equal sizes, a canonically ordered one) on
// the rows, so aca_gp(X, Y) and aca_gp(Y, X) are transposes of each other.
//
template <Kernel K>
AcaGpResult aca_gp_detailed(const PointCloud& x, const PointCloud& y, KernelHandle<K>& kernel, const StoppingParams& stop,
                            const GpOptions& opts, Rng& rng) {
  if (detail::keep_orientation(x, y))
    return detail::aca_gp_oriented(x, y, kernel, stop, opts, rng);
  KernelHandle<SwappedKernel<K>> swapped(SwappedKernel<K>{kernel.kernel()});
  AcaGpResult r = detail::aca_gp_oriented(y, x, swapped, stop, opts, rng);
  kernel.add_evaluations(swapped.eval_count());
  const std::uint64_t evals = r.skeleton.eval_count();
  AcaGpResult out{r.skeleton.transposed(), {r.subsets.cols, r.subsets.rows}, r.circles_enabled};
  out.skeleton.set_eval_count(evals);
  return out;
}

template <Kernel K>
Skeleton aca_gp(const PointCloud& x, const PointCloud& y, KernelHandle<K>& kernel, const StoppingParams& stop,
                const GpOptions& opts, Rng& rng) {
  return aca_gp_detailed(x, y, kernel, stop, opts, rng).skeleton;
}

} // namespace acagp
