#pragma once

#include <acagp/errors.hpp>
#include <acagp/lowrank.hpp>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace acagp {

/// Per-rank errors of one approximation, with the SVD reference.
struct ErrorReport {
  std::size_t rank = 0;
  double rel_error = 0.0;
  double svd_error = 0.0;
  std::optional<double> tilde_error; // unset when the SVD error vanishes
};

/// Relative optimal errors sqrt(sum_{i>k} s_i^2) / |A|_F for k = 1..k_max.
inline std::vector<double> svd_rank_errors(const Eigen::MatrixXd& a, std::size_t k_max) {
  const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues();
  const auto r = static_cast<std::size_t>(s.size());
  // Tail sums accumulated from the smallest singular value upward.
  std::vector<double> tail(r + 1, 0.0);
  for (std::size_t i = r; i-- > 0;)
    tail[i] = tail[i + 1] + s[static_cast<Eigen::Index>(i)] * s[static_cast<Eigen::Index>(i)];
  const double total = tail[0];
  std::vector<double> out(k_max, 0.0);
  if (total == 0.0)
    return out;
  for (std::size_t k = 1; k <= k_max; ++k)
    out[k - 1] = k < r ? std::sqrt(tail[k] / total) : 0.0;
  return out;
}

/// |A - U_k V_k^T|_F / |A|_F for k = 1..k_max; ranks past the skeleton repeat its final error.
inline std::vector<double> relative_errors(const Eigen::MatrixXd& a, const Skeleton& sk, std::size_t k_max) {
  const double norm_a = a.norm();
  Eigen::MatrixXd residual = a;
  std::vector<double> out;
  out.reserve(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (k <= sk.rank())
      residual.noalias() -= sk.u(k - 1) * sk.v(k - 1).transpose();
    out.push_back(residual.norm() / norm_a);
  }
  return out;
}

inline double relative_error(const Eigen::MatrixXd& a, const Skeleton& sk) {
  return (a - dense(sk)).norm() / a.norm();
}

/// (E - E_svd) / E_svd; unset when E_svd <= 1e-14.
inline std::optional<double> tilde_error(double e, double e_svd) noexcept {
  if (!(e_svd > 1e-14))
    return std::nullopt;
  return (e - e_svd) / e_svd;
}

struct Gain {
  double value = 0.0;
  bool infinite = false;
};

/// (E_aca - E_svd) / (E_acagp - E_svd); flagged infinite when the denominator is <= 1e-14.
inline Gain gain(double e_aca, double e_acagp, double e_svd) noexcept {
  const double denom = e_acagp - e_svd;
  if (!(denom > 1e-14))
    return {std::numeric_limits<double>::infinity(), true};
  return {(e_aca - e_svd) / denom, false};
}

inline constexpr std::size_t genetic_size_cap = 64;

struct GeneticPivot {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
};

struct GeneticResult {
  std::vector<GeneticPivot> pivots;
  std::vector<double> errors; // relative error after each rank
  /// Optional per-rank error field E_k(i, j); NaN for excluded candidates.
  std::vector<Eigen::MatrixXd> grids;
};

//
// Greedy exhaustive pivot search: at every rank, each unused (i, j) with a
// usable pivot is tried by subtracting its residual cross R(:,j) R(i,:)/R(i,j)
// and measuring the dense Frobenius error; the best one (ties to the
// lexicographically smallest pair) is kept. O(k n^2 m^2).
//
inline GeneticResult genetic_search(const Eigen::MatrixXd& a, std::size_t k_max, bool keep_grids = false,
                                    double epsilon_p = 1e-12, std::size_t cap = genetic_size_cap) {
  const auto n = static_cast<std::size_t>(a.rows()), m = static_cast<std::size_t>(a.cols());
  if (n > cap || m > cap)
    throw CapExceeded("genetic_search: matrix larger than " + std::to_string(cap) + " in a dimension");
  k_max = std::min({k_max, n, m});
  const double norm_a = a.norm();
  const double floor = epsilon_p * a.cwiseAbs().maxCoeff();

  GeneticResult out;
  Eigen::MatrixXd r = a;
  std::vector<bool> row_used(n, false), col_used(m, false);
  for (std::size_t k = 1; k <= k_max; ++k) {
    Eigen::MatrixXd grid;
    if (keep_grids)
      grid = Eigen::MatrixXd::Constant(a.rows(), a.cols(), std::numeric_limits<double>::quiet_NaN());
    std::optional<GeneticPivot> best;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (row_used[i])
        continue;
      for (std::size_t j = 0; j < m; ++j) {
        const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
        const double p = r(ii, jj);
        if (col_used[j] || !(std::abs(p) >= floor) || p == 0.0)
          continue;
        double sq = 0.0;
        for (Eigen::Index s = 0; s < a.rows(); ++s)
          for (Eigen::Index t = 0; t < a.cols(); ++t) {
            const double d = r(s, t) - r(s, jj) * r(ii, t) / p;
            sq += d * d;
          }
        const double err = std::sqrt(sq) / norm_a;
        if (keep_grids)
          grid(ii, jj) = err;
        if (err < best_err) {
          best_err = err;
          best = GeneticPivot{i, j, p};
        }
      }
    }
    if (!best)
      break;
    const auto bi = static_cast<Eigen::Index>(best->row), bj = static_cast<Eigen::Index>(best->col);
    const Eigen::VectorXd col = r.col(bj);
    const Eigen::RowVectorXd row = r.row(bi);
    for (Eigen::Index s = 0; s < a.rows(); ++s)
      for (Eigen::Index t = 0; t < a.cols(); ++t)
        r(s, t) -= col[s] * row[t] / best->value;
    row_used[best->row] = true;
    col_used[best->col] = true;
    out.pivots.push_back(*best);
    out.errors.push_back(best_err);
    if (keep_grids)
      out.grids.push_back(std::move(grid));
  }
  return out;
}

} // namespace acagp
