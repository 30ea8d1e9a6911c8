#pragma once

#include <acagp/errors.hpp>
#include <acagp/geometry.hpp>
#include <acagp/kernel.hpp>
#include <acagp/rng.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace acagp {

/// How a pivot was chosen.
enum class Selector { partial, first, circle2, circle3, central };

inline std::string_view to_string(Selector s) noexcept {
  switch (s) {
  case Selector::partial: return "partial";
  case Selector::first: return "first";
  case Selector::circle2: return "circle2";
  case Selector::circle3: return "circle3";
  case Selector::central: return "central";
  }
  return "unknown";
}

struct PivotRecord {
  std::size_t rank = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;
  Selector selector = Selector::partial;
  /// Residual entries probed while choosing this pivot (beyond the row/column).
  std::size_t probes = 0;
  /// Kernel evaluations spent by the run up to and including this rank.
  std::uint64_t evals = 0;
};

struct NormUpdate {
  double approx_norm = 0.0;
  double residual_norm = 0.0;
  bool clamped = false;
};

//
// Rank-k factorization A'_k = U V^T built from scaled residual crosses:
//   u_l = sign(p_l) ũ_l / sqrt|p_l|,   v_l = ṽ_l / sqrt|p_l|.
// The running Frobenius norm of A'_k and the last cross norm |u_k||v_k| are
// kept for every rank so that prefixes can be extracted without recomputing.
//
class Skeleton {
public:
  Skeleton(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t rank() const noexcept { return u_.size(); }

  const Eigen::VectorXd& u(std::size_t l) const { return u_.at(l); }
  const Eigen::VectorXd& v(std::size_t l) const { return v_.at(l); }
  std::span<const PivotRecord> trace() const noexcept { return trace_; }

  std::vector<std::size_t> pivot_rows() const {
    std::vector<std::size_t> r;
    for (const auto& p : trace_)
      r.push_back(p.row);
    return r;
  }
  std::vector<std::size_t> pivot_cols() const {
    std::vector<std::size_t> c;
    for (const auto& p : trace_)
      c.push_back(p.col);
    return c;
  }
  std::vector<double> pivot_values() const {
    std::vector<double> c;
    for (const auto& p : trace_)
      c.push_back(p.value);
    return c;
  }

  /// |A'_k|_F from the norm recursion (0 at rank 0).
  double approx_norm() const noexcept { return approx_norms_.empty() ? 0.0 : approx_norms_.back(); }
  double approx_norm(std::size_t k) const { return k == 0 ? 0.0 : approx_norms_.at(k - 1); }
  /// |u_k| |v_k| of the last cross.
  double residual_norm() const noexcept { return residual_norms_.empty() ? 0.0 : residual_norms_.back(); }
  double residual_norm(std::size_t k) const { return k == 0 ? 0.0 : residual_norms_.at(k - 1); }
  /// Set when cancellation drove the norm recursion radicand negative.
  bool norm_clamped() const noexcept { return clamped_; }

  std::uint64_t eval_count() const noexcept { return eval_count_; }
  void set_eval_count(std::uint64_t c) noexcept { eval_count_ = c; }

  bool has_row(std::size_t i) const noexcept {
    return std::any_of(trace_.begin(), trace_.end(), [&](const PivotRecord& p) { return p.row == i; });
  }
  bool has_col(std::size_t j) const noexcept {
    return std::any_of(trace_.begin(), trace_.end(), [&](const PivotRecord& p) { return p.col == j; });
  }

  /// Norm recursion for appending (u, v); does not modify the skeleton.
  NormUpdate norms_with(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    const double uu = u.squaredNorm(), vv = v.squaredNorm();
    const double r2 = uu * vv;
    double cross_sum = 0.0;
    for (std::size_t l = 0; l < u_.size(); ++l)
      cross_sum += u.dot(u_[l]) * v_[l].dot(v);
    const double prev = approx_norm();
    double radicand = prev * prev + 2.0 * cross_sum + r2;
    NormUpdate out;
    if (radicand < 0.0) {
      radicand = 0.0;
      out.clamped = true;
    }
    out.approx_norm = std::sqrt(radicand);
    out.residual_norm = std::sqrt(r2);
    return out;
  }

  /// Appends an already scaled pair (u, v). Pivot indices must be new.
  void append(Eigen::VectorXd u, Eigen::VectorXd v, PivotRecord pivot) {
    if (static_cast<std::size_t>(u.size()) != rows_ || static_cast<std::size_t>(v.size()) != cols_)
      throw std::invalid_argument("Skeleton::append: vector length mismatch");
    if (pivot.row >= rows_ || pivot.col >= cols_ || has_row(pivot.row) || has_col(pivot.col))
      throw std::invalid_argument("Skeleton::append: pivot index repeated or out of range");
    const NormUpdate nu = norms_with(u, v);
    clamped_ = clamped_ || nu.clamped;
    approx_norms_.push_back(nu.approx_norm);
    residual_norms_.push_back(nu.residual_norm);
    pivot.rank = u_.size() + 1;
    trace_.push_back(pivot);
    u_.push_back(std::move(u));
    v_.push_back(std::move(v));
  }

  /// The first k crosses.
  Skeleton truncated(std::size_t k) const {
    Skeleton s(rows_, cols_);
    k = std::min(k, rank());
    s.u_.assign(u_.begin(), u_.begin() + static_cast<std::ptrdiff_t>(k));
    s.v_.assign(v_.begin(), v_.begin() + static_cast<std::ptrdiff_t>(k));
    s.trace_.assign(trace_.begin(), trace_.begin() + static_cast<std::ptrdiff_t>(k));
    s.approx_norms_.assign(approx_norms_.begin(), approx_norms_.begin() + static_cast<std::ptrdiff_t>(k));
    s.residual_norms_.assign(residual_norms_.begin(), residual_norms_.begin() + static_cast<std::ptrdiff_t>(k));
    s.clamped_ = clamped_;
    s.eval_count_ = eval_count_;
    return s;
  }

  /// Skeleton of A^T. The sign of each pivot stays on the row factor.
  Skeleton transposed() const {
    Skeleton s(cols_, rows_);
    for (std::size_t l = 0; l < rank(); ++l) {
      const double sg = trace_[l].value < 0.0 ? -1.0 : 1.0;
      s.u_.push_back(sg * v_[l]);
      s.v_.push_back(sg * u_[l]);
      PivotRecord p = trace_[l];
      std::swap(p.row, p.col);
      s.trace_.push_back(p);
    }
    s.approx_norms_ = approx_norms_;
    s.residual_norms_ = residual_norms_;
    s.clamped_ = clamped_;
    s.eval_count_ = eval_count_;
    return s;
  }

private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Eigen::VectorXd> u_;
  std::vector<Eigen::VectorXd> v_;
  std::vector<PivotRecord> trace_;
  std::vector<double> approx_norms_;
  std::vector<double> residual_norms_;
  bool clamped_ = false;
  std::uint64_t eval_count_ = 0;
};

struct StoppingParams {
  /// Global tolerance: stop once |R_k| <= epsilon |A'_k|. 0 disables it.
  double epsilon = 1e-6;
  /// Maximal rank; 0 selects floor(min(n, m) / 2) (at least 1).
  std::size_t k_max = 0;
  /// Pivot tolerance relative to the magnitude of the first pivot.
  double epsilon_p = 1e-12;

  std::size_t resolved_k_max(std::size_t n, std::size_t m) const noexcept {
    const std::size_t cap = std::min(n, m);
    if (k_max == 0)
      return std::max<std::size_t>(1, cap / 2);
    return std::min(k_max, cap);
  }
};

/// Residual entry a_ij - sum_l u_l(i) v_l(j); one kernel evaluation.
template <Kernel K>
double residual_entry(const Skeleton& sk, std::size_t i, std::size_t j, KernelHandle<K>& kernel, const PointCloud& x,
                      const PointCloud& y) {
  double r = kernel.eval(x[i], y[j]);
  const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
  for (std::size_t l = 0; l < sk.rank(); ++l)
    r -= sk.u(l)[ii] * sk.v(l)[jj];
  return r;
}

/// Residual row i (m evaluations). Entries agree bit-for-bit with residual_entry.
template <Kernel K>
Eigen::VectorXd residual_row(const Skeleton& sk, std::size_t i, KernelHandle<K>& kernel, const PointCloud& x,
                             const PointCloud& y) {
  Eigen::VectorXd row = kernel.eval_row(x, y, i);
  const auto ii = static_cast<Eigen::Index>(i);
  for (std::size_t l = 0; l < sk.rank(); ++l) {
    const double s = sk.u(l)[ii];
    const Eigen::VectorXd& vl = sk.v(l);
    for (Eigen::Index j = 0; j < row.size(); ++j)
      row[j] -= s * vl[j];
  }
  return row;
}

/// Residual column j (n evaluations).
template <Kernel K>
Eigen::VectorXd residual_col(const Skeleton& sk, std::size_t j, KernelHandle<K>& kernel, const PointCloud& x,
                             const PointCloud& y) {
  Eigen::VectorXd col = kernel.eval_col(x, y, j);
  const auto jj = static_cast<Eigen::Index>(j);
  for (std::size_t l = 0; l < sk.rank(); ++l) {
    const double s = sk.v(l)[jj];
    const Eigen::VectorXd& ul = sk.u(l);
    for (Eigen::Index i = 0; i < col.size(); ++i)
      col[i] -= ul[i] * s;
  }
  return col;
}

/// Scales the residual cross (ũ, ṽ) pivoted at (i, j) and appends it.
inline void append_cross(Skeleton& sk, const Eigen::VectorXd& u_tilde, const Eigen::VectorXd& v_tilde, PivotRecord pivot) {
  const double p = v_tilde[static_cast<Eigen::Index>(pivot.col)];
  pivot.value = p;
  const double scale = 1.0 / std::sqrt(std::abs(p));
  const double sg = p < 0.0 ? -1.0 : 1.0;
  sk.append(Eigen::VectorXd(sg * scale * u_tilde), Eigen::VectorXd(scale * v_tilde), pivot);
}

/// Norm recursion for a candidate pair (does not modify the skeleton).
inline NormUpdate update_norms(const Skeleton& sk, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return sk.norms_with(u, v);
}

/// Stored-data fraction k(n+m)/(nm).
inline double compression_ratio(std::size_t k, std::size_t n, std::size_t m) noexcept {
  return static_cast<double>(k) * static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m));
}

inline double compression_ratio(const Skeleton& sk) noexcept { return compression_ratio(sk.rank(), sk.rows(), sk.cols()); }

/// Dense U V^T of the first k crosses (all when k is omitted).
inline Eigen::MatrixXd dense(const Skeleton& sk, std::optional<std::size_t> k = std::nullopt) {
  const std::size_t r = std::min(k.value_or(sk.rank()), sk.rank());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sk.rows()), static_cast<Eigen::Index>(sk.cols()));
  for (std::size_t l = 0; l < r; ++l)
    a.noalias() += sk.u(l) * sk.v(l).transpose();
  return a;
}

//
// Row rule of partial pivoting: a seeded random unused row while the skeleton
// is empty, afterwards the unused row maximizing |u_{k-1}| (ties to the
// smallest index). nullopt when every row has been used.
//
inline std::optional<std::size_t> pivot_row_rule(const Skeleton& sk, const std::vector<bool>& row_used, Rng& rng) {
  const auto unused = static_cast<std::size_t>(std::count(row_used.begin(), row_used.end(), false));
  if (unused == 0)
    return std::nullopt;
  if (sk.rank() == 0) {
    std::size_t pick = rng.index(unused);
    for (std::size_t i = 0; i < row_used.size(); ++i)
      if (!row_used[i] && pick-- == 0)
        return i;
  }
  const Eigen::VectorXd& last = sk.u(sk.rank() - 1);
  std::optional<std::size_t> best;
  double best_val = -1.0;
  for (std::size_t i = 0; i < row_used.size(); ++i) {
    if (row_used[i])
      continue;
    const double a = std::abs(last[static_cast<Eigen::Index>(i)]);
    if (a > best_val) {
      best_val = a;
      best = i;
    }
  }
  return best;
}

//
// Classical partially pivoted ACA. Each accepted rank costs exactly one row
// (m evaluations) and one column (n evaluations); the pivot is read from the
// evaluated row. Rows whose residual vanishes are skipped.
//
template <Kernel K>
Skeleton aca(const PointCloud& x, const PointCloud& y, KernelHandle<K>& kernel, const StoppingParams& stop, Rng& rng) {
  const std::size_t n = x.size(), m = y.size();
  const std::size_t k_max = stop.resolved_k_max(n, m);
  const std::uint64_t start = kernel.eval_count();

  Skeleton sk(n, m);
  std::vector<bool> row_used(n, false), col_used(m, false);
  double pivot_floor = 0.0;

  while (sk.rank() < k_max) {
    const auto i = pivot_row_rule(sk, row_used, rng);
    if (!i)
      break;
    row_used[*i] = true;
    const Eigen::VectorXd v_tilde = residual_row(sk, *i, kernel, x, y);

    std::optional<std::size_t> j;
    double best = -1.0;
    for (std::size_t c = 0; c < m; ++c) {
      if (col_used[c])
        continue;
      const double a = std::abs(v_tilde[static_cast<Eigen::Index>(c)]);
      if (a > best) {
        best = a;
        j = c;
      }
    }
    if (!j || !(best > pivot_floor))
      continue;

    col_used[*j] = true;
    const Eigen::VectorXd u_tilde = residual_col(sk, *j, kernel, x, y);
    append_cross(sk, u_tilde, v_tilde, PivotRecord{0, *i, *j, 0.0, Selector::partial, 0, kernel.eval_count() - start});
    if (sk.rank() == 1)
      pivot_floor = stop.epsilon_p * std::abs(sk.trace()[0].value);
    if (sk.residual_norm() <= stop.epsilon * sk.approx_norm())
      break;
  }
  sk.set_eval_count(kernel.eval_count() - start);
  return sk;
}

} // namespace acagp
