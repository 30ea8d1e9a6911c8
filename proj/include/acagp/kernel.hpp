#pragma once

#include <acagp/errors.hpp>
#include <acagp/geometry.hpp>

#include <Eigen/Dense>

#include <atomic>
#include <concepts>
#include <cstdint>
#include <string>

namespace acagp {

/// A scalar interaction kernel kappa(x, y).
template <class K>
concept Kernel = std::copy_constructible<K> && requires(const K& k, Point2 x, Point2 y) {
  { k(x, y) } -> std::convertible_to<double>;
};

/// kappa(x, y) = 1 / |x - y|.
struct InverseDistanceKernel {
  static constexpr const char* name = "inverse_distance";

  double operator()(Point2 x, Point2 y) const {
    const double r = distance(x, y);
    if (r < 1e-14)
      throw SingularEvaluation("inverse distance kernel evaluated at coincident points");
    return 1.0 / r;
  }
};

/// kappa with its arguments exchanged; kernel of the transposed matrix.
template <Kernel K>
struct SwappedKernel {
  K base;
  double operator()(Point2 x, Point2 y) const { return base(y, x); }
};

inline constexpr std::size_t default_dense_cap = 4'000'000;

//
// Kernel plus a counter of scalar evaluations. All approximation code goes
// through a handle so that evaluation budgets can be audited. The counter is
// atomic; concurrent row/column evaluations on one handle never lose counts.
//
template <Kernel K = InverseDistanceKernel>
class KernelHandle {
public:
  explicit KernelHandle(K kernel = K{}) : kernel_(std::move(kernel)) {}

  KernelHandle(const KernelHandle& other) : kernel_(other.kernel_), count_(other.eval_count()) {}
  KernelHandle& operator=(const KernelHandle&) = delete;

  const K& kernel() const noexcept { return kernel_; }
  std::uint64_t eval_count() const noexcept { return count_.load(std::memory_order_relaxed); }

  /// Credits evaluations performed through another handle.
  void add_evaluations(std::uint64_t count) noexcept { count_.fetch_add(count, std::memory_order_relaxed); }

  double eval(Point2 x, Point2 y) {
    const double v = kernel_(x, y);
    count_.fetch_add(1, std::memory_order_relaxed);
    return v;
  }

  /// Row i of the interaction matrix: kappa(x_i, y_j) for all j.
  Eigen::VectorXd eval_row(const PointCloud& x, const PointCloud& y, std::size_t i) {
    Eigen::VectorXd row(static_cast<Eigen::Index>(y.size()));
    for (std::size_t j = 0; j < y.size(); ++j)
      row[static_cast<Eigen::Index>(j)] = kernel_(x[i], y[j]);
    count_.fetch_add(y.size(), std::memory_order_relaxed);
    return row;
  }

  /// Column j of the interaction matrix: kappa(x_i, y_j) for all i.
  Eigen::VectorXd eval_col(const PointCloud& x, const PointCloud& y, std::size_t j) {
    Eigen::VectorXd col(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
      col[static_cast<Eigen::Index>(i)] = kernel_(x[i], y[j]);
    count_.fetch_add(x.size(), std::memory_order_relaxed);
    return col;
  }

  Eigen::MatrixXd assemble_dense(const PointCloud& x, const PointCloud& y, std::size_t cap = default_dense_cap) {
    const std::size_t n = x.size(), m = y.size();
    if (n * m > cap)
      throw CapExceeded("assemble_dense: " + std::to_string(n) + "x" + std::to_string(m) + " exceeds the entry cap");
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel_(x[i], y[j]);
    count_.fetch_add(n * m, std::memory_order_relaxed);
    return a;
  }

private:
  K kernel_;
  std::atomic<std::uint64_t> count_{0};
};

} // namespace acagp
