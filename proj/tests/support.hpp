#pragma once

#include <acagp.hpp>

#include <vector>

namespace testing_support {

using namespace acagp;

// Corners of the unit square centered at (cx, cy).
inline PointCloud corner_square(double cx, double cy) {
  return PointCloud({{cx - 0.5, cy - 0.5}, {cx + 0.5, cy - 0.5}, {cx - 0.5, cy + 0.5}, {cx + 0.5, cy + 0.5}});
}

// Regular g x g grid covering [cx - 0.5, cx + 0.5] x [cy - 0.5, cy + 0.5].
inline PointCloud grid_cloud(std::size_t g, double cx, double cy) {
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t j = 0; j < g; ++j)
      pts.push_back({cx - 0.5 + static_cast<double>(i) / static_cast<double>(g - 1),
                     cy - 0.5 + static_cast<double>(j) / static_cast<double>(g - 1)});
  return PointCloud(std::move(pts));
}

// Brute-force residual A - U V^T.
inline Eigen::MatrixXd dense_residual(const Eigen::MatrixXd& a, const Skeleton& sk) {
  Eigen::MatrixXd r = a;
  for (std::size_t l = 0; l < sk.rank(); ++l)
    for (Eigen::Index i = 0; i < r.rows(); ++i)
      for (Eigen::Index j = 0; j < r.cols(); ++j)
        r(i, j) -= sk.u(l)[i] * sk.v(l)[j];
  return r;
}

// Frobenius norm of U V^T computed entry by entry.
inline double direct_norm(const Skeleton& sk, std::size_t k) {
  double sq = 0.0;
  for (std::size_t i = 0; i < sk.rows(); ++i)
    for (std::size_t j = 0; j < sk.cols(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < k; ++l)
        s += sk.u(l)[static_cast<Eigen::Index>(i)] * sk.v(l)[static_cast<Eigen::Index>(j)];
      sq += s * s;
    }
  return std::sqrt(sq);
}

inline bool same_skeleton(const Skeleton& a, const Skeleton& b) {
  if (a.rank() != b.rank() || a.pivot_rows() != b.pivot_rows() || a.pivot_cols() != b.pivot_cols())
    return false;
  for (std::size_t l = 0; l < a.rank(); ++l)
    if (a.u(l) != b.u(l) || a.v(l) != b.v(l))
      return false;
  return true;
}

} // namespace testing_support
