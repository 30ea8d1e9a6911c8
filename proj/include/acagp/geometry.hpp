#pragma once

#include <acagp/errors.hpp>
#include <acagp/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

namespace acagp {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 p) noexcept { return {s * p.x, s * p.y}; }
  friend constexpr bool operator==(Point2, Point2) = default;
};

constexpr double dot(Point2 a, Point2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) noexcept { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) noexcept { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) noexcept { return norm(a - b); }

//
// Ordered 2-D point set. Barycenter and diameter estimate are computed once
// at construction; the cloud is immutable afterwards.
//
class PointCloud {
public:
  explicit PointCloud(std::vector<Point2> points) : points_(std::move(points)) {
    if (points_.empty())
      throw InputError("point cloud must contain at least one point");
    double sx = 0.0, sy = 0.0;
    for (const auto& p : points_) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw InputError("point cloud contains a non-finite coordinate");
      sx += p.x;
      sy += p.y;
    }
    const auto n = static_cast<double>(points_.size());
    barycenter_ = {sx / n, sy / n};
    double far = 0.0;
    for (const auto& p : points_)
      far = std::max(far, distance(p, barycenter_));
    diameter_ = 2.0 * far;
  }

  std::size_t size() const noexcept { return points_.size(); }
  const Point2& operator[](std::size_t i) const noexcept { return points_[i]; }
  std::span<const Point2> points() const noexcept { return points_; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  Point2 barycenter() const noexcept { return barycenter_; }
  /// Twice the distance from the barycenter to the farthest point.
  double diameter() const noexcept { return diameter_; }

private:
  std::vector<Point2> points_;
  Point2 barycenter_;
  double diameter_ = 0.0;
};

struct Circle {
  Point2 center;
  double radius = 0.0;
};

struct AdmissibilityParams {
  double eta = 1.0;

  double alpha() const noexcept { return eta / (1.0 + eta); }
};

inline Point2 barycenter(const PointCloud& cloud) noexcept { return cloud.barycenter(); }
inline double diameter_estimate(const PointCloud& cloud) noexcept { return cloud.diameter(); }

/// Center distance minus the smaller diameter. Negative for overlapping clouds.
inline double relaxed_distance(const PointCloud& x, const PointCloud& y) noexcept {
  return distance(x.barycenter(), y.barycenter()) - std::min(x.diameter(), y.diameter());
}

/// Exact minimum pairwise distance, O(n m).
inline double true_distance(const PointCloud& x, const PointCloud& y) noexcept {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : x)
    for (const auto& q : y) {
      const double dx = p.x - q.x, dy = p.y - q.y;
      best = std::min(best, dx * dx + dy * dy);
    }
  return std::sqrt(best);
}

/// Reduced admissibility test min(diam) <= alpha |x̄ - ȳ| with alpha = eta/(1+eta).
inline bool is_admissible(const PointCloud& x, const PointCloud& y, const AdmissibilityParams& params) noexcept {
  return std::min(x.diameter(), y.diameter()) <= params.alpha() * distance(x.barycenter(), y.barycenter());
}

/// Circle through three points. Throws DegenerateError for (nearly) collinear input.
inline Circle circumcircle(Point2 p1, Point2 p2, Point2 p3) {
  const Point2 b = p2 - p1;
  const Point2 c = p3 - p1;
  const double twice_area = cross(b, c);
  const double scale = std::max({dot(b, b), dot(c, c), dot(p3 - p2, p3 - p2)});
  if (!(std::abs(twice_area) >= 1e-10 * scale))
    throw DegenerateError("circumcircle: points are collinear");
  const double d = 2.0 * twice_area;
  const double bb = dot(b, b), cc = dot(c, c);
  const Point2 offset{(c.y * bb - b.y * cc) / d, (b.x * cc - c.x * bb) / d};
  return {p1 + offset, norm(offset)};
}

/// Distance from a point to the circle line (not the disc).
inline double point_circle_distance(Point2 p, const Circle& c) noexcept {
  return std::abs(distance(p, c.center) - c.radius);
}

//
// Circle of the same radius as `c2` that passes through `anchor` (a point of
// c2) and crosses c2 orthogonally there. Of the two candidates, the one whose
// center lies on the side of `direction` is returned.
//
inline Circle conjugate_circle(const Circle& c2, Point2 anchor, Point2 direction) {
  if (!(c2.radius > 0.0) || !std::isfinite(c2.radius))
    throw DegenerateError("conjugate_circle: invalid radius");
  if (direction.x == 0.0 && direction.y == 0.0)
    throw DegenerateError("conjugate_circle: zero direction");
  const Point2 radial = anchor - c2.center;
  if (std::abs(norm(radial) - c2.radius) > 1e-9 * c2.radius)
    throw DegenerateError("conjugate_circle: anchor is not on the circle");
  const Point2 unit = (1.0 / norm(radial)) * radial;
  const Point2 tangent{-unit.y, unit.x};
  double side = dot(tangent, direction);
  if (side == 0.0)
    side = cross(tangent, direction);
  const double sign = side >= 0.0 ? 1.0 : -1.0;
  return {anchor + (sign * c2.radius) * tangent, c2.radius};
}

/// Square root of the covariance eigenvalue ratio (minor/major). Equals a/b for
/// a uniformly filled a x b rectangle regardless of its orientation; 1 for
/// clouds with fewer than three points or zero spread.
inline double principal_aspect_ratio(const PointCloud& cloud) noexcept {
  if (cloud.size() < 3)
    return 1.0;
  const Point2 c = cloud.barycenter();
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : cloud) {
    const Point2 d = p - c;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  const double mean = 0.5 * (sxx + syy);
  const double half_gap = std::hypot(0.5 * (sxx - syy), sxy);
  const double major = mean + half_gap;
  const double minor = std::max(0.0, mean - half_gap);
  if (major <= 0.0)
    return 1.0;
  return std::sqrt(minor / major);
}

/// n i.i.d. uniform points in [-a/2, a/2] x [-b/2, b/2].
inline PointCloud generate_cloud(double width, double height, std::size_t n, Rng& rng) {
  if (!(width > 0.0) || !(height > 0.0) || n == 0)
    throw InputError("generate_cloud: width, height and n must be positive");
  std::vector<Point2> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(-0.5 * width, 0.5 * width);
    const double y = rng.uniform(-0.5 * height, 0.5 * height);
    pts.push_back({x, y});
  }
  return PointCloud(std::move(pts));
}

/// Rigid motion p -> R(theta) (p - pivot) + pivot + shift.
inline PointCloud rigid_motion(const PointCloud& cloud, double theta, Point2 pivot, Point2 shift) {
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<Point2> pts;
  pts.reserve(cloud.size());
  for (const auto& p : cloud) {
    const Point2 d = p - pivot;
    pts.push_back(Point2{c * d.x - s * d.y, s * d.x + c * d.y} + pivot + shift);
  }
  return PointCloud(std::move(pts));
}

struct PlacedClouds {
  PointCloud x;
  PointCloud y;
  double theta = 0.0;
};

//
// Two xi x 1 clouds: Y axis-aligned at the origin, X rotated about its
// barycenter by a random angle and pushed along a random direction until the
// true distance matches `target_dist` (bisection, |error| <= 1e-3).
//
inline PlacedClouds place_clouds(double xi, std::size_t n, std::size_t m, double target_dist, Rng& rng) {
  if (!(xi > 0.0 && xi <= 1.0))
    throw InputError("place_clouds: aspect ratio must lie in (0, 1]");
  if (!(target_dist > 0.0))
    throw InputError("place_clouds: target distance must be positive");
  constexpr double height = 1.0;
  constexpr double tolerance = 1e-3;
  constexpr int max_iterations = 60;

  PointCloud y = generate_cloud(xi * height, height, m, rng);
  const PointCloud x0 = generate_cloud(xi * height, height, n, rng);
  const double theta = rng.angle();
  const double phi = rng.angle();
  const Point2 dir{std::cos(phi), std::sin(phi)};

  // Rotated about its barycenter, then barycenter moved onto Y's barycenter.
  const PointCloud rotated = rigid_motion(x0, theta, x0.barycenter(), y.barycenter() - x0.barycenter());
  auto place = [&](double t) { return rigid_motion(rotated, 0.0, {}, t * dir); };

  double lo = target_dist;
  double hi = target_dist + rotated.diameter() + y.diameter() + 1.0;
  if (true_distance(place(lo), y) > target_dist)
    lo = 0.0;
  double t = hi;
  for (int it = 0; it < max_iterations; ++it) {
    t = 0.5 * (lo + hi);
    const double d = true_distance(place(t), y);
    if (std::abs(d - target_dist) <= tolerance)
      break;
    (d < target_dist ? lo : hi) = t;
  }
  return {place(t), std::move(y), theta};
}

} // namespace acagp
