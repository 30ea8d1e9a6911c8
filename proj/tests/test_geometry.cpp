#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace acagp;
using testing_support::corner_square;

TEST(Geometry, BarycenterSmallCases) {
  EXPECT_EQ(barycenter(PointCloud({{0, 0}, {2, 0}})), (Point2{1, 0}));
  EXPECT_EQ(barycenter(PointCloud({{1, 1}})), (Point2{1, 1}));
}

TEST(Geometry, BarycenterMatchesDirectSum) {
  Rng rng(42);
  std::vector<Point2> pts;
  for (int i = 0; i < 400; ++i)
    pts.push_back({rng.uniform(), rng.uniform()});
  double sx = 0.0, sy = 0.0;
  for (const auto& p : pts) {
    sx += p.x;
    sy += p.y;
  }
  const PointCloud cloud(pts);
  const Point2 c = barycenter(cloud);
  EXPECT_NEAR(c.x, sx / 400.0, 1e-12);
  EXPECT_NEAR(c.y, sy / 400.0, 1e-12);
  EXPECT_NEAR(c.x, 0.5, 0.05);
  EXPECT_NEAR(c.y, 0.5, 0.05);
}

TEST(Geometry, DiameterEstimate) {
  EXPECT_NEAR(diameter_estimate(corner_square(0, 0)), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(diameter_estimate(PointCloud({{0, 0}})), 0.0);
  EXPECT_NEAR(diameter_estimate(PointCloud({{0, 0}, {4, 0}})), 4.0, 1e-15);
}

TEST(Geometry, RelaxedDistance) {
  EXPECT_NEAR(relaxed_distance(corner_square(0, 0), corner_square(3, 0)), 3.0 - std::sqrt(2.0), 1e-14);
  const auto sq = corner_square(0, 0);
  EXPECT_NEAR(relaxed_distance(sq, sq), -std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(relaxed_distance(PointCloud({{0, 0}}), PointCloud({{3, 4}})), 5.0, 1e-15);
}

TEST(Geometry, TrueDistance) {
  EXPECT_NEAR(true_distance(PointCloud({{0, 0}}), PointCloud({{3, 4}})), 5.0, 1e-15);
  EXPECT_EQ(true_distance(PointCloud({{0, 0}, {1, 1}}), PointCloud({{1, 1}, {5, 5}})), 0.0);

  const auto x = corner_square(0, 0), y = corner_square(3, 0);
  double best = 1e300;
  for (const auto& p : x)
    for (const auto& q : y)
      best = std::min(best, std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y)));
  EXPECT_NEAR(true_distance(x, y), best, 1e-15);
  EXPECT_NEAR(true_distance(x, y), 2.0, 1e-15);
}

TEST(Geometry, Admissibility) {
  EXPECT_TRUE(is_admissible(corner_square(0, 0), corner_square(3, 0), AdmissibilityParams{1.0}));
  const auto sq = corner_square(0, 0);
  EXPECT_FALSE(is_admissible(sq, sq, AdmissibilityParams{1.0}));
  for (double eta : {0.1, 1.0, 10.0})
    EXPECT_TRUE(is_admissible(PointCloud({{0, 0}}), PointCloud({{0.001, 0}}), AdmissibilityParams{eta}));
}

TEST(Geometry, Circumcircle) {
  const Circle c = circumcircle({0, 0}, {1, 0}, {0, 1});
  EXPECT_NEAR(c.center.x, 0.5, 1e-15);
  EXPECT_NEAR(c.center.y, 0.5, 1e-15);
  EXPECT_NEAR(c.radius, std::sqrt(2.0) / 2.0, 1e-15);
  EXPECT_THROW(circumcircle({0, 0}, {1, 0}, {2, 0}), DegenerateError);

  // Perpendicular bisectors of (0,0)-(2,0) and (0,0)-(1,1): x = 1 and x + y = 1.
  const Circle d = circumcircle({0, 0}, {2, 0}, {1, 1});
  EXPECT_NEAR(d.center.x, 1.0, 1e-15);
  EXPECT_NEAR(d.center.y, 0.0, 1e-15);
  EXPECT_NEAR(d.radius, 1.0, 1e-15);
}

TEST(Geometry, ConjugateCircle) {
  const Circle c2{{0.5, 0.5}, std::sqrt(2.0) / 2.0};
  const Circle right = conjugate_circle(c2, {0, 0}, {3, 0});
  EXPECT_NEAR(right.center.x, 0.5, 1e-15);
  EXPECT_NEAR(right.center.y, -0.5, 1e-15);
  EXPECT_NEAR(right.radius, c2.radius, 1e-15);
  const Point2 anchor{0, 0};
  EXPECT_NEAR(dot(anchor - c2.center, anchor - right.center), 0.0, 1e-15);
  EXPECT_NEAR(distance(anchor, right.center), right.radius, 1e-15);

  const Circle left = conjugate_circle(c2, {0, 0}, {-3, 0});
  EXPECT_NEAR(left.center.x, -0.5, 1e-15);
  EXPECT_NEAR(left.center.y, 0.5, 1e-15);
  EXPECT_NEAR(distance(anchor, left.center), left.radius, 1e-15);

  EXPECT_THROW(conjugate_circle(c2, {3, 3}, {1, 0}), DegenerateError);
}

TEST(Geometry, PointCircleDistance) {
  const Circle unit{{0, 0}, 1.0};
  EXPECT_NEAR(point_circle_distance({0, 1}, unit), 0.0, 1e-15);
  EXPECT_NEAR(point_circle_distance({0, 0}, unit), 1.0, 1e-15);
  EXPECT_NEAR(point_circle_distance({3, 0}, unit), 2.0, 1e-15);
}

TEST(Geometry, GenerateCloud) {
  Rng a(5), b(5);
  const PointCloud one = generate_cloud(2.0, 1.0, 1, a);
  EXPECT_LE(std::abs(one[0].x), 1.0);
  EXPECT_LE(std::abs(one[0].y), 0.5);

  Rng c(9), d(9);
  const PointCloud p = generate_cloud(1.0, 1.0, 50, c), q = generate_cloud(1.0, 1.0, 50, d);
  for (std::size_t i = 0; i < p.size(); ++i)
    EXPECT_EQ(p[i], q[i]);

  Rng e(11);
  const PointCloud big = generate_cloud(1.0, 1.0, 10000, e);
  double sx = 0.0, sy = 0.0;
  for (const auto& pt : big) {
    sx += pt.x;
    sy += pt.y;
  }
  EXPECT_LT(std::abs(sx / 10000.0), 0.02);
  EXPECT_LT(std::abs(sy / 10000.0), 0.02);
}

TEST(Geometry, RejectsBadClouds) {
  EXPECT_THROW(PointCloud(std::vector<Point2>{}), InputError);
  EXPECT_THROW(PointCloud({{0, std::nan("")}}), InputError);
}

TEST(Geometry, PlaceCloudsHitsTargetDistance) {
  for (double target : {1.5, 2.5, 5.0})
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng rng(seed);
      const PlacedClouds pc = place_clouds(1.0, 60, 70, target, rng);
      EXPECT_EQ(pc.x.size(), 60u);
      EXPECT_EQ(pc.y.size(), 70u);
      EXPECT_LE(std::abs(true_distance(pc.x, pc.y) - target), 1e-3);
      // The half-sum of diameters bounds the true distance from below; the
      // min-diameter form is not a bound in either direction.
      const double half_sum = distance(barycenter(pc.x), barycenter(pc.y)) -
                              0.5 * (diameter_estimate(pc.x) + diameter_estimate(pc.y));
      EXPECT_LE(half_sum, true_distance(pc.x, pc.y) + 1e-12);
      EXPECT_GE(pc.theta, -M_PI);
      EXPECT_LT(pc.theta, M_PI);
    }
}

TEST(Geometry, PlaceCloudsDeterministic) {
  Rng a(3), b(3);
  const auto p = place_clouds(0.5, 40, 40, 2.5, a), q = place_clouds(0.5, 40, 40, 2.5, b);
  EXPECT_EQ(p.theta, q.theta);
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(p.x[i], q.x[i]);
    EXPECT_EQ(p.y[i], q.y[i]);
  }
  // Y stays centered and axis-aligned: 0.5 x 1 rectangle.
  for (const auto& pt : p.y) {
    EXPECT_LE(std::abs(pt.x), 0.25);
    EXPECT_LE(std::abs(pt.y), 0.5);
  }
}

TEST(Geometry, RigidMotionPreservesDistances) {
  Rng rng(4);
  const PointCloud c = generate_cloud(1.0, 1.0, 20, rng);
  const PointCloud r = rigid_motion(c, 0.7, barycenter(c), {3, -1});
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      EXPECT_LE(std::abs(distance(c[i], c[j]) - distance(r[i], r[j])), 1e-12 * distance(c[i], c[j]));
  EXPECT_NEAR(barycenter(r).x, barycenter(c).x + 3, 1e-13);
  EXPECT_NEAR(barycenter(r).y, barycenter(c).y - 1, 1e-13);
}
