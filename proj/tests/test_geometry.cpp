#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <cstring>
#include <random>

#include "lidaraug/errors.hpp"
#include "lidaraug/geometry.hpp"

namespace lidaraug {
namespace {

// Independent containment oracle: Eigen rotation into the box frame.
bool oracle_contains(const Box3D& b, const Point& p) {
  const Eigen::Matrix3d to_box = Eigen::AngleAxisd(b.yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix().transpose();
  const Eigen::Vector3d local = to_box * (Eigen::Vector3d(p.x, p.y, p.z) - Eigen::Vector3d(b.cx, b.cy, b.cz));
  return std::abs(local.x()) <= b.l / 2 && std::abs(local.y()) <= b.w / 2 && std::abs(local.z()) <= b.h / 2;
}

// Distance from a point to the nearest face plane, in box coordinates.
double face_margin(const Box3D& b, const Point& p) {
  const Eigen::Matrix3d to_box = Eigen::AngleAxisd(b.yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix().transpose();
  const Eigen::Vector3d local = to_box * (Eigen::Vector3d(p.x, p.y, p.z) - Eigen::Vector3d(b.cx, b.cy, b.cz));
  return std::min({std::abs(std::abs(local.x()) - b.l / 2), std::abs(std::abs(local.y()) - b.w / 2),
                   std::abs(std::abs(local.z()) - b.h / 2)});
}

Box3D random_box(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-20, 20), size(0.5, 6), yaw(-kPi, kPi);
  return Box3D{pos(rng), pos(rng), pos(rng) / 10, size(rng), size(rng), size(rng), normalize_yaw(yaw(rng)), 1, {}};
}

TEST(Spherical, AxisCase) {
  const auto s = cart_to_spherical({1, 0, 0, 0});
  EXPECT_DOUBLE_EQ(s.azimuth, 0.0);
  EXPECT_DOUBLE_EQ(s.elevation, 0.0);
  EXPECT_DOUBLE_EQ(s.range, 1.0);
}

TEST(Spherical, PoleGetsZeroAzimuth) {
  const auto s = cart_to_spherical({0, 0, 1, 0});
  EXPECT_EQ(s.azimuth, 0.0);
  EXPECT_DOUBLE_EQ(s.elevation, kPi / 2);
  EXPECT_DOUBLE_EQ(s.range, 1.0);
}

TEST(Spherical, DiagonalCase) {
  // atan2(1, 1) = pi/4; elevation atan2(sqrt2, sqrt2) = pi/4; range sqrt(1 + 1 + 2) = 2.
  const auto s = cart_to_spherical({1, 1, std::sqrt(2.0), 0});
  EXPECT_NEAR(s.azimuth, kPi / 4, 1e-15);
  EXPECT_NEAR(s.elevation, kPi / 4, 1e-15);
  EXPECT_NEAR(s.range, 2.0, 1e-15);
}

TEST(Spherical, OriginThrows) { EXPECT_THROW(cart_to_spherical({0, 0, 0, 0}), ZeroVector); }

TEST(Spherical, NegativeYWrapsIntoRange) {
  const auto s = cart_to_spherical({0, -1, 0, 0});
  EXPECT_NEAR(s.azimuth, 1.5 * kPi, 1e-15);
  EXPECT_LT(cart_to_spherical({1, -1e-300, 0, 0}).azimuth, kTwoPi);
}

TEST(Spherical, InverseCases) {
  const Point a = spherical_to_cart({0, 0, 1});
  EXPECT_DOUBLE_EQ(a.x, 1.0);
  EXPECT_DOUBLE_EQ(a.y, 0.0);
  EXPECT_DOUBLE_EQ(a.z, 0.0);
  const Point b = spherical_to_cart({kPi, 0, 2});
  EXPECT_NEAR(b.x, -2.0, 1e-15);
  EXPECT_NEAR(b.y, 0.0, 1e-15);
  EXPECT_NEAR(b.z, 0.0, 1e-15);
}

TEST(Spherical, RoundTripProperty) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> coord(-300 / std::sqrt(3.0), 300 / std::sqrt(3.0));
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point p{coord(rng), coord(rng), coord(rng), 0.5};
    const Point q = spherical_to_cart(cart_to_spherical(p), p.intensity);
    worst = std::max({worst, std::abs(p.x - q.x), std::abs(p.y - q.y), std::abs(p.z - q.z)});
    EXPECT_EQ(q.intensity, 0.5);
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(Yaw, NormalizationRangeAndIdempotence) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> any(-50, 50);
  for (int i = 0; i < 10000; ++i) {
    const double y = normalize_yaw(any(rng));
    ASSERT_GE(y, -kPi);
    ASSERT_LT(y, kPi);
    ASSERT_EQ(normalize_yaw(y), y);
  }
  EXPECT_EQ(normalize_yaw(kPi), -kPi);
  EXPECT_NEAR(normalize_yaw(3 * kPi / 2), -kPi / 2, 1e-15);
}

TEST(PointsInBox, AxisAlignedCases) {
  const Box3D box{0, 0, 0, 2, 2, 2, 0, 0, {}};
  Scene scene;
  scene.points = {{0.5, 0.5, 0.5, 0}, {1.5, 0, 0, 0}, {1.0, 1.0, 1.0, 0}};
  const auto inside = points_in_box(scene, box);
  ASSERT_EQ(inside.size(), 2u);  // the corner point is boundary-inclusive
  EXPECT_EQ(inside[0], 0u);
  EXPECT_EQ(inside[1], 2u);
}

TEST(PointsInBox, LengthRunsAlongHeading) {
  // l = 4 along the heading, w = 1 across it; heading +y.
  const Box3D box{0, 0, 0, 1, 4, 1, kPi / 2, 0, {}};
  EXPECT_TRUE(box_contains(box, {0, 1.9, 0, 0}));
  EXPECT_FALSE(box_contains(box, {1.9, 0, 0, 0}));
}

TEST(PointsInBox, RotatedFixture) {
  const Box3D box{0, 0, 0, 2 * 0.95, 2 * 0.95, 2, kPi / 4, 0, {}};
  const Point p{std::sqrt(2.0) * 0.9, 0, 0, 0};
  EXPECT_EQ(box_contains(box, p), oracle_contains(box, p));
}

TEST(PointsInBox, AgreesWithRotationMatrixOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> off(-4, 4);
  int agreements = 0;
  int inside = 0;
  for (int i = 0; i < 10000; ++i) {
    const Box3D box = random_box(rng);
    const Point p{box.cx + off(rng), box.cy + off(rng), box.cz + off(rng) / 2, 0};
    if (face_margin(box, p) < 1e-9) continue;
    const bool got = !points_in_box(std::span<const Point>(&p, 1), box).empty();
    ASSERT_EQ(got, oracle_contains(box, p)) << "pair " << i;
    ++agreements;
    inside += got;
  }
  EXPECT_GT(agreements, 9900);
  EXPECT_GT(inside, 500);  // both outcomes exercised
}

TEST(Corners, AllOnBoxSurface) {
  const Box3D box{1, 2, 3, 1.5, 4, 2, 0.7, 0, {}};
  for (const Point& c : box_corners(box)) {
    const auto local = to_box_frame(box, c.x, c.y, c.z);
    EXPECT_NEAR(std::abs(local[0]), 2.0, 1e-12);
    EXPECT_NEAR(std::abs(local[1]), 0.75, 1e-12);
    EXPECT_NEAR(std::abs(local[2]), 1.0, 1e-12);
  }
}

TEST(RigidTransform, IdentityIsBitwise) {
  Scene scene;
  scene.points = {{1.25, -3.5, 0.125, 0.5}, {-0.0, 7.1, -2.2, 0.9}};
  scene.boxes = {Box3D{1, 2, 3, 1, 2, 3, -kPi, 2, 0.7}};
  const Scene out = apply_rigid_transform(scene, {});
  ASSERT_EQ(out.points.size(), scene.points.size());
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    EXPECT_EQ(std::memcmp(&out.points[i], &scene.points[i], sizeof(Point)), 0);
  }
  EXPECT_EQ(out.boxes, scene.boxes);
}

TEST(RigidTransform, QuarterTurn) {
  Scene scene;
  scene.points = {{1, 0, 0, 0}};
  const Scene out = apply_rigid_transform(scene, {false, false, kPi / 2, 1.0});
  EXPECT_NEAR(out.points[0].x, 0.0, 1e-15);
  EXPECT_NEAR(out.points[0].y, 1.0, 1e-15);
}

TEST(RigidTransform, RejectsNonPositiveScale) {
  EXPECT_THROW(apply_rigid_transform(Scene{}, {false, false, 0, 0.0}), NonPositiveScale);
  EXPECT_THROW(apply_rigid_transform(Scene{}, {false, false, 0, -1.0}), NonPositiveScale);
}

TEST(RigidTransform, PreservesMembershipAndScalesDistances) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> off(-3, 3), rot(-kPi, kPi), scale(0.5, 2.0);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    Scene scene;
    scene.boxes = {random_box(rng), random_box(rng)};
    for (int i = 0; i < 100; ++i) {
      const Box3D& b = scene.boxes[static_cast<std::size_t>(i % 2)];
      const Point p{b.cx + off(rng), b.cy + off(rng), b.cz + off(rng) / 2, 0};
      if (face_margin(scene.boxes[0], p) > 1e-6 && face_margin(scene.boxes[1], p) > 1e-6) scene.points.push_back(p);
    }
    const RigidTransform t{coin(rng), coin(rng), rot(rng), scale(rng)};
    const Scene out = apply_rigid_transform(scene, t);
    for (std::size_t b = 0; b < scene.boxes.size(); ++b) {
      ASSERT_EQ(points_in_box(scene, scene.boxes[b]), points_in_box(out, out.boxes[b])) << "trial " << trial;
      EXPECT_GE(out.boxes[b].yaw, -kPi);
      EXPECT_LT(out.boxes[b].yaw, kPi);
    }
    const auto dist = [](const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z); };
    for (std::size_t i = 1; i < scene.points.size(); ++i) {
      const double before = dist(scene.points[i], scene.points[0]);
      EXPECT_NEAR(dist(out.points[i], out.points[0]), t.scale * before, 1e-12 * (1 + before));
    }
  }
}

}  // namespace
}  // namespace lidaraug
