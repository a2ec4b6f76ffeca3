#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace lidaraug {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// One LiDAR return in sensor-centered Cartesian meters. Intensity is unitless in [0, 1].
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Oriented 3D box. The heading (yaw, about +z) maps `l` onto the box-frame x' axis
/// and `w` onto y'. `score` is set only for predictions and pseudo-labels.
struct Box3D {
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double w = 1.0;
  double l = 1.0;
  double h = 1.0;
  double yaw = 0.0;
  int class_id = 0;
  std::optional<double> score;

  friend bool operator==(const Box3D&, const Box3D&) = default;
};

enum class DomainTag : std::uint8_t { Source, TargetLabeled, TargetUnlabeled, Mixed };

const char* to_string(DomainTag tag);

struct Scene {
  std::vector<Point> points;
  std::vector<Box3D> boxes;
  DomainTag tag = DomainTag::Source;
  /// Set on TargetUnlabeled scenes once teacher predictions are attached as boxes.
  bool pseudo_labeled = false;
};

struct SphericalCoord {
  double azimuth = 0.0;    // [0, 2pi), from +x toward +y
  double elevation = 0.0;  // [-pi/2, pi/2], from the xy-plane toward +z
  double range = 0.0;      // meters
};

/// Wraps any finite angle into [0, 2pi).
double wrap_two_pi(double angle);

/// Wraps a yaw into [-pi, pi). Values already in range are returned untouched,
/// which makes the operation idempotent bit-for-bit.
double normalize_yaw(double yaw);

/// Azimuth of (x, y) in [0, 2pi); 0 on the z-axis.
double azimuth_of(double x, double y);

/// Throws ZeroVector for the origin. Points on the z-axis get azimuth 0.
SphericalCoord cart_to_spherical(const Point& p);
Point spherical_to_cart(const SphericalCoord& s, double intensity = 0.0);

/// Throws ValidationError when sizes are not strictly positive or values are not finite.
void validate_box(const Box3D& box);

/// Coordinates of `p` in the frame of `box`: translate by -center, rotate by -yaw.
std::array<double, 3> to_box_frame(const Box3D& box, double x, double y, double z);

/// Boundary-inclusive containment test.
bool box_contains(const Box3D& box, const Point& p);

/// Indices (ascending) of the scene points contained in `box`.
std::vector<std::size_t> points_in_box(std::span<const Point> points, const Box3D& box);
std::vector<std::size_t> points_in_box(const Scene& scene, const Box3D& box);

/// The eight corners of the box in world coordinates.
std::array<Point, 8> box_corners(const Box3D& box);

struct RigidTransform {
  bool flip_x = false;  // mirror across the x axis: y -> -y
  bool flip_y = false;  // mirror across the y axis: x -> -x
  double rot_z = 0.0;   // radians, counter-clockwise about +z
  double scale = 1.0;   // uniform, must be > 0
};

/// Applies flips, then rotation, then scaling to points and boxes alike.
/// Throws NonPositiveScale. Identity parameters leave the scene bitwise unchanged.
Scene apply_rigid_transform(const Scene& scene, const RigidTransform& t);

}  // namespace lidaraug
