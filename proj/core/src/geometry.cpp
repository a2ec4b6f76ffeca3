#include "lidaraug/geometry.hpp"

#include <cmath>
#include <string>

#include "lidaraug/errors.hpp"

namespace lidaraug {

const char* to_string(DomainTag tag) {
  switch (tag) {
    case DomainTag::Source:
      return "source";
    case DomainTag::TargetLabeled:
      return "target_labeled";
    case DomainTag::TargetUnlabeled:
      return "target_unlabeled";
    case DomainTag::Mixed:
      return "mixed";
  }
  return "unknown";
}

double wrap_two_pi(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  // fmod of a tiny negative value plus 2pi can round up to exactly 2pi.
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double normalize_yaw(double yaw) {
  if (yaw >= -kPi && yaw < kPi) return yaw;
  double a = std::fmod(yaw + kPi, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  double out = a - kPi;
  if (out >= kPi) out = -kPi;
  if (out < -kPi) out = -kPi;
  return out;
}

double azimuth_of(double x, double y) {
  if (x == 0.0 && y == 0.0) return 0.0;
  return wrap_two_pi(std::atan2(y, x));
}

SphericalCoord cart_to_spherical(const Point& p) {
  const double planar = std::hypot(p.x, p.y);
  const double range = std::hypot(planar, p.z);
  if (range == 0.0) throw ZeroVector();
  return SphericalCoord{azimuth_of(p.x, p.y), std::atan2(p.z, planar), range};
}

Point spherical_to_cart(const SphericalCoord& s, double intensity) {
  const double planar = s.range * std::cos(s.elevation);
  return Point{planar * std::cos(s.azimuth), planar * std::sin(s.azimuth),
               s.range * std::sin(s.elevation), intensity};
}

void validate_box(const Box3D& box) {
  for (double v : {box.cx, box.cy, box.cz, box.w, box.l, box.h, box.yaw}) {
    if (!std::isfinite(v)) throw ValidationError("box has a non-finite field");
  }
  if (!(box.w > 0.0 && box.l > 0.0 && box.h > 0.0)) {
    throw ValidationError("box sizes must be strictly positive");
  }
  if (box.score && !(*box.score >= 0.0 && *box.score <= 1.0)) {
    throw ValidationError("box score must lie in [0, 1]");
  }
}

std::array<double, 3> to_box_frame(const Box3D& box, double x, double y, double z) {
  const double dx = x - box.cx;
  const double dy = y - box.cy;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  return {c * dx + s * dy, -s * dx + c * dy, z - box.cz};
}

bool box_contains(const Box3D& box, const Point& p) {
  const auto local = to_box_frame(box, p.x, p.y, p.z);
  return std::abs(local[0]) <= 0.5 * box.l && std::abs(local[1]) <= 0.5 * box.w &&
         std::abs(local[2]) <= 0.5 * box.h;
}

std::vector<std::size_t> points_in_box(std::span<const Point> points, const Box3D& box) {
  std::vector<std::size_t> inside;
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hl = 0.5 * box.l;
  const double hw = 0.5 * box.w;
  const double hh = 0.5 * box.h;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    const double dz = p.z - box.cz;
    if (std::abs(dz) > hh) continue;
    const double dx = p.x - box.cx;
    const double dy = p.y - box.cy;
    if (std::abs(c * dx + s * dy) <= hl && std::abs(-s * dx + c * dy) <= hw) inside.push_back(i);
  }
  return inside;
}

std::vector<std::size_t> points_in_box(const Scene& scene, const Box3D& box) {
  return points_in_box(std::span<const Point>(scene.points), box);
}

std::array<Point, 8> box_corners(const Box3D& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  std::array<Point, 8> corners;
  std::size_t k = 0;
  for (double sx : {-0.5, 0.5}) {
    for (double sy : {-0.5, 0.5}) {
      for (double sz : {-0.5, 0.5}) {
        const double lx = sx * box.l;
        const double ly = sy * box.w;
        corners[k++] = Point{box.cx + c * lx - s * ly, box.cy + s * lx + c * ly, box.cz + sz * box.h};
      }
    }
  }
  return corners;
}

Scene apply_rigid_transform(const Scene& scene, const RigidTransform& t) {
  if (!(t.scale > 0.0)) throw NonPositiveScale(t.scale);

  Scene out = scene;
  const bool rotate = t.rot_z != 0.0;
  const bool rescale = t.scale != 1.0;
  const double c = std::cos(t.rot_z);
  const double s = std::sin(t.rot_z);

  auto move = [&](double& x, double& y, double& z) {
    if (t.flip_x) y = -y;
    if (t.flip_y) x = -x;
    if (rotate) {
      const double rx = c * x - s * y;
      const double ry = s * x + c * y;
      x = rx;
      y = ry;
    }
    if (rescale) {
      x *= t.scale;
      y *= t.scale;
      z *= t.scale;
    }
  };

  for (Point& p : out.points) move(p.x, p.y, p.z);
  for (Box3D& b : out.boxes) {
    move(b.cx, b.cy, b.cz);
    double yaw = b.yaw;
    if (t.flip_x) yaw = -yaw;
    if (t.flip_y) yaw = kPi - yaw;
    if (rotate) yaw += t.rot_z;
    if (t.flip_x || t.flip_y || rotate) yaw = normalize_yaw(yaw);
    b.yaw = yaw;
    if (rescale) {
      b.w *= t.scale;
      b.l *= t.scale;
      b.h *= t.scale;
    }
  }
  return out;
}

}  // namespace lidaraug
