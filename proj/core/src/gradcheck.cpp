#include "lidaraug/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "lidaraug/errors.hpp"

namespace lidaraug {

GradCheckResult finite_difference_check(const GradientProvider& provider, const Scene& scene,
                                        std::span<const Box3D> boxes, double step) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be positive");
  const LossAndGradient analytic = provider.loss_and_gradient(scene, boxes);

  GradCheckResult result;
  Scene probe = scene;
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    Vec3 numeric{};
    for (int k = 0; k < 3; ++k) {
      double* coord = k == 0 ? &probe.points[i].x : k == 1 ? &probe.points[i].y : &probe.points[i].z;
      const double saved = *coord;
      *coord = saved + step;
      const double up = provider.loss_and_gradient(probe, boxes).loss;
      *coord = saved - step;
      const double down = provider.loss_and_gradient(probe, boxes).loss;
      *coord = saved;
      numeric[k] = (up - down) / (2.0 * step);
    }
    const Vec3& g = analytic.field.grads[i];
    const double diff = std::hypot(g[0] - numeric[0], g[1] - numeric[1], g[2] - numeric[2]);
    const double scale = std::max(std::hypot(g[0], g[1], g[2]), std::hypot(numeric[0], numeric[1], numeric[2]));
    if (scale > 0.0) result.max_relative_error = std::max(result.max_relative_error, diff / scale);
    ++result.points_checked;
  }
  return result;
}

Scene gradcheck_fixture(Rng& rng, int n_boxes, int background_points) {
  auto uniform = [&rng](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };
  Scene scene;
  scene.tag = DomainTag::TargetUnlabeled;
  while (static_cast<int>(scene.boxes.size()) < n_boxes) {
    Box3D box;
    const double dist = uniform(6.0, 30.0);
    const double az = uniform(0.0, kTwoPi);
    box.cx = dist * std::cos(az);
    box.cy = dist * std::sin(az);
    box.cz = uniform(-1.0, 0.0);
    box.l = uniform(3.0, 6.0);
    box.w = uniform(1.5, 2.5);
    box.h = uniform(1.4, 2.0);
    box.yaw = normalize_yaw(uniform(-kPi, kPi));
    box.class_id = 1;
    const bool clear = std::none_of(scene.boxes.begin(), scene.boxes.end(), [&](const Box3D& o) {
      return std::hypot(o.cx - box.cx, o.cy - box.cy) < 8.0;
    });
    if (clear) scene.boxes.push_back(box);
  }

  for (const Box3D& box : scene.boxes) {
    // Cluster centered away from the box center so the loss is not at its minimum.
    const double ox = uniform(-0.3, 0.3) * box.l;
    const double oy = uniform(-0.3, 0.3) * box.w;
    const double oz = uniform(-0.3, 0.3) * box.h;
    const int n = static_cast<int>(uniform(20.0, 60.0));
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    for (int i = 0; i < n; ++i) {
      const double lx = ox + uniform(-0.15, 0.15) * box.l;
      const double ly = oy + uniform(-0.15, 0.15) * box.w;
      const double lz = oz + uniform(-0.15, 0.15) * box.h;
      scene.points.push_back(
          Point{box.cx + c * lx - s * ly, box.cy + s * lx + c * ly, box.cz + lz, uniform(0.0, 1.0)});
    }
  }

  // Background: reject anything within 0.05 m of a box.
  int placed = 0;
  while (placed < background_points) {
    const Point p{uniform(-40.0, 40.0), uniform(-40.0, 40.0), uniform(-2.0, 1.0), uniform(0.0, 1.0)};
    const bool clear = std::none_of(scene.boxes.begin(), scene.boxes.end(), [&](const Box3D& b) {
      Box3D grown = b;
      grown.l += 0.1;
      grown.w += 0.1;
      grown.h += 0.1;
      return box_contains(grown, p);
    });
    if (clear) {
      scene.points.push_back(p);
      ++placed;
    }
  }
  return scene;
}

}  // namespace lidaraug
