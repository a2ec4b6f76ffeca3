#include "lidaraug/synth.hpp"

#include <algorithm>
#include <cmath>

#include "lidaraug/errors.hpp"

namespace lidaraug {

namespace {

enum Role : std::uint64_t { kSourceRole = 11, kLabeledRole = 12, kUnlabeledRole = 13 };

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::vector<Box3D> place_objects(Rng& rng, int n_objects, const NoiseParams& noise) {
  std::vector<Box3D> boxes;
  for (int attempt = 0; static_cast<int>(boxes.size()) < n_objects && attempt < 1000 * (n_objects + 1);
       ++attempt) {
    const double dist = uniform(rng, noise.min_object_distance, noise.max_object_distance);
    const double az = uniform(rng, 0.0, kTwoPi);
    Box3D box;
    box.l = uniform(rng, 3.5, 5.0);
    box.w = uniform(rng, 1.6, 2.1);
    box.h = uniform(rng, 1.4, 1.9);
    box.cx = dist * std::cos(az);
    box.cy = dist * std::sin(az);
    box.cz = -noise.sensor_height + 0.5 * box.h;
    box.yaw = normalize_yaw(uniform(rng, -kPi, kPi));
    box.class_id = 1;
    const bool clear = std::none_of(boxes.begin(), boxes.end(), [&](const Box3D& o) {
      return std::hypot(o.cx - box.cx, o.cy - box.cy) < noise.object_separation;
    });
    if (clear) boxes.push_back(box);
  }
  return boxes;
}

}  // namespace

Scene synthesize_scene(Rng& rng, int n_objects, const SensorSpec& spec, const NoiseParams& noise) {
  if (n_objects < 0) throw ValidationError("object count must be non-negative");
  if (noise.min_cluster_points < 20 || noise.max_cluster_points < noise.min_cluster_points) {
    throw ValidationError("cluster sizes must satisfy 20 <= min <= max");
  }
  spec.validate();

  Scene scene;
  std::normal_distribution<double> range_noise(0.0, noise.range_sigma);
  const double row_pitch = spec.vfov_span() / spec.channels;
  const double col_pitch = kTwoPi / spec.points_per_channel;
  for (int r = 0; r < spec.channels; ++r) {
    const double elevation = spec.vfov_min + (r + 0.5) * row_pitch;
    if (elevation >= 0.0) continue;
    const double ground = noise.sensor_height / std::tan(-elevation);
    if (ground > noise.max_range) continue;
    const double range = ground / std::cos(elevation);
    for (int c = 0; c < spec.points_per_channel; ++c) {
      const double az = (c + 0.5 + noise.angle_jitter * (uniform01(rng) - 0.5)) * col_pitch;
      Point p = spherical_to_cart({wrap_two_pi(az), elevation, range + range_noise(rng)}, 0.0);
      p.intensity = uniform(rng, 0.0, 0.3);
      scene.points.push_back(p);
    }
  }

  scene.boxes = place_objects(rng, n_objects, noise);
  std::uniform_int_distribution<int> cluster_size(noise.min_cluster_points, noise.max_cluster_points);
  for (const Box3D& box : scene.boxes) {
    const int n = cluster_size(rng);
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    for (int i = 0; i < n; ++i) {
      // Interior points, lifted clear of the ground plane.
      const double lx = uniform(rng, -0.45, 0.45) * box.l;
      const double ly = uniform(rng, -0.45, 0.45) * box.w;
      const double lz = uniform(rng, -0.5 * box.h + 0.4, 0.45 * box.h);
      scene.points.push_back(Point{box.cx + c * lx - s * ly, box.cy + s * lx + c * ly, box.cz + lz,
                                   uniform(rng, 0.2, 1.0)});
    }
  }
  return scene;
}

Datasets synthesize_dataset(std::uint64_t seed, const PipelineConfig& cfg, const SynthCounts& counts,
                            const NoiseParams& noise) {
  if (counts.source < 0 || counts.target_labeled < 0 || counts.target_unlabeled < 0 ||
      counts.min_objects < 0 || counts.max_objects < counts.min_objects) {
    throw ValidationError("invalid synthetic dataset counts");
  }
  auto make = [&](Role role, int index, const SensorSpec& spec, DomainTag tag) {
    Rng rng = derive_rng(seed, role, static_cast<std::uint64_t>(index));
    const int n_objects = std::uniform_int_distribution<int>(counts.min_objects, counts.max_objects)(rng);
    Scene s = synthesize_scene(rng, n_objects, spec, noise);
    s.tag = tag;
    return s;
  };
  Datasets data;
  for (int i = 0; i < counts.source; ++i) {
    data.source.push_back(make(kSourceRole, i, cfg.source_sensor, DomainTag::Source));
  }
  for (int i = 0; i < counts.target_labeled; ++i) {
    data.target_labeled.push_back(make(kLabeledRole, i, cfg.target_sensor, DomainTag::TargetLabeled));
  }
  for (int i = 0; i < counts.target_unlabeled; ++i) {
    Scene s = make(kUnlabeledRole, i, cfg.target_sensor, DomainTag::TargetUnlabeled);
    s.boxes.clear();
    data.target_unlabeled.push_back(std::move(s));
  }
  return data;
}

}  // namespace lidaraug
