#pragma once

#include <cstdint>

#include "lidaraug/pipeline.hpp"

namespace lidaraug {

struct NoiseParams {
  double sensor_height = 1.73;  // ground plane at z = -sensor_height
  double max_range = 60.0;
  double range_sigma = 0.02;
  double angle_jitter = 0.1;  // fraction of a column pitch
  int min_cluster_points = 30;
  int max_cluster_points = 80;
  double min_object_distance = 5.0;
  double max_object_distance = 40.0;
  double object_separation = 6.0;  // minimum distance between object centers
};

/// Ground returns on the beams of `spec` plus `n_objects` dense clusters, each wrapped in
/// a ground-truth box. Every box holds at least min_cluster_points (>= 20) points.
Scene synthesize_scene(Rng& rng, int n_objects, const SensorSpec& spec, const NoiseParams& noise = {});

struct SynthCounts {
  int source = 20;
  int target_labeled = 4;
  int target_unlabeled = 16;
  int min_objects = 3;
  int max_objects = 8;
};

/// Source scenes on cfg.source_sensor, target scenes on cfg.target_sensor, all derived from `seed`.
Datasets synthesize_dataset(std::uint64_t seed, const PipelineConfig& cfg, const SynthCounts& counts = {},
                            const NoiseParams& noise = {});

}  // namespace lidaraug
