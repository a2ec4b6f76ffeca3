#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lidaraug/adv_mix.hpp"
#include "lidaraug/detector.hpp"
#include "lidaraug/sensor_match.hpp"
#include "lidaraug/target_mix.hpp"

namespace lidaraug {

struct RigidAugmentConfig {
  bool enabled = false;
  double flip_probability = 0.5;  // per axis
  double max_rotation = kPi / 4;  // radians, rotation drawn from [-max, max]
  double scale_min = 0.95;
  double scale_max = 1.05;

  void validate() const;
};

struct PipelineConfig {
  double p_tm = 0.4;
  double p_am = 0.6;
  double lambda = 1.0;
  PerturbationConfig perturbation;
  MaskParams mask;
  int epochs_tm = 1;
  int epochs_am = 1;
  double pseudo_score_threshold = 0.3;
  std::uint64_t seed = 0;
  SensorSpec source_sensor = waymo_spec();
  SensorSpec target_sensor = nuscenes_spec();
  bool random_stride_offset = false;
  RigidAugmentConfig rigid;
  GridClusterParams oracle;  // oracle.knee is the smooth-L1 knee

  void validate() const;
};

enum class Stage : std::uint8_t { TargetMix, AdvMix };

/// Extra augmentations (the rigid flip/rotate/scale op) only ever touch labeled target
/// scenes during the second stage.
bool rigid_augment_allowed(DomainTag tag, Stage stage);

RigidTransform sample_rigid_transform(Rng& rng, const RigidAugmentConfig& cfg);

struct EpochStats {
  int epoch = 0;
  std::size_t samples = 0;
  std::size_t mixed = 0;
  double mean_det_loss = 0.0;     // stage 1: L_det; stage 2: L_det(AM) + L_det(PM)
  double mean_det_loss_am = 0.0;  // stage 2 only
  double mean_det_loss_pm = 0.0;  // stage 2 only
  double mean_consistency = 0.0;  // stage 2, over samples where it is defined
  std::size_t consistency_defined = 0;
  std::size_t consistency_skipped = 0;
  double mean_total_loss = 0.0;  // stage 2: L_det(AM) + L_det(PM) + lambda * L_cons
};

struct StageReport {
  std::string stage;
  std::vector<EpochStats> epochs;
  std::size_t scenes_processed = 0;
  std::size_t mixed_scenes = 0;
  double mixed_fraction = 0.0;
  PerturbStats perturbation;
  std::size_t pseudo_boxes_kept = 0;
  std::size_t pseudo_boxes_discarded = 0;
  std::size_t rigid_augmented = 0;
  std::size_t rigid_augmented_unlabeled = 0;  // must stay 0
};

struct Datasets {
  std::vector<Scene> source;
  std::vector<Scene> target_labeled;
  std::vector<Scene> target_unlabeled;
};

struct PseudoLabelResult {
  std::vector<Scene> scenes;
  std::size_t kept = 0;
  std::size_t discarded = 0;
};

/// Attaches oracle predictions scoring at least `threshold` to every scene.
PseudoLabelResult generate_pseudo_labels(const DetectorOracle& oracle,
                                         const std::vector<Scene>& unlabeled, double threshold);

/// First stage: distribution-match the source scenes once, then for each epoch visit
/// N_S + N_TL samples, polar-mixing with probability p_tm and evaluating the detection loss.
StageReport run_targetmix_stage(const PipelineConfig& cfg, const std::vector<Scene>& source,
                                const std::vector<Scene>& target_labeled,
                                const DetectorOracle& oracle);

/// Second stage over N_TL + N_TU samples per epoch. The teacher supplies gradients for the
/// adversarial scene and is never modified; the student scores both branches.
StageReport run_advmix_stage(const PipelineConfig& cfg, const std::vector<Scene>& target_labeled,
                             const std::vector<Scene>& pseudo_labeled,
                             const DetectorOracle& teacher, const DetectorOracle& student);

/// Stage 1, pseudo-labeling with the stage-1 oracle as teacher, then stage 2 with a cloned
/// student.
std::pair<StageReport, StageReport> run_full(const PipelineConfig& cfg, const Datasets& data);

/// One line per epoch plus a summary line, `key=value` fields.
std::string report_log_lines(const StageReport& report);
/// JSON document holding both reports.
std::string reports_to_json(const StageReport& first, const StageReport& second);

}  // namespace lidaraug
