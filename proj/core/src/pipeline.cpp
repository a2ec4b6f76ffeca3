#include "lidaraug/pipeline.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <nlohmann/json.hpp>

#include "lidaraug/errors.hpp"

namespace lidaraug {

namespace {

// Independent random streams derived from the run seed.
enum Stream : std::uint64_t {
  kStrideStream = 1,
  kStage1Order = 2,
  kStage1Sample = 3,
  kStage2Order = 4,
  kStage2Sample = 5,
};

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(std::string(name) + " must lie in [0, 1]");
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed, Stream stream) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = derive_rng(seed, stream);
  // Fisher-Yates with an explicit draw so the order is identical across standard libraries.
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json epoch_json(const EpochStats& e) {
  return {{"epoch", e.epoch},
          {"samples", e.samples},
          {"mixed", e.mixed},
          {"mean_det_loss", e.mean_det_loss},
          {"mean_det_loss_am", e.mean_det_loss_am},
          {"mean_det_loss_pm", e.mean_det_loss_pm},
          {"mean_consistency", e.mean_consistency},
          {"consistency_defined", e.consistency_defined},
          {"consistency_skipped", e.consistency_skipped},
          {"mean_total_loss", e.mean_total_loss}};
}

nlohmann::json report_json(const StageReport& r) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const EpochStats& e : r.epochs) epochs.push_back(epoch_json(e));
  const PerturbStats& p = r.perturbation;
  return {{"stage", r.stage},
          {"epochs", epochs},
          {"scenes_processed", r.scenes_processed},
          {"mixed_scenes", r.mixed_scenes},
          {"mixed_fraction", r.mixed_fraction},
          {"perturbation",
           {{"total_points", p.total_points},
            {"candidates", p.candidates},
            {"selected", p.selected},
            {"translated", p.translated},
            {"added", p.added},
            {"removed", p.removed},
            {"zero_delta", p.zero_delta},
            {"max_norm_error", p.max_norm_error}}},
          {"pseudo_boxes_kept", r.pseudo_boxes_kept},
          {"pseudo_boxes_discarded", r.pseudo_boxes_discarded},
          {"rigid_augmented", r.rigid_augmented},
          {"rigid_augmented_unlabeled", r.rigid_augmented_unlabeled}};
}

void finish(StageReport& report) {
  report.mixed_fraction = report.scenes_processed == 0
                              ? 0.0
                              : static_cast<double>(report.mixed_scenes) /
                                    static_cast<double>(report.scenes_processed);
}

}  // namespace

void RigidAugmentConfig::validate() const {
  check_probability(flip_probability, "rigid flip probability");
  if (!(max_rotation >= 0.0 && max_rotation <= kPi)) {
    throw ValidationError("rigid rotation bound must lie in [0, pi]");
  }
  if (!(scale_min > 0.0 && scale_min <= scale_max)) {
    throw ValidationError("rigid scale bounds must satisfy 0 < min <= max");
  }
}

void PipelineConfig::validate() const {
  check_probability(p_tm, "p_tm");
  check_probability(p_am, "p_am");
  check_probability(pseudo_score_threshold, "pseudo_score_threshold");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be non-negative");
  if (epochs_tm < 1 || epochs_am < 1) throw ValidationError("epoch counts must be >= 1");
  if (mask.k < 1) throw ValidationError("k_sectors must be >= 1");
  if (!(mask.min_width > 0.0 && mask.min_width <= mask.max_width && mask.max_width < kTwoPi)) {
    throw ValidationError("sector widths must satisfy 0 < min <= max < 360 degrees");
  }
  perturbation.validate();
  source_sensor.validate();
  target_sensor.validate();
  rigid.validate();
  oracle.validate();
}

bool rigid_augment_allowed(DomainTag tag, Stage stage) {
  return stage == Stage::AdvMix && tag == DomainTag::TargetLabeled;
}

RigidTransform sample_rigid_transform(Rng& rng, const RigidAugmentConfig& cfg) {
  RigidTransform t;
  t.flip_x = bernoulli(rng, cfg.flip_probability);
  t.flip_y = bernoulli(rng, cfg.flip_probability);
  t.rot_z = cfg.max_rotation * (2.0 * uniform01(rng) - 1.0);
  t.scale = cfg.scale_min + (cfg.scale_max - cfg.scale_min) * uniform01(rng);
  return t;
}

PseudoLabelResult generate_pseudo_labels(const DetectorOracle& oracle,
                                         const std::vector<Scene>& unlabeled, double threshold) {
  check_probability(threshold, "pseudo_score_threshold");
  PseudoLabelResult out;
  out.scenes.reserve(unlabeled.size());
  for (const Scene& scene : unlabeled) {
    Scene labeled = scene;
    labeled.boxes.clear();
    for (const Box3D& box : oracle.predict(scene)) {
      if (box.score.value_or(0.0) >= threshold) {
        labeled.boxes.push_back(box);
        ++out.kept;
      } else {
        ++out.discarded;
      }
    }
    labeled.tag = DomainTag::TargetUnlabeled;
    labeled.pseudo_labeled = true;
    out.scenes.push_back(std::move(labeled));
  }
  return out;
}

StageReport run_targetmix_stage(const PipelineConfig& cfg, const std::vector<Scene>& source,
                                const std::vector<Scene>& target_labeled,
                                const DetectorOracle& oracle) {
  cfg.validate();
  if (source.empty()) throw EmptyDataset("stage 1 needs at least one source scene");
  if (target_labeled.empty()) throw EmptyDataset("stage 1 needs at least one labeled target scene");

  std::vector<Scene> matched;
  matched.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    StrideOffset offset;
    if (cfg.random_stride_offset) {
      Rng rng = derive_rng(cfg.seed, kStrideStream, i);
      offset.row = static_cast<int>(rng() % 1024);
      offset.col = static_cast<int>(rng() % 1024);
    }
    matched.push_back(lidar_distribution_match(source[i], cfg.source_sensor, cfg.target_sensor, offset));
  }

  const std::size_t n_s = matched.size();
  const std::size_t n = n_s + target_labeled.size();
  const auto order = seeded_permutation(n, cfg.seed, kStage1Order);

  StageReport report;
  report.stage = "targetmix";
  for (int epoch = 1; epoch <= cfg.epochs_tm; ++epoch) {
    EpochStats stats;
    stats.epoch = epoch;
    double loss_sum = 0.0;
    for (std::size_t i : order) {
      Rng rng = derive_rng(cfg.seed, kStage1Sample, static_cast<std::uint64_t>(epoch - 1) * n + i);
      const bool is_source = i < n_s;
      Scene sample;
      if (bernoulli(rng, cfg.p_tm)) {
        const Scene& src = is_source ? matched[i] : matched[pick(rng, n_s)];
        const Scene& tgt = is_source ? target_labeled[pick(rng, target_labeled.size())]
                                     : target_labeled[i - n_s];
        sample = polar_mix(src, tgt, sample_sectors(rng, cfg.mask));
        ++stats.mixed;
      } else {
        sample = is_source ? matched[i] : target_labeled[i - n_s];
      }
      loss_sum += detection_loss(oracle, sample);
      ++stats.samples;
    }
    stats.mean_det_loss = loss_sum / static_cast<double>(stats.samples);
    report.scenes_processed += stats.samples;
    report.mixed_scenes += stats.mixed;
    report.epochs.push_back(stats);
  }
  finish(report);
  return report;
}

StageReport run_advmix_stage(const PipelineConfig& cfg, const std::vector<Scene>& target_labeled,
                             const std::vector<Scene>& pseudo_labeled,
                             const DetectorOracle& teacher, const DetectorOracle& student) {
  cfg.validate();
  StageReport report;
  report.stage = "advmix";
  const std::size_t n_tu = pseudo_labeled.size();
  const std::size_t n_tl = target_labeled.size();
  if (n_tu > 0 && n_tl == 0) throw EmptyDataset("stage 2 needs at least one labeled target scene");
  const std::size_t n = n_tu == 0 ? 0 : n_tl + n_tu;
  const auto order = seeded_permutation(n, cfg.seed, kStage2Order);

  for (int epoch = 1; epoch <= cfg.epochs_am; ++epoch) {
    EpochStats stats;
    stats.epoch = epoch;
    double am_sum = 0.0;
    double pm_sum = 0.0;
    double cons_sum = 0.0;
    double total_sum = 0.0;
    for (std::size_t i : order) {
      Rng rng = derive_rng(cfg.seed, kStage2Sample, static_cast<std::uint64_t>(epoch - 1) * n + i);
      const Scene& unlabeled = pseudo_labeled[i % n_tu];
      Scene labeled = target_labeled[i % n_tl];
      if (cfg.rigid.enabled && rigid_augment_allowed(labeled.tag, Stage::AdvMix)) {
        labeled = apply_rigid_transform(labeled, sample_rigid_transform(rng, cfg.rigid));
        ++report.rigid_augmented;
      }
      if (cfg.rigid.enabled && rigid_augment_allowed(unlabeled.tag, Stage::AdvMix)) {
        ++report.rigid_augmented_unlabeled;
      }

      AdversarialSample adv =
          adversarial_perturb(unlabeled, unlabeled.boxes, teacher, cfg.perturbation, rng);
      report.perturbation += adv.stats;

      Scene am;
      Scene pm;
      if (bernoulli(rng, cfg.p_am)) {
        am = point_mixup(labeled, adv.scene);
        pm = point_mixup(labeled, unlabeled);
        ++stats.mixed;
      } else {
        // Without mixing the raw scene feeds the AM branch and the adversarial one the PM branch.
        am = unlabeled;
        pm = std::move(adv.scene);
      }

      const double det_am = detection_loss(student, am);
      const double det_pm = detection_loss(student, pm);
      const auto cons = try_consistency_loss(student.predict(am), student.predict(pm));
      double total = det_am + det_pm;
      if (cons) {
        total += cfg.lambda * *cons;
        cons_sum += *cons;
        ++stats.consistency_defined;
      } else {
        ++stats.consistency_skipped;
      }
      am_sum += det_am;
      pm_sum += det_pm;
      total_sum += total;
      ++stats.samples;
    }
    if (stats.samples > 0) {
      const double count = static_cast<double>(stats.samples);
      stats.mean_det_loss_am = am_sum / count;
      stats.mean_det_loss_pm = pm_sum / count;
      stats.mean_det_loss = (am_sum + pm_sum) / count;
      stats.mean_total_loss = total_sum / count;
    }
    if (stats.consistency_defined > 0) {
      stats.mean_consistency = cons_sum / static_cast<double>(stats.consistency_defined);
    }
    report.scenes_processed += stats.samples;
    report.mixed_scenes += stats.mixed;
    report.epochs.push_back(stats);
  }
  finish(report);
  return report;
}

std::pair<StageReport, StageReport> run_full(const PipelineConfig& cfg, const Datasets& data) {
  cfg.validate();
  const GridClusterDetector teacher(cfg.oracle);
  StageReport first = run_targetmix_stage(cfg, data.source, data.target_labeled, teacher);

  const auto student = teacher.clone();
  PseudoLabelResult pseudo =
      generate_pseudo_labels(teacher, data.target_unlabeled, cfg.pseudo_score_threshold);
  StageReport second = run_advmix_stage(cfg, data.target_labeled, pseudo.scenes, teacher, *student);
  second.pseudo_boxes_kept = pseudo.kept;
  second.pseudo_boxes_discarded = pseudo.discarded;
  return {std::move(first), std::move(second)};
}

std::string report_log_lines(const StageReport& r) {
  std::string out;
  for (const EpochStats& e : r.epochs) {
    out += "stage=" + r.stage + " epoch=" + std::to_string(e.epoch) +
           " samples=" + std::to_string(e.samples) + " mixed=" + std::to_string(e.mixed) +
           " det_loss=" + format_double(e.mean_det_loss);
    if (r.stage == "advmix") {
      out += " det_loss_am=" + format_double(e.mean_det_loss_am) +
             " det_loss_pm=" + format_double(e.mean_det_loss_pm) +
             " cons_loss=" + format_double(e.mean_consistency) +
             " cons_skipped=" + std::to_string(e.consistency_skipped) +
             " total_loss=" + format_double(e.mean_total_loss);
    }
    out += '\n';
  }
  const PerturbStats& p = r.perturbation;
  out += "stage=" + r.stage + " summary scenes=" + std::to_string(r.scenes_processed) +
         " mixed_fraction=" + format_double(r.mixed_fraction) +
         " candidates=" + std::to_string(p.candidates) + " perturbed=" + std::to_string(p.selected) +
         " translated=" + std::to_string(p.translated) + " added=" + std::to_string(p.added) +
         " removed=" + std::to_string(p.removed) +
         " pseudo_kept=" + std::to_string(r.pseudo_boxes_kept) +
         " pseudo_discarded=" + std::to_string(r.pseudo_boxes_discarded) + '\n';
  return out;
}

std::string reports_to_json(const StageReport& first, const StageReport& second) {
  nlohmann::json doc = {{"stages", nlohmann::json::array({report_json(first), report_json(second)})}};
  return doc.dump(2) + "\n";
}

}  // namespace lidaraug
