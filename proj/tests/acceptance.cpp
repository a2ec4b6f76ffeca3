// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "lidaraug/adv_mix.hpp"
#include "lidaraug/detector.hpp"
#include "lidaraug/gradcheck.hpp"
#include "lidaraug/io.hpp"
#include "lidaraug/pipeline.hpp"
#include "lidaraug/sensor_match.hpp"
#include "lidaraug/synth.hpp"
#include "lidaraug/target_mix.hpp"

namespace fs = std::filesystem;
using namespace lidaraug;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome sensor_arithmetic() {
  const SensorSpec src = waymo_spec();
  const SensorSpec tgt = nuscenes_spec();
  const auto t0 = Clock::now();
  const DownsampleFactors f = downsample_factors(src, tgt);
  const double dt = seconds_since(t0);
  return {f.vertical == 4 && f.horizontal == 2 && !f.upsample_required && dt < 1e-3,
          fmt("factors=(%d,%d) time=%.3gs", f.vertical, f.horizontal, dt)};
}

// Independent cell indexing: row from elevation, column from azimuth, both measured from the
// lower field edge / +x axis.
struct CellKey {
  int row;
  int col;
  auto operator<=>(const CellKey&) const = default;
};

Outcome range_image_round_trip() {
  const SensorSpec spec = waymo_spec();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> az(0.0, 2 * std::acos(-1.0));
  std::uniform_real_distribution<double> el(spec.vfov_min, spec.vfov_max);
  std::uniform_real_distribution<double> rr(1.0, 75.0);
  Scene scene;
  scene.tag = DomainTag::Source;
  for (int i = 0; i < 10000; ++i) {
    const double a = az(rng), e = el(rng), r = rr(rng);
    scene.points.push_back({r * std::cos(e) * std::cos(a), r * std::cos(e) * std::sin(a), r * std::sin(e),
                            static_cast<double>(i)});
  }

  const auto t0 = Clock::now();
  const Scene back = backproject(downsample_range_image(build_range_image(scene, spec), 1, 1));
  const double dt = seconds_since(t0);

  const double row_pitch = spec.vfov_span() / spec.channels;
  const double col_pitch = 2 * std::acos(-1.0) / spec.points_per_channel;
  std::map<CellKey, std::size_t> winner;
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    const Point& p = scene.points[i];
    const double a = std::atan2(p.y, p.x) < 0 ? std::atan2(p.y, p.x) + 2 * std::acos(-1.0) : std::atan2(p.y, p.x);
    const double e = std::atan2(p.z, std::hypot(p.x, p.y));
    const CellKey k{std::min(static_cast<int>((e - spec.vfov_min) / row_pitch), spec.channels - 1),
                    std::min(static_cast<int>(a / col_pitch), spec.points_per_channel - 1)};
    auto [it, fresh] = winner.emplace(k, i);
    const auto range = [&](std::size_t j) { return std::hypot(scene.points[j].x, scene.points[j].y, scene.points[j].z); };
    if (!fresh && range(i) < range(it->second)) it->second = i;
  }

  double max_range_err = 0.0, max_el_err = 0.0, max_az_err = 0.0;
  bool provenance_ok = back.points.size() == winner.size();
  for (const Point& q : back.points) {
    const auto src_index = static_cast<std::size_t>(q.intensity);
    const Point& p = scene.points[src_index];
    const double rp = std::hypot(p.x, p.y, p.z), rq = std::hypot(q.x, q.y, q.z);
    max_range_err = std::max(max_range_err, std::abs(rp - rq));
    max_el_err = std::max(max_el_err, std::abs(std::asin(p.z / rp) - std::asin(q.z / rq)));
    double da = std::abs(std::atan2(p.y, p.x) - std::atan2(q.y, q.x));
    da = std::min(da, 2 * std::acos(-1.0) - da);
    max_az_err = std::max(max_az_err, da);
    const double a = std::atan2(p.y, p.x) < 0 ? std::atan2(p.y, p.x) + 2 * std::acos(-1.0) : std::atan2(p.y, p.x);
    const double e = std::atan2(p.z, std::hypot(p.x, p.y));
    const CellKey k{std::min(static_cast<int>((e - spec.vfov_min) / row_pitch), spec.channels - 1),
                    std::min(static_cast<int>(a / col_pitch), spec.points_per_channel - 1)};
    const auto it = winner.find(k);
    provenance_ok = provenance_ok && it != winner.end() && it->second == src_index;
  }
  const double slack = 1e-12;
  const bool pass = provenance_ok && max_range_err < 1e-9 && max_el_err <= row_pitch / 2 + slack &&
                    max_az_err <= col_pitch / 2 + slack && dt < 1.0;
  return {pass, fmt("survivors=%zu range_err=%.3g el_err/half_pitch=%.4f az_err/half_pitch=%.4f "
                    "winners_match=%d time=%.3gs",
                    back.points.size(), max_range_err, max_el_err / (row_pitch / 2), max_az_err / (col_pitch / 2),
                    provenance_ok ? 1 : 0, dt)};
}

// Central differences over every coordinate of every point, computed here rather than through the
// library's own checker.
Outcome gradient_oracle() {
  const SurrogateLoss provider;
  const double step = 1e-5;
  double worst = 0.0;
  std::size_t checked = 0;
  const auto t0 = Clock::now();
  for (std::uint64_t f = 0; f < 50; ++f) {
    Rng rng = derive_rng(31337, 3, f);
    Scene scene = gradcheck_fixture(rng);
    const LossAndGradient analytic = provider.loss_and_gradient(scene, scene.boxes);
    for (std::size_t i = 0; i < scene.points.size(); ++i) {
      std::array<double, 3> numeric{};
      for (int c = 0; c < 3; ++c) {
        double* coord = c == 0 ? &scene.points[i].x : c == 1 ? &scene.points[i].y : &scene.points[i].z;
        const double orig = *coord;
        *coord = orig + step;
        const double up = provider.loss_and_gradient(scene, scene.boxes).loss;
        *coord = orig - step;
        const double down = provider.loss_and_gradient(scene, scene.boxes).loss;
        *coord = orig;
        numeric[c] = (up - down) / (2 * step);
      }
      const auto& g = analytic.field.grads[i];
      const double diff = std::hypot(g[0] - numeric[0], g[1] - numeric[1], g[2] - numeric[2]);
      const double scale = std::max({std::hypot(g[0], g[1], g[2]), std::hypot(numeric[0], numeric[1], numeric[2]), 1e-8});
      worst = std::max(worst, diff / scale);
      ++checked;
    }
  }
  const double dt = seconds_since(t0);
  return {worst < 1e-5 && dt < 5.0, fmt("fixtures=50 points=%zu max_rel_err=%.3g time=%.3gs", checked, worst, dt)};
}

PipelineConfig small_sensors(PipelineConfig cfg) {
  cfg.source_sensor = SensorSpec::from_degrees(32, 600, -17.6, 2.4);
  cfg.target_sensor = SensorSpec::from_degrees(16, 300, -30, 10);
  return cfg;
}

Outcome perturbation_norm() {
  PipelineConfig cfg = small_sensors({});
  cfg.seed = 404;
  cfg.epochs_am = 2;
  cfg.perturbation.epsilon = 0.001;
  const Datasets data = synthesize_dataset(cfg.seed, cfg);
  const auto [first, second] = run_full(cfg, data);
  const PerturbStats& p = second.perturbation;
  const std::size_t moved = p.translated + p.added;
  const bool pass = moved > 0 && p.zero_delta == 0 && p.max_norm_error < 1e-9;
  return {pass, fmt("translate=%zu add=%zu zero_delta=%zu max_norm_err=%.3g", p.translated, p.added, p.zero_delta,
                    p.max_norm_error)};
}

Outcome descent_property() {
  const SurrogateLoss provider;
  PerturbationConfig cfg;
  cfg.epsilon = 0.001;
  cfg.mode_weights = {1.0, 0.0, 0.0};
  int descended = 0;
  for (std::uint64_t t = 0; t < 200; ++t) {
    Rng rng = derive_rng(5150, 5, t);
    Scene scene = gradcheck_fixture(rng);
    scene.tag = DomainTag::TargetUnlabeled;
    scene.pseudo_labeled = true;
    const double before = surrogate_loss(scene, scene.boxes).loss;
    const AdversarialSample s = adversarial_perturb(scene, scene.boxes, provider, cfg, rng);
    if (surrogate_loss(s.scene, scene.boxes).loss < before) ++descended;
  }
  return {descended >= 190, fmt("descended=%d/200 (%.1f%%)", descended, descended / 2.0)};
}

bool independent_inside(const SectorMask& mask, double x, double y) {
  const double two_pi = 2 * std::acos(-1.0);
  double a = std::atan2(y, x);
  if (a < 0) a += two_pi;
  for (const Sector& s : mask.sectors()) {
    if (std::fmod(a - s.start + 2 * two_pi, two_pi) < s.width) return true;
  }
  return false;
}

Outcome mix_partition() {
  const SensorSpec spec = SensorSpec::from_degrees(32, 600, -30, 10);
  std::size_t straddlers = 0, bad_side = 0, total_points = 0, total_boxes = 0;
  for (std::uint64_t d = 0; d < 1000; ++d) {
    Rng rng = derive_rng(6006, 6, d);
    Scene src = synthesize_scene(rng, 3 + static_cast<int>(d % 5), spec);
    Scene tgt = synthesize_scene(rng, 3 + static_cast<int>(d % 4), spec);
    src.tag = DomainTag::Source;
    tgt.tag = DomainTag::TargetLabeled;
    for (Point& p : src.points) p.intensity = 0.0;
    for (Point& p : tgt.points) p.intensity = 1.0;
    const SectorMask mask = sample_sectors(rng, MaskParams{});
    const Scene mixed = polar_mix(src, tgt, mask);
    for (const Box3D& b : mixed.boxes) straddlers += box_crosses_boundary(b, mask) ? 1 : 0;
    for (const Point& p : mixed.points) {
      const bool from_target = p.intensity == 1.0;
      if (independent_inside(mask, p.x, p.y) != from_target) ++bad_side;
    }
    total_points += mixed.points.size();
    total_boxes += mixed.boxes.size();
  }
  return {straddlers == 0 && bad_side == 0 && total_points > 0,
          fmt("draws=1000 boxes=%zu straddling=%zu points=%zu wrong_side=%zu", total_boxes, straddlers,
              total_points, bad_side)};
}

Outcome consistency_identities() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> pos(-40, 40), ext(0.5, 5), yaw(-3, 3);
  auto random_set = [&](int n) {
    std::vector<Box3D> v;
    for (int i = 0; i < n; ++i) v.push_back({pos(rng), pos(rng), pos(rng) / 10, ext(rng), ext(rng), ext(rng), yaw(rng), 0});
    return v;
  };
  double identical_max = 0.0, asym_max = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const auto a = random_set(1 + t % 7);
    const auto b = random_set(1 + t % 5);
    identical_max = std::max(identical_max, consistency_loss(a, a));
    asym_max = std::max(asym_max, std::abs(consistency_loss(a, b) - consistency_loss(b, a)));
  }
  const std::vector<Box3D> s1{{0, 0, 0, 2, 4, 1.5, 0, 0}};
  const std::vector<Box3D> s2{{1, 0, 0, 2, 4, 1.5, 0.7, 0}};
  const double singleton = consistency_loss(s1, s2);
  const bool pass = identical_max == 0.0 && asym_max <= 1e-12 && std::abs(singleton - 1.0) < 1e-15;
  return {pass, fmt("identical_max=%.3g symmetry_gap=%.3g two_singleton=%.17g", identical_max, asym_max, singleton)};
}

Outcome probability_calibration() {
  PipelineConfig cfg;
  cfg.source_sensor = SensorSpec::from_degrees(8, 60, -17.6, 2.4);
  cfg.target_sensor = SensorSpec::from_degrees(4, 30, -30, 10);
  cfg.seed = 8008;
  SynthCounts counts{8, 2, 8, 1, 1};
  NoiseParams tiny;
  tiny.min_cluster_points = 20;
  tiny.max_cluster_points = 24;
  const Datasets data = synthesize_dataset(cfg.seed, cfg, counts, tiny);
  const GridClusterDetector oracle(cfg.oracle);

  const auto t0 = Clock::now();
  cfg.epochs_tm = 10000;  // 10 samples per epoch
  const StageReport tm = run_targetmix_stage(cfg, data.source, data.target_labeled, oracle);
  cfg.epochs_am = 10000;  // 10 samples per epoch
  PseudoLabelResult pseudo = generate_pseudo_labels(oracle, data.target_unlabeled, 0.0);
  const StageReport am = run_advmix_stage(cfg, data.target_labeled, pseudo.scenes, oracle, oracle);
  const double dt = seconds_since(t0);
  const bool pass = tm.scenes_processed >= 100000 && am.scenes_processed >= 100000 &&
                    std::abs(tm.mixed_fraction - cfg.p_tm) <= 0.01 && std::abs(am.mixed_fraction - cfg.p_am) <= 0.01;
  return {pass, fmt("p_tm: %zu draws fraction=%.5f; p_am: %zu draws fraction=%.5f; time=%.3gs", tm.scenes_processed,
                    tm.mixed_fraction, am.scenes_processed, am.mixed_fraction, dt)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome end_to_end() {
  const fs::path root = fs::temp_directory_path() / "lidaraug_acceptance";
  fs::remove_all(root);
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) {
    args.insert(args.begin(), "lidaraug");
    return cli::dispatch(args, out, err);
  };
  if (run({"synth", "--seed", "2025", "--out", (root / "manifest").string()}) != cli::kOk) {
    return {false, "synth failed: " + err.str()};
  }
  const Datasets data = read_manifest(root / "manifest");
  const std::size_t scenes = data.source.size() + data.target_labeled.size() + data.target_unlabeled.size();

  const auto t0 = Clock::now();
  const int a = run({"pipeline", "--manifest", (root / "manifest").string(), "--out", (root / "run_a").string()});
  const double dt = seconds_since(t0);
  const int b = run({"pipeline", "--manifest", (root / "manifest").string(), "--out", (root / "run_b").string()});
  const bool same = a == cli::kOk && b == cli::kOk &&
                    slurp(root / "run_a" / "report.log") == slurp(root / "run_b" / "report.log") &&
                    slurp(root / "run_a" / "summary.json") == slurp(root / "run_b" / "summary.json") &&
                    !slurp(root / "run_a" / "report.log").empty();
  fs::remove_all(root);
  return {scenes == 40 && same && dt < 60.0,
          fmt("scenes=%zu exit=(%d,%d) identical=%d time=%.3gs", scenes, a, b, same ? 1 : 0, dt)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"sensor arithmetic", sensor_arithmetic},
      {"range-image round trip", range_image_round_trip},
      {"gradient oracle", gradient_oracle},
      {"perturbation norm", perturbation_norm},
      {"descent property", descent_property},
      {"mix partition", mix_partition},
      {"consistency identities", consistency_identities},
      {"probability calibration", probability_calibration},
      {"end-to-end determinism", end_to_end},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
