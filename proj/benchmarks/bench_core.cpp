#include <benchmark/benchmark.h>

#include "lidaraug/adv_mix.hpp"
#include "lidaraug/detector.hpp"
#include "lidaraug/gradcheck.hpp"
#include "lidaraug/sensor_match.hpp"
#include "lidaraug/synth.hpp"
#include "lidaraug/target_mix.hpp"

namespace {

using namespace lidaraug;

Scene waymo_scene(std::uint64_t seed) {
  Rng rng = derive_rng(seed, 0);
  Scene s = synthesize_scene(rng, 6, waymo_spec());
  s.tag = DomainTag::Source;
  return s;
}

void BM_BuildRangeImage(benchmark::State& state) {
  const Scene scene = waymo_scene(1);
  for (auto _ : state) benchmark::DoNotOptimize(build_range_image(scene, waymo_spec()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scene.points.size()));
}
BENCHMARK(BM_BuildRangeImage)->Unit(benchmark::kMillisecond);

void BM_DistributionMatch(benchmark::State& state) {
  const Scene scene = waymo_scene(2);
  for (auto _ : state) benchmark::DoNotOptimize(lidar_distribution_match(scene, waymo_spec(), nuscenes_spec()));
}
BENCHMARK(BM_DistributionMatch)->Unit(benchmark::kMillisecond);

void BM_PolarMix(benchmark::State& state) {
  const Scene source = lidar_distribution_match(waymo_scene(3), waymo_spec(), nuscenes_spec());
  Rng rng = derive_rng(4, 0);
  Scene target = synthesize_scene(rng, 6, nuscenes_spec());
  target.tag = DomainTag::TargetLabeled;
  const SectorMask mask = sample_sectors(rng, MaskParams{});
  for (auto _ : state) benchmark::DoNotOptimize(polar_mix(source, target, mask));
}
BENCHMARK(BM_PolarMix)->Unit(benchmark::kMicrosecond);

void BM_SurrogateLoss(benchmark::State& state) {
  Rng rng = derive_rng(5, 0);
  const Scene scene = gradcheck_fixture(rng, static_cast<int>(state.range(0)), 2000);
  for (auto _ : state) benchmark::DoNotOptimize(surrogate_loss(scene, scene.boxes));
}
BENCHMARK(BM_SurrogateLoss)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_AdversarialPerturb(benchmark::State& state) {
  Rng rng = derive_rng(6, 0);
  Scene scene = synthesize_scene(rng, 6, nuscenes_spec());
  scene.tag = DomainTag::TargetUnlabeled;
  scene.pseudo_labeled = true;
  const SurrogateLoss provider;
  const PerturbationConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(adversarial_perturb(scene, scene.boxes, provider, cfg, rng));
}
BENCHMARK(BM_AdversarialPerturb)->Unit(benchmark::kMicrosecond);

void BM_GridClusterPredict(benchmark::State& state) {
  Rng rng = derive_rng(7, 0);
  const Scene scene = synthesize_scene(rng, 8, nuscenes_spec());
  const GridClusterDetector detector;
  for (auto _ : state) benchmark::DoNotOptimize(detector.predict(scene));
}
BENCHMARK(BM_GridClusterPredict)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
