#include "lidaraug/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "lidaraug/errors.hpp"

namespace lidaraug {

void GridClusterParams::validate() const {
  if (!(cell_size > 0.0)) throw ValidationError("oracle cell size must be positive");
  if (min_points < 1) throw ValidationError("oracle min points must be >= 1");
  if (!(score_saturation > 0.0)) throw ValidationError("oracle score saturation must be positive");
  if (!(box_padding > 0.0)) throw ValidationError("oracle box padding must be positive");
  if (!(knee > 0.0)) throw ValidationError("smooth-L1 knee must be positive");
}

GridClusterDetector::GridClusterDetector(GridClusterParams params) : params_(params) {
  params_.validate();
}

namespace {

using CellKey = std::pair<std::int64_t, std::int64_t>;

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    return static_cast<std::size_t>(k.first * 73856093LL ^ k.second * 19349663LL);
  }
};

}  // namespace

std::vector<Box3D> GridClusterDetector::predict(const Scene& scene) const {
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> cells;
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    const Point& p = scene.points[i];
    if (p.z <= params_.ground_z) continue;
    const CellKey key{static_cast<std::int64_t>(std::floor(p.x / params_.cell_size)),
                      static_cast<std::int64_t>(std::floor(p.y / params_.cell_size))};
    cells[key].push_back(i);
  }

  // Visit cells in sorted order so the output does not depend on hash iteration order.
  std::vector<CellKey> keys;
  keys.reserve(cells.size());
  for (const auto& [key, members] : cells) keys.push_back(key);
  std::sort(keys.begin(), keys.end());

  std::unordered_map<CellKey, bool, CellKeyHash> visited;
  std::vector<Box3D> boxes;
  std::vector<CellKey> stack;
  for (const CellKey& seed : keys) {
    if (visited[seed]) continue;
    visited[seed] = true;
    stack.assign(1, seed);

    std::size_t count = 0;
    double lo[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()};
    double hi[3] = {-lo[0], -lo[1], -lo[2]};
    while (!stack.empty()) {
      const CellKey cur = stack.back();
      stack.pop_back();
      for (std::size_t i : cells.at(cur)) {
        const Point& p = scene.points[i];
        const double c[3] = {p.x, p.y, p.z};
        for (int k = 0; k < 3; ++k) {
          lo[k] = std::min(lo[k], c[k]);
          hi[k] = std::max(hi[k], c[k]);
        }
        ++count;
      }
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
          const CellKey next{cur.first + dx, cur.second + dy};
          if (!cells.contains(next)) continue;
          bool& seen = visited[next];
          if (seen) continue;
          seen = true;
          stack.push_back(next);
        }
      }
    }
    if (count < static_cast<std::size_t>(params_.min_points)) continue;

    Box3D box;
    box.cx = 0.5 * (lo[0] + hi[0]);
    box.cy = 0.5 * (lo[1] + hi[1]);
    box.cz = 0.5 * (lo[2] + hi[2]);
    box.l = hi[0] - lo[0] + params_.box_padding;
    box.w = hi[1] - lo[1] + params_.box_padding;
    box.h = hi[2] - lo[2] + params_.box_padding;
    box.yaw = 0.0;
    box.class_id = 0;
    box.score = std::min(1.0, static_cast<double>(count) / params_.score_saturation);
    boxes.push_back(box);
  }
  return boxes;
}

LossAndGradient GridClusterDetector::loss_and_gradient(const Scene& scene,
                                                       std::span<const Box3D> boxes) const {
  return surrogate_loss(scene, boxes, params_.knee);
}

std::unique_ptr<DetectorOracle> GridClusterDetector::clone() const {
  return std::make_unique<GridClusterDetector>(params_);
}

double detection_loss(const GradientProvider& provider, const Scene& scene) {
  if (scene.boxes.empty()) return 0.0;
  return provider.loss_and_gradient(scene, scene.boxes).loss;
}

}  // namespace lidaraug
