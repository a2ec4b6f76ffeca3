#pragma once

#include <memory>
#include <vector>

#include "lidaraug/adv_mix.hpp"

namespace lidaraug {

/// Stand-in for a trained detector: scored predictions plus a differentiable loss.
/// Every method is read-only, so a teacher shared across threads stays frozen.
class DetectorOracle : public GradientProvider {
 public:
  virtual std::vector<Box3D> predict(const Scene& scene) const = 0;
  /// A detector with the same configuration (student initialization).
  virtual std::unique_ptr<DetectorOracle> clone() const = 0;
};

struct GridClusterParams {
  double cell_size = 1.0;          // meters
  int min_points = 5;              // per cluster
  double ground_z = -1.4;          // points at or below are treated as ground
  double score_saturation = 50.0;  // score = min(1, points / saturation)
  double box_padding = 0.1;        // added to each extent, meters
  double knee = 1.0;               // smooth-L1 knee of the loss

  void validate() const;
};

/// Reference oracle: connected components (8-neighborhood) of occupied cells on a 2D grid
/// over non-ground points, each component fitted with an axis-aligned box. The loss is the
/// centroid-alignment surrogate.
class GridClusterDetector final : public DetectorOracle {
 public:
  explicit GridClusterDetector(GridClusterParams params = {});

  std::vector<Box3D> predict(const Scene& scene) const override;
  LossAndGradient loss_and_gradient(const Scene& scene,
                                    std::span<const Box3D> boxes) const override;
  std::unique_ptr<DetectorOracle> clone() const override;

  const GridClusterParams& params() const { return params_; }

 private:
  GridClusterParams params_;
};

/// Detection loss of `scene` against its own boxes; zero for an unlabeled scene.
double detection_loss(const GradientProvider& provider, const Scene& scene);

}  // namespace lidaraug
