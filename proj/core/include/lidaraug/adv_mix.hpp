#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "lidaraug/geometry.hpp"
#include "lidaraug/random.hpp"

namespace lidaraug {

using Vec3 = std::array<double, 3>;

/// Per-point loss gradient with respect to (x, y, z), index-aligned with a scene's points.
struct GradientField {
  std::vector<Vec3> grads;
};

struct LossAndGradient {
  double loss = 0.0;
  GradientField field;
};

/// A differentiable detection loss evaluated against a set of reference boxes.
/// Implementations must return the exact gradient of `loss` with respect to every
/// point's coordinates and must be safe to call concurrently.
class GradientProvider {
 public:
  virtual ~GradientProvider() = default;
  virtual LossAndGradient loss_and_gradient(const Scene& scene,
                                            std::span<const Box3D> boxes) const = 0;
};

double smooth_l1(double x, double knee);
double smooth_l1_derivative(double x, double knee);

/// Centroid-alignment regression loss: for every box, the smooth-L1 of the distance
/// between the in-box points' centroid (in box coordinates) and the box center, averaged
/// over boxes. Boxes with no points contribute zero. Throws EmptyBoxList.
LossAndGradient surrogate_loss(const Scene& scene, std::span<const Box3D> boxes,
                               double knee = 1.0);

class SurrogateLoss final : public GradientProvider {
 public:
  explicit SurrogateLoss(double knee = 1.0);
  LossAndGradient loss_and_gradient(const Scene& scene,
                                    std::span<const Box3D> boxes) const override;
  double knee() const { return knee_; }

 private:
  double knee_;
};

enum class PerturbMode : std::uint8_t { Translate = 0, Add = 1, Remove = 2 };

struct PerturbationConfig {
  double epsilon = 0.001;  // meters
  double rho = 0.5;        // per-point selection probability
  std::array<double, 3> mode_weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};  // translate, add, remove

  void validate() const;
};

/// delta_i = epsilon * (-g_i) / |g_i| for every point; zero where the gradient vanishes.
std::vector<Vec3> perturbation_delta(const GradientField& field, double epsilon);

struct PerturbStats {
  std::size_t total_points = 0;
  std::size_t candidates = 0;  // points inside at least one pseudo-box
  std::size_t selected = 0;
  std::size_t translated = 0;
  std::size_t added = 0;
  std::size_t removed = 0;
  /// Selected translate/add points whose gradient vanished, leaving delta = 0.
  std::size_t zero_delta = 0;
  /// Largest | |delta| - epsilon | over all translate/add perturbations with nonzero delta.
  double max_norm_error = 0.0;

  PerturbStats& operator+=(const PerturbStats& o);
};

struct AdversarialSample {
  Scene scene;
  PerturbStats stats;
};

/// Perturbs the points inside `pseudo_boxes` along the normalized negative loss gradient:
/// each candidate is selected with probability rho and then translated, duplicated at the
/// translated position, or removed. Translated points keep their index, removed points are
/// erased and added points are appended in selection order. Points outside every box are
/// copied unchanged. The output carries the pseudo-boxes as labels.
AdversarialSample adversarial_perturb(const Scene& scene, std::span<const Box3D> pseudo_boxes,
                                      const GradientProvider& provider,
                                      const PerturbationConfig& cfg, Rng& rng);

/// Concatenates points and boxes, `a` first; tagged Mixed.
Scene point_mixup(const Scene& a, const Scene& b);

/// Distance between boxes over (cx, cy, cz, w, l, h); heading is ignored.
double box_distance(const Box3D& a, const Box3D& b);

/// Bidirectional nearest-box distance, normalized by the total box count.
/// Both sets empty gives 0; exactly one empty throws OneSidedEmpty.
double consistency_loss(std::span<const Box3D> boxes_am, std::span<const Box3D> boxes_pm);

/// As above, returning nullopt instead of throwing for one-sided-empty inputs.
std::optional<double> try_consistency_loss(std::span<const Box3D> boxes_am,
                                           std::span<const Box3D> boxes_pm);

using BoxSetPair = std::pair<std::vector<Box3D>, std::vector<Box3D>>;

/// Mean per-sample consistency over samples where it is defined; 0 for no defined samples.
double batch_consistency(std::span<const BoxSetPair> samples);

}  // namespace lidaraug
