#include "lidaraug/adv_mix.hpp"

#include <cmath>
#include <limits>

#include "lidaraug/errors.hpp"

namespace lidaraug {

double smooth_l1(double x, double knee) {
  const double a = std::abs(x);
  return a < knee ? 0.5 * a * a / knee : a - 0.5 * knee;
}

double smooth_l1_derivative(double x, double knee) {
  const double a = std::abs(x);
  const double d = a < knee ? a / knee : 1.0;
  return x < 0.0 ? -d : d;
}

LossAndGradient surrogate_loss(const Scene& scene, std::span<const Box3D> boxes, double knee) {
  if (boxes.empty()) throw EmptyBoxList();
  if (!(knee > 0.0)) throw ValidationError("smooth-L1 knee must be positive");

  LossAndGradient out;
  out.field.grads.assign(scene.points.size(), Vec3{0.0, 0.0, 0.0});
  const double per_box = 1.0 / static_cast<double>(boxes.size());

  for (const Box3D& box : boxes) {
    const auto inside = points_in_box(scene, box);
    if (inside.empty()) continue;
    const double inv_n = 1.0 / static_cast<double>(inside.size());

    Vec3 centroid{0.0, 0.0, 0.0};
    for (std::size_t i : inside) {
      const Point& p = scene.points[i];
      const auto local = to_box_frame(box, p.x, p.y, p.z);
      for (int k = 0; k < 3; ++k) centroid[k] += local[k];
    }
    for (double& v : centroid) v *= inv_n;

    const double dist = std::hypot(centroid[0], centroid[1], centroid[2]);
    out.loss += per_box * smooth_l1(dist, knee);
    if (dist == 0.0) continue;

    // d loss / d centroid, then back through the mean and the rotation into world axes.
    const double scale = per_box * smooth_l1_derivative(dist, knee) / dist * inv_n;
    const Vec3 g_local{scale * centroid[0], scale * centroid[1], scale * centroid[2]};
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    const Vec3 g_world{c * g_local[0] - s * g_local[1], s * g_local[0] + c * g_local[1], g_local[2]};
    for (std::size_t i : inside) {
      for (int k = 0; k < 3; ++k) out.field.grads[i][k] += g_world[k];
    }
  }
  return out;
}

SurrogateLoss::SurrogateLoss(double knee) : knee_(knee) {
  if (!(knee > 0.0)) throw ValidationError("smooth-L1 knee must be positive");
}

LossAndGradient SurrogateLoss::loss_and_gradient(const Scene& scene,
                                                 std::span<const Box3D> boxes) const {
  return surrogate_loss(scene, boxes, knee_);
}

void PerturbationConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be positive");
  if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("rho must lie in [0, 1]");
  double sum = 0.0;
  for (double w : mode_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("mode weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("mode weights must sum to 1");
}

std::vector<Vec3> perturbation_delta(const GradientField& field, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  std::vector<Vec3> deltas(field.grads.size(), Vec3{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < field.grads.size(); ++i) {
    const Vec3& g = field.grads[i];
    const double norm = std::hypot(g[0], g[1], g[2]);
    if (norm == 0.0 || !std::isfinite(norm)) continue;
    const double f = -epsilon / norm;
    deltas[i] = Vec3{f * g[0], f * g[1], f * g[2]};
  }
  return deltas;
}

PerturbStats& PerturbStats::operator+=(const PerturbStats& o) {
  total_points += o.total_points;
  candidates += o.candidates;
  selected += o.selected;
  translated += o.translated;
  added += o.added;
  removed += o.removed;
  zero_delta += o.zero_delta;
  max_norm_error = std::max(max_norm_error, o.max_norm_error);
  return *this;
}

AdversarialSample adversarial_perturb(const Scene& scene, std::span<const Box3D> pseudo_boxes,
                                      const GradientProvider& provider,
                                      const PerturbationConfig& cfg, Rng& rng) {
  cfg.validate();
  if (scene.tag != DomainTag::TargetUnlabeled) {
    throw ValidationError("adversarial perturbation expects an unlabeled target scene");
  }

  AdversarialSample out;
  out.stats.total_points = scene.points.size();
  out.scene.tag = DomainTag::TargetUnlabeled;
  out.scene.pseudo_labeled = true;
  out.scene.boxes.assign(pseudo_boxes.begin(), pseudo_boxes.end());
  if (pseudo_boxes.empty()) {
    out.scene.points = scene.points;
    return out;
  }

  std::vector<char> candidate(scene.points.size(), 0);
  for (const Box3D& box : pseudo_boxes) {
    for (std::size_t i : points_in_box(scene, box)) candidate[i] = 1;
  }

  const LossAndGradient lg = provider.loss_and_gradient(scene, pseudo_boxes);
  if (lg.field.grads.size() != scene.points.size()) {
    throw ValidationError("gradient provider returned a field of the wrong length");
  }
  const std::vector<Vec3> deltas = perturbation_delta(lg.field, cfg.epsilon);

  std::discrete_distribution<int> pick_mode(cfg.mode_weights.begin(), cfg.mode_weights.end());
  std::vector<Point> appended;
  out.scene.points.reserve(scene.points.size());

  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    const Point& p = scene.points[i];
    if (!candidate[i]) {
      out.scene.points.push_back(p);
      continue;
    }
    ++out.stats.candidates;
    if (!bernoulli(rng, cfg.rho)) {
      out.scene.points.push_back(p);
      continue;
    }
    ++out.stats.selected;
    const auto mode = static_cast<PerturbMode>(pick_mode(rng));
    if (mode == PerturbMode::Remove) {
      ++out.stats.removed;
      continue;
    }

    const Vec3& d = deltas[i];
    const double norm = std::hypot(d[0], d[1], d[2]);
    if (norm == 0.0) {
      ++out.stats.zero_delta;
    } else {
      out.stats.max_norm_error = std::max(out.stats.max_norm_error, std::abs(norm - cfg.epsilon));
    }
    const Point moved{p.x + d[0], p.y + d[1], p.z + d[2], p.intensity};
    if (mode == PerturbMode::Translate) {
      ++out.stats.translated;
      out.scene.points.push_back(moved);
    } else {
      ++out.stats.added;
      out.scene.points.push_back(p);
      appended.push_back(moved);
    }
  }
  out.scene.points.insert(out.scene.points.end(), appended.begin(), appended.end());
  return out;
}

Scene point_mixup(const Scene& a, const Scene& b) {
  Scene out;
  out.points.reserve(a.points.size() + b.points.size());
  out.points = a.points;
  out.points.insert(out.points.end(), b.points.begin(), b.points.end());
  out.boxes = a.boxes;
  out.boxes.insert(out.boxes.end(), b.boxes.begin(), b.boxes.end());
  out.tag = DomainTag::Mixed;
  return out;
}

double box_distance(const Box3D& a, const Box3D& b) {
  const double d[6] = {a.cx - b.cx, a.cy - b.cy, a.cz - b.cz, a.w - b.w, a.l - b.l, a.h - b.h};
  double sum = 0.0;
  for (double v : d) sum += v * v;
  return std::sqrt(sum);
}

namespace {

double nearest_sum(std::span<const Box3D> from, std::span<const Box3D> to) {
  double total = 0.0;
  for (const Box3D& a : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const Box3D& b : to) best = std::min(best, box_distance(a, b));
    total += best;
  }
  return total;
}

}  // namespace

std::optional<double> try_consistency_loss(std::span<const Box3D> boxes_am,
                                           std::span<const Box3D> boxes_pm) {
  if (boxes_am.empty() && boxes_pm.empty()) return 0.0;
  if (boxes_am.empty() || boxes_pm.empty()) return std::nullopt;
  const double total = nearest_sum(boxes_am, boxes_pm) + nearest_sum(boxes_pm, boxes_am);
  return total / static_cast<double>(boxes_am.size() + boxes_pm.size());
}

double consistency_loss(std::span<const Box3D> boxes_am, std::span<const Box3D> boxes_pm) {
  const auto loss = try_consistency_loss(boxes_am, boxes_pm);
  if (!loss) throw OneSidedEmpty();
  return *loss;
}

double batch_consistency(std::span<const BoxSetPair> samples) {
  double sum = 0.0;
  std::size_t defined = 0;
  for (const auto& [am, pm] : samples) {
    if (const auto loss = try_consistency_loss(am, pm)) {
      sum += *loss;
      ++defined;
    }
  }
  return defined == 0 ? 0.0 : sum / static_cast<double>(defined);
}

}  // namespace lidaraug
