#include "lidaraug/target_mix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lidaraug/errors.hpp"

namespace lidaraug {

namespace {

constexpr int kMaxPackingAttempts = 1000;
constexpr double kAxisTolerance = 1e-6;

bool footprint_encloses_axis(const Box3D& box) {
  const auto local = to_box_frame(box, 0.0, 0.0, box.cz);
  return std::abs(local[0]) <= 0.5 * box.l && std::abs(local[1]) <= 0.5 * box.w;
}

}  // namespace

bool sectors_overlap(const Sector& a, const Sector& b) {
  // Two half-open arcs intersect iff one contains the other's start.
  return a.contains(b.start) || b.contains(a.start);
}

SectorMask::SectorMask(std::vector<Sector> sectors) : sectors_(std::move(sectors)) {
  if (sectors_.empty()) throw ValidationError("sector mask needs at least one sector");
  for (const Sector& s : sectors_) {
    if (!(s.start >= 0.0 && s.start < kTwoPi)) throw ValidationError("sector start outside [0, 2pi)");
    if (!(s.width > 0.0 && s.width < kTwoPi)) throw ValidationError("sector width outside (0, 2pi)");
  }
  if (covered() >= kTwoPi) throw ValidationError("sectors cover the whole circle");
  for (std::size_t i = 0; i < sectors_.size(); ++i) {
    for (std::size_t j = i + 1; j < sectors_.size(); ++j) {
      if (sectors_overlap(sectors_[i], sectors_[j])) throw ValidationError("sectors overlap");
    }
  }
}

bool SectorMask::inside(double azimuth) const {
  return std::any_of(sectors_.begin(), sectors_.end(),
                     [azimuth](const Sector& s) { return s.contains(azimuth); });
}

std::vector<double> SectorMask::boundaries() const {
  std::vector<double> out;
  out.reserve(2 * sectors_.size());
  for (const Sector& s : sectors_) {
    out.push_back(s.start);
    out.push_back(s.end());
  }
  return out;
}

double SectorMask::covered() const {
  double total = 0.0;
  for (const Sector& s : sectors_) total += s.width;
  return total;
}

SectorMask sample_sectors(Rng& rng, int k, double min_width, double max_width) {
  if (k < 1) throw ValidationError("sector count must be >= 1");
  if (!(min_width > 0.0 && min_width <= max_width && max_width < kTwoPi)) {
    throw ValidationError("sector widths must satisfy 0 < min_width <= max_width < 2pi");
  }
  if (k * min_width >= kTwoPi) {
    throw SectorPackingFailed("cannot pack " + std::to_string(k) +
                              " disjoint sectors: minimum widths cover the full circle");
  }
  std::uniform_real_distribution<double> width_dist(min_width, max_width);
  std::uniform_real_distribution<double> start_dist(0.0, kTwoPi);
  std::vector<Sector> sectors(static_cast<std::size_t>(k));
  for (int attempt = 0; attempt < kMaxPackingAttempts; ++attempt) {
    double total = 0.0;
    for (Sector& s : sectors) {
      s.width = min_width == max_width ? min_width : width_dist(rng);
      s.start = wrap_two_pi(start_dist(rng));
      total += s.width;
    }
    if (total >= kTwoPi) continue;
    bool disjoint = true;
    for (std::size_t i = 0; i < sectors.size() && disjoint; ++i) {
      for (std::size_t j = i + 1; j < sectors.size(); ++j) {
        if (sectors_overlap(sectors[i], sectors[j])) {
          disjoint = false;
          break;
        }
      }
    }
    if (disjoint) return SectorMask(sectors);
  }
  throw SectorPackingFailed("no disjoint placement of " + std::to_string(k) + " sectors after " +
                            std::to_string(kMaxPackingAttempts) + " attempts");
}

bool box_crosses_boundary(const Box3D& box, const SectorMask& mask) {
  if (std::hypot(box.cx, box.cy) < kAxisTolerance) throw DegenerateAzimuth();
  if (footprint_encloses_axis(box)) return true;

  // Shortest arc covering all corner azimuths: the complement of the widest gap.
  std::vector<double> az;
  az.reserve(8);
  for (const Point& c : box_corners(box)) az.push_back(azimuth_of(c.x, c.y));
  std::sort(az.begin(), az.end());
  double widest = kTwoPi - (az.back() - az.front());
  double arc_start = az.front();
  for (std::size_t i = 1; i < az.size(); ++i) {
    const double gap = az[i] - az[i - 1];
    if (gap > widest) {
      widest = gap;
      arc_start = az[i];
    }
  }
  const double arc_width = kTwoPi - widest;

  for (double b : mask.boundaries()) {
    if (wrap_two_pi(b - arc_start) <= arc_width) return true;
  }
  return false;
}

Scene enhanced_filter(const Scene& scene, const SectorMask& mask, bool keep_inside) {
  std::vector<char> dropped(scene.points.size(), 0);
  std::vector<const Box3D*> survivors;
  for (const Box3D& box : scene.boxes) {
    bool crosses = true;
    try {
      crosses = box_crosses_boundary(box, mask);
    } catch (const DegenerateAzimuth&) {
      // No side can be assigned to a box centered on the axis.
    }
    if (crosses) {
      for (std::size_t i : points_in_box(scene, box)) dropped[i] = 1;
    } else {
      survivors.push_back(&box);
    }
  }

  Scene out;
  out.tag = scene.tag;
  out.pseudo_labeled = scene.pseudo_labeled;
  for (std::size_t i = 0; i < scene.points.size(); ++i) {
    if (dropped[i]) continue;
    const Point& p = scene.points[i];
    if (mask.inside(azimuth_of(p.x, p.y)) == keep_inside) out.points.push_back(p);
  }
  for (const Box3D* box : survivors) {
    if (mask.inside(azimuth_of(box->cx, box->cy)) == keep_inside) out.boxes.push_back(*box);
  }
  return out;
}

Scene polar_mix(const Scene& source, const Scene& target, const SectorMask& mask) {
  if (source.tag != DomainTag::Source) throw ValidationError("polar mix expects a source scene first");
  if (target.tag != DomainTag::TargetLabeled) {
    throw ValidationError("polar mix expects a labeled target scene second");
  }
  Scene out = enhanced_filter(source, mask, false);
  Scene inside = enhanced_filter(target, mask, true);
  out.points.insert(out.points.end(), inside.points.begin(), inside.points.end());
  out.boxes.insert(out.boxes.end(), inside.boxes.begin(), inside.boxes.end());
  out.tag = DomainTag::Mixed;
  out.pseudo_labeled = false;
  return out;
}

Scene targetmix_sample(Rng& rng, double p_tm, const Scene& source, const Scene& target,
                       const MaskParams& mask_params) {
  if (!(p_tm >= 0.0 && p_tm <= 1.0)) throw ValidationError("p_tm must lie in [0, 1]");
  if (!bernoulli(rng, p_tm)) return source;
  return polar_mix(source, target, sample_sectors(rng, mask_params));
}

}  // namespace lidaraug
