#pragma once

#include <vector>

#include "lidaraug/geometry.hpp"
#include "lidaraug/random.hpp"

namespace lidaraug {

/// Half-open azimuth interval [start, start + width), wrapping through 2pi.
struct Sector {
  double start = 0.0;  // [0, 2pi)
  double width = 0.0;  // (0, 2pi)

  double end() const { return wrap_two_pi(start + width); }
  bool contains(double azimuth) const { return wrap_two_pi(azimuth - start) < width; }
};

/// K disjoint azimuth sectors. Points and boxes inside any sector come from the target
/// scene, the complement from the source scene.
class SectorMask {
 public:
  /// Throws ValidationError unless sectors are well-formed, pairwise disjoint and
  /// leave part of the circle uncovered.
  explicit SectorMask(std::vector<Sector> sectors);

  const std::vector<Sector>& sectors() const { return sectors_; }
  std::size_t size() const { return sectors_.size(); }

  bool inside(double azimuth) const;
  /// Start and end angle of every sector (2K values).
  std::vector<double> boundaries() const;
  double covered() const;

 private:
  std::vector<Sector> sectors_;
};

struct MaskParams {
  int k = 2;
  double min_width = kPi / 6.0;
  double max_width = kPi / 2.0;
};

bool sectors_overlap(const Sector& a, const Sector& b);

/// Draws K sectors with widths uniform in [min_width, max_width] and uniform starts,
/// rejecting overlapping draws. Throws SectorPackingFailed after 1000 rejected attempts
/// or when the minimum widths alone cover the circle.
SectorMask sample_sectors(Rng& rng, int k, double min_width, double max_width);
inline SectorMask sample_sectors(Rng& rng, const MaskParams& p) {
  return sample_sectors(rng, p.k, p.min_width, p.max_width);
}

/// True iff the shortest azimuth arc covering the box's corners contains a sector boundary.
/// Boxes whose footprint encloses the z-axis span every azimuth and always cross.
/// Throws DegenerateAzimuth when the box center is within 1e-6 m of the z-axis.
bool box_crosses_boundary(const Box3D& box, const SectorMask& mask);

/// Removes boundary-cut boxes together with their points, then keeps the points and boxes
/// (by center azimuth) on the requested side of the mask.
Scene enhanced_filter(const Scene& scene, const SectorMask& mask, bool keep_inside);

/// Source outside the sectors plus target inside them; tagged Mixed.
Scene polar_mix(const Scene& source, const Scene& target, const SectorMask& mask);

/// With probability p_tm, polar-mixes the pair under a freshly sampled mask; otherwise
/// returns the source scene unchanged.
Scene targetmix_sample(Rng& rng, double p_tm, const Scene& source, const Scene& target,
                       const MaskParams& mask_params);

}  // namespace lidaraug
