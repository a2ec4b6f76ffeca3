#include "lidaraug/sensor_match.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "lidaraug/errors.hpp"

namespace lidaraug {

void SensorSpec::validate() const {
  if (channels < 1) throw ValidationError("sensor channels must be >= 1");
  if (points_per_channel < 1) throw ValidationError("sensor points_per_channel must be >= 1");
  if (!std::isfinite(vfov_min) || !std::isfinite(vfov_max) || !(vfov_min < vfov_max)) {
    throw ValidationError("sensor vertical field of view must satisfy vfov_min < vfov_max");
  }
  if (vfov_min < -kPi / 2 || vfov_max > kPi / 2) {
    throw ValidationError("sensor vertical field of view must lie within [-90, 90] degrees");
  }
}

SensorSpec SensorSpec::from_degrees(int channels, int points_per_channel, double vfov_min_deg,
                                    double vfov_max_deg) {
  SensorSpec spec{channels, points_per_channel, deg_to_rad(vfov_min_deg), deg_to_rad(vfov_max_deg)};
  spec.validate();
  return spec;
}

SensorSpec waymo_spec() { return SensorSpec::from_degrees(64, 2200, -17.6, 2.4); }
SensorSpec nuscenes_spec() { return SensorSpec::from_degrees(32, 1100, -30.0, 10.0); }
SensorSpec kitti_spec() { return SensorSpec::from_degrees(64, 2048, -23.6, 3.2); }

RangeImage::RangeImage(const SensorSpec& spec) : RangeImage(spec, 1, 1, 0, 0) {}

RangeImage::RangeImage(const SensorSpec& spec, int row_stride, int col_stride, int row_offset,
                       int col_offset)
    : spec_(spec),
      row_stride_(row_stride),
      col_stride_(col_stride),
      row_offset_(row_offset),
      col_offset_(col_offset) {
  spec_.validate();
  if (row_stride < 1 || col_stride < 1) throw ValidationError("range image strides must be >= 1");
  if (row_offset < 0 || row_offset >= row_stride || col_offset < 0 || col_offset >= col_stride) {
    throw ValidationError("range image offsets must lie in [0, stride)");
  }
  // Number of indices i in [0, n) with i % stride == offset.
  auto kept = [](int n, int stride, int offset) {
    return offset >= n ? 0 : (n - offset + stride - 1) / stride;
  };
  height_ = kept(spec_.channels, row_stride_, row_offset_);
  width_ = kept(spec_.points_per_channel, col_stride_, col_offset_);
  cells_.assign(static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_), std::nullopt);
}

std::size_t RangeImage::occupancy() const {
  std::size_t n = 0;
  for (const auto& c : cells_) n += c.has_value() ? 1 : 0;
  return n;
}

double RangeImage::row_elevation(int row) const {
  const int beam = row_offset_ + row * row_stride_;
  return spec_.vfov_min + (beam + 0.5) * row_pitch();
}

double RangeImage::col_azimuth(int col) const {
  const int column = col_offset_ + col * col_stride_;
  return (column + 0.5) * col_pitch();
}

RangeImage build_range_image(const Scene& scene, const SensorSpec& spec) {
  RangeImage img(spec);
  const int rows = spec.channels;
  const int cols = spec.points_per_channel;
  const double span = spec.vfov_span();
  for (const Point& p : scene.points) {
    const double planar = std::hypot(p.x, p.y);
    const double range = std::hypot(planar, p.z);
    if (range == 0.0) continue;
    const double elevation = std::atan2(p.z, planar);
    if (elevation < spec.vfov_min || elevation > spec.vfov_max) continue;
    int row = static_cast<int>(std::floor((elevation - spec.vfov_min) / span * rows));
    if (row >= rows) row = rows - 1;  // elevation == vfov_max
    int col = static_cast<int>(std::floor(azimuth_of(p.x, p.y) / kTwoPi * cols));
    if (col >= cols) col = cols - 1;
    auto& cell = img.at(row, col);
    if (!cell || range < cell->range) cell = RangeCell{range, p.intensity};
  }
  return img;
}

DownsampleRatios downsample_ratios(const SensorSpec& src, const SensorSpec& tgt) {
  src.validate();
  tgt.validate();
  const double vertical = (tgt.vfov_span() / src.vfov_span()) *
                          (static_cast<double>(src.channels) / static_cast<double>(tgt.channels));
  const double horizontal =
      static_cast<double>(src.points_per_channel) / static_cast<double>(tgt.points_per_channel);
  return {vertical, horizontal};
}

DownsampleFactors downsample_factors(const SensorSpec& src, const SensorSpec& tgt) {
  const DownsampleRatios raw = downsample_ratios(src, tgt);
  DownsampleFactors f;
  f.upsample_required = raw.vertical < 1.0 || raw.horizontal < 1.0;
  f.vertical = std::max(1, static_cast<int>(std::lround(raw.vertical)));
  f.horizontal = std::max(1, static_cast<int>(std::lround(raw.horizontal)));
  return f;
}

RangeImage downsample_range_image(const RangeImage& img, int v, int h, int row_offset,
                                  int col_offset) {
  if (v < 1 || h < 1) throw ValidationError("downsample factors must be >= 1");
  if (row_offset < 0 || row_offset >= v || col_offset < 0 || col_offset >= h) {
    throw ValidationError("downsample offsets must lie in [0, factor)");
  }
  // Compose with any striding the input already carries.
  RangeImage out(img.spec(), img.row_stride() * v, img.col_stride() * h,
                 img.row_offset() + row_offset * img.row_stride(),
                 img.col_offset() + col_offset * img.col_stride());
  for (int r = 0; r < out.height(); ++r) {
    for (int c = 0; c < out.width(); ++c) {
      out.at(r, c) = img.at(row_offset + r * v, col_offset + c * h);
    }
  }
  return out;
}

Scene backproject(const RangeImage& img) {
  Scene scene;
  scene.points.reserve(img.occupancy());
  for (int r = 0; r < img.height(); ++r) {
    const double elevation = img.row_elevation(r);
    for (int c = 0; c < img.width(); ++c) {
      const auto& cell = img.at(r, c);
      if (!cell) continue;
      scene.points.push_back(
          spherical_to_cart(SphericalCoord{img.col_azimuth(c), elevation, cell->range}, cell->intensity));
    }
  }
  return scene;
}

Scene lidar_distribution_match(const Scene& scene, const SensorSpec& src, const SensorSpec& tgt,
                               StrideOffset offset) {
  if (scene.tag != DomainTag::Source) {
    throw ValidationError("distribution matching expects a source-domain scene");
  }
  const DownsampleFactors f = downsample_factors(src, tgt);
  if (f.upsample_required) {
    std::clog << "warning: target sensor is denser than source (ratios below 1); "
                 "factors floored at 1\n";
  }
  const RangeImage full = build_range_image(scene, src);
  const int row_offset = ((offset.row % f.vertical) + f.vertical) % f.vertical;
  const int col_offset = ((offset.col % f.horizontal) + f.horizontal) % f.horizontal;
  const RangeImage reduced =
      downsample_range_image(full, f.vertical, f.horizontal, row_offset, col_offset);
  Scene out = backproject(reduced);
  out.boxes = scene.boxes;
  out.tag = DomainTag::Source;
  return out;
}

}  // namespace lidaraug
