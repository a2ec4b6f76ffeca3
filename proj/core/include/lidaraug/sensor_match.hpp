#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lidaraug/geometry.hpp"

namespace lidaraug {

/// Spinning LiDAR layout: beams spread evenly over [vfov_min, vfov_max] (radians),
/// `points_per_channel` returns per revolution.
struct SensorSpec {
  int channels = 1;
  int points_per_channel = 1;
  double vfov_min = 0.0;
  double vfov_max = 0.0;

  double vfov_span() const { return vfov_max - vfov_min; }
  void validate() const;

  static SensorSpec from_degrees(int channels, int points_per_channel, double vfov_min_deg,
                                 double vfov_max_deg);

  friend bool operator==(const SensorSpec&, const SensorSpec&) = default;
};

/// 64 beams, ~2200 points per beam, [-17.6, 2.4] degrees.
SensorSpec waymo_spec();
/// 32 beams, 1100 points per beam, [-30, 10] degrees.
SensorSpec nuscenes_spec();
/// 64 beams, [-23.6, 3.2] degrees.
SensorSpec kitti_spec();

struct RangeCell {
  double range = 0.0;
  double intensity = 0.0;

  friend bool operator==(const RangeCell&, const RangeCell&) = default;
};

/// Grid of returns indexed by (elevation row, azimuth column). Row 0 is the lowest beam,
/// column 0 starts at azimuth 0.
///
/// A downsampled image keeps the geometry of the sensor that produced it: row r sits on
/// source beam `row_offset + r * row_stride`, and likewise for columns. A freshly built
/// image has strides of 1 and offsets of 0, so height == spec.channels.
class RangeImage {
 public:
  RangeImage() = default;
  explicit RangeImage(const SensorSpec& spec);
  /// An empty image whose rows and columns sample `spec` at the given strides and offsets.
  RangeImage(const SensorSpec& spec, int row_stride, int col_stride, int row_offset,
             int col_offset);

  int height() const { return height_; }
  int width() const { return width_; }
  const SensorSpec& spec() const { return spec_; }
  int row_stride() const { return row_stride_; }
  int col_stride() const { return col_stride_; }
  int row_offset() const { return row_offset_; }
  int col_offset() const { return col_offset_; }

  const std::optional<RangeCell>& at(int row, int col) const { return cells_[index(row, col)]; }
  std::optional<RangeCell>& at(int row, int col) { return cells_[index(row, col)]; }

  std::size_t occupancy() const;

  /// Center elevation of a row / center azimuth of a column, in the producing sensor's geometry.
  double row_elevation(int row) const;
  double col_azimuth(int col) const;

  double row_pitch() const { return spec_.vfov_span() / spec_.channels; }
  double col_pitch() const { return kTwoPi / spec_.points_per_channel; }

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  SensorSpec spec_;
  int height_ = 0;
  int width_ = 0;
  int row_stride_ = 1;
  int col_stride_ = 1;
  int row_offset_ = 0;
  int col_offset_ = 0;
  std::vector<std::optional<RangeCell>> cells_;
};

/// Bins points into a range image of `spec`. Points outside the vertical field of view
/// are dropped; on collisions the nearest return wins.
RangeImage build_range_image(const Scene& scene, const SensorSpec& spec);

struct DownsampleRatios {
  double vertical = 1.0;
  double horizontal = 1.0;
};

/// Unrounded source-to-target ratios.
DownsampleRatios downsample_ratios(const SensorSpec& src, const SensorSpec& tgt);

struct DownsampleFactors {
  int vertical = 1;
  int horizontal = 1;
  /// A raw ratio was below 1: the target is denser than the source and cannot be matched
  /// by striding. The factor was floored at 1.
  bool upsample_required = false;

  friend bool operator==(const DownsampleFactors&, const DownsampleFactors&) = default;
};

DownsampleFactors downsample_factors(const SensorSpec& src, const SensorSpec& tgt);

/// Keeps rows r with r % v == row_offset and columns c with c % h == col_offset.
/// Retained cells are copied unchanged.
RangeImage downsample_range_image(const RangeImage& img, int v, int h, int row_offset = 0,
                                  int col_offset = 0);

/// One point per occupied cell at the cell-center angles, carrying the stored range and intensity.
Scene backproject(const RangeImage& img);

struct StrideOffset {
  int row = 0;
  int col = 0;
};

/// Resamples a source scene into the target sensor's beam layout. Labels are copied
/// verbatim. Offsets are reduced modulo the factors.
Scene lidar_distribution_match(const Scene& scene, const SensorSpec& src, const SensorSpec& tgt,
                               StrideOffset offset = {});

}  // namespace lidaraug
