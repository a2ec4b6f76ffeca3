#pragma once

#include <filesystem>
#include <vector>

#include "lidaraug/geometry.hpp"
#include "lidaraug/pipeline.hpp"

namespace lidaraug {

/// Headerless little-endian float32 quadruples (x, y, z, intensity).
/// Throws TruncatedFile, NonFiniteValue, or IoError.
std::vector<Point> read_cloud(const std::filesystem::path& path);
void write_cloud(std::span<const Point> points, const std::filesystem::path& path);

/// One box per line: `cx cy cz w l h yaw class_id [score]`, '#' starts a comment.
/// Yaw is normalized on read. Throws MalformedRecord carrying the 1-based line number.
std::vector<Box3D> read_labels(const std::filesystem::path& path);
void write_labels(std::span<const Box3D> boxes, const std::filesystem::path& path);

/// Cloud plus optional sibling label file (same stem, `.txt`).
Scene read_scene(const std::filesystem::path& cloud_path, DomainTag tag, bool require_labels);
void write_scene(const Scene& scene, const std::filesystem::path& cloud_path, bool with_labels);

/// Directory layout: source/*.bin (+ optional .txt), target_labeled/*.bin + .txt,
/// target_unlabeled/*.bin, config.txt. Files are read in lexicographic order.
Datasets read_manifest(const std::filesystem::path& dir);
void write_manifest(const std::filesystem::path& dir, const Datasets& data,
                    const PipelineConfig& cfg);

}  // namespace lidaraug
