#include "lidaraug/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "lidaraug/config.hpp"
#include "lidaraug/errors.hpp"

namespace fs = std::filesystem;

namespace lidaraug {

namespace {

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  return {std::istream_iterator<std::string>(in), std::istream_iterator<std::string>()};
}

bool parse_double(const std::string& token, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(token, &used);
    return used == token.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

std::string format_g9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<fs::path> clouds_in(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bin") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Point> read_cloud(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError(path.string() + ": read failed");
  if (bytes.size() % 16 != 0) throw TruncatedFile(path.string(), bytes.size());

  std::vector<Point> points(bytes.size() / 16);
  for (std::size_t i = 0; i < points.size(); ++i) {
    float v[4];
    for (int k = 0; k < 4; ++k) {
      std::uint32_t raw;
      std::memcpy(&raw, bytes.data() + i * 16 + static_cast<std::size_t>(k) * 4, 4);
      v[k] = std::bit_cast<float>(to_little(raw));
      if (!std::isfinite(v[k])) {
        throw NonFiniteValue(path.string() + ": non-finite value in point " + std::to_string(i));
      }
    }
    points[i] = Point{v[0], v[1], v[2], v[3]};
  }
  return points;
}

void write_cloud(std::span<const Point> points, const fs::path& path) {
  std::string bytes(points.size() * 16, '\0');
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    const float v[4] = {static_cast<float>(p.x), static_cast<float>(p.y), static_cast<float>(p.z),
                        static_cast<float>(p.intensity)};
    for (int k = 0; k < 4; ++k) {
      const std::uint32_t raw = to_little(std::bit_cast<std::uint32_t>(v[k]));
      std::memcpy(bytes.data() + i * 16 + static_cast<std::size_t>(k) * 4, &raw, 4);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path.string() + ": write failed");
}

std::vector<Box3D> read_labels(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::vector<Box3D> boxes;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (fields.size() != 8 && fields.size() != 9) {
      throw MalformedRecord(path.string(), number,
                            "expected 8 or 9 fields, got " + std::to_string(fields.size()));
    }
    double v[9] = {};
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (!parse_double(fields[k], v[k])) {
        throw MalformedRecord(path.string(), number, "field " + std::to_string(k + 1) + " is not a finite number");
      }
    }
    if (v[7] != std::floor(v[7])) throw MalformedRecord(path.string(), number, "class_id must be an integer");
    Box3D box{v[0], v[1], v[2], v[3], v[4], v[5], normalize_yaw(v[6]), static_cast<int>(v[7]), std::nullopt};
    if (fields.size() == 9) box.score = v[8];
    try {
      validate_box(box);
    } catch (const ValidationError& e) {
      throw MalformedRecord(path.string(), number, e.what());
    }
    boxes.push_back(box);
  }
  return boxes;
}

void write_labels(std::span<const Box3D> boxes, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  for (const Box3D& b : boxes) {
    out << format_g9(b.cx) << ' ' << format_g9(b.cy) << ' ' << format_g9(b.cz) << ' '
        << format_g9(b.w) << ' ' << format_g9(b.l) << ' ' << format_g9(b.h) << ' '
        << format_g9(b.yaw) << ' ' << b.class_id;
    if (b.score) out << ' ' << format_g9(*b.score);
    out << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

Scene read_scene(const fs::path& cloud_path, DomainTag tag, bool require_labels) {
  Scene scene;
  scene.points = read_cloud(cloud_path);
  scene.tag = tag;
  fs::path labels = cloud_path;
  labels.replace_extension(".txt");
  if (fs::exists(labels)) {
    scene.boxes = read_labels(labels);
  } else if (require_labels) {
    throw IoError(labels.string() + ": missing label file");
  }
  return scene;
}

void write_scene(const Scene& scene, const fs::path& cloud_path, bool with_labels) {
  write_cloud(scene.points, cloud_path);
  if (with_labels) {
    fs::path labels = cloud_path;
    labels.replace_extension(".txt");
    write_labels(scene.boxes, labels);
  }
}

Datasets read_manifest(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + ": not a directory");
  Datasets data;
  for (const auto& p : clouds_in(dir / "source")) {
    data.source.push_back(read_scene(p, DomainTag::Source, false));
  }
  for (const auto& p : clouds_in(dir / "target_labeled")) {
    data.target_labeled.push_back(read_scene(p, DomainTag::TargetLabeled, true));
  }
  for (const auto& p : clouds_in(dir / "target_unlabeled")) {
    Scene s;
    s.points = read_cloud(p);
    s.tag = DomainTag::TargetUnlabeled;
    data.target_unlabeled.push_back(std::move(s));
  }
  return data;
}

void write_manifest(const fs::path& dir, const Datasets& data, const PipelineConfig& cfg) {
  std::error_code ec;
  for (const char* sub : {"source", "target_labeled", "target_unlabeled"}) {
    fs::create_directories(dir / sub, ec);
    if (ec) throw IoError((dir / sub).string() + ": " + ec.message());
  }
  auto name = [](std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06zu.bin", i);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < data.source.size(); ++i) {
    write_scene(data.source[i], dir / "source" / name(i), true);
  }
  for (std::size_t i = 0; i < data.target_labeled.size(); ++i) {
    write_scene(data.target_labeled[i], dir / "target_labeled" / name(i), true);
  }
  for (std::size_t i = 0; i < data.target_unlabeled.size(); ++i) {
    write_scene(data.target_unlabeled[i], dir / "target_unlabeled" / name(i), false);
  }
  write_config(cfg, dir / "config.txt");
}

}  // namespace lidaraug
