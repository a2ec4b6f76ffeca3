#include "lidaraug/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "lidaraug/errors.hpp"

namespace lidaraug {

namespace {

enum class Kind { Real, Degrees, Int, Uint64, Bool };

struct Field {
  const char* key;
  Kind kind;
  std::function<double&(PipelineConfig&)> real;
  std::function<int&(PipelineConfig&)> integer;
  std::function<std::uint64_t&(PipelineConfig&)> u64;
  std::function<bool&(PipelineConfig&)> flag;
};

Field real(const char* key, std::function<double&(PipelineConfig&)> f) {
  return {key, Kind::Real, std::move(f), {}, {}, {}};
}
Field degrees(const char* key, std::function<double&(PipelineConfig&)> f) {
  return {key, Kind::Degrees, std::move(f), {}, {}, {}};
}
Field integer(const char* key, std::function<int&(PipelineConfig&)> f) {
  return {key, Kind::Int, {}, std::move(f), {}, {}};
}
Field flag(const char* key, std::function<bool&(PipelineConfig&)> f) {
  return {key, Kind::Bool, {}, {}, {}, std::move(f)};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      integer("source_channels", [](PipelineConfig& c) -> int& { return c.source_sensor.channels; }),
      integer("source_points_per_channel",
              [](PipelineConfig& c) -> int& { return c.source_sensor.points_per_channel; }),
      degrees("source_vfov_min_deg", [](PipelineConfig& c) -> double& { return c.source_sensor.vfov_min; }),
      degrees("source_vfov_max_deg", [](PipelineConfig& c) -> double& { return c.source_sensor.vfov_max; }),
      integer("target_channels", [](PipelineConfig& c) -> int& { return c.target_sensor.channels; }),
      integer("target_points_per_channel",
              [](PipelineConfig& c) -> int& { return c.target_sensor.points_per_channel; }),
      degrees("target_vfov_min_deg", [](PipelineConfig& c) -> double& { return c.target_sensor.vfov_min; }),
      degrees("target_vfov_max_deg", [](PipelineConfig& c) -> double& { return c.target_sensor.vfov_max; }),
      real("p_tm", [](PipelineConfig& c) -> double& { return c.p_tm; }),
      real("p_am", [](PipelineConfig& c) -> double& { return c.p_am; }),
      real("lambda", [](PipelineConfig& c) -> double& { return c.lambda; }),
      real("epsilon", [](PipelineConfig& c) -> double& { return c.perturbation.epsilon; }),
      real("rho", [](PipelineConfig& c) -> double& { return c.perturbation.rho; }),
      real("mode_weight_translate", [](PipelineConfig& c) -> double& { return c.perturbation.mode_weights[0]; }),
      real("mode_weight_add", [](PipelineConfig& c) -> double& { return c.perturbation.mode_weights[1]; }),
      real("mode_weight_remove", [](PipelineConfig& c) -> double& { return c.perturbation.mode_weights[2]; }),
      integer("k_sectors", [](PipelineConfig& c) -> int& { return c.mask.k; }),
      degrees("sector_min_width_deg", [](PipelineConfig& c) -> double& { return c.mask.min_width; }),
      degrees("sector_max_width_deg", [](PipelineConfig& c) -> double& { return c.mask.max_width; }),
      integer("epochs_tm", [](PipelineConfig& c) -> int& { return c.epochs_tm; }),
      integer("epochs_am", [](PipelineConfig& c) -> int& { return c.epochs_am; }),
      {"seed", Kind::Uint64, {}, {}, [](PipelineConfig& c) -> std::uint64_t& { return c.seed; }, {}},
      real("pseudo_score_threshold", [](PipelineConfig& c) -> double& { return c.pseudo_score_threshold; }),
      real("smooth_l1_knee", [](PipelineConfig& c) -> double& { return c.oracle.knee; }),
      flag("random_stride_offset", [](PipelineConfig& c) -> bool& { return c.random_stride_offset; }),
      flag("rigid_augment", [](PipelineConfig& c) -> bool& { return c.rigid.enabled; }),
      real("rigid_flip_probability", [](PipelineConfig& c) -> double& { return c.rigid.flip_probability; }),
      degrees("rigid_max_rotation_deg", [](PipelineConfig& c) -> double& { return c.rigid.max_rotation; }),
      real("rigid_scale_min", [](PipelineConfig& c) -> double& { return c.rigid.scale_min; }),
      real("rigid_scale_max", [](PipelineConfig& c) -> double& { return c.rigid.scale_max; }),
      real("oracle_cell_size", [](PipelineConfig& c) -> double& { return c.oracle.cell_size; }),
      integer("oracle_min_points", [](PipelineConfig& c) -> int& { return c.oracle.min_points; }),
      real("oracle_ground_z", [](PipelineConfig& c) -> double& { return c.oracle.ground_z; }),
      real("oracle_score_saturation", [](PipelineConfig& c) -> double& { return c.oracle.score_saturation; }),
      real("oracle_box_padding", [](PipelineConfig& c) -> double& { return c.oracle.box_padding; }),
  };
  return table;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const Field& f : fields()) out.emplace_back(f.key);
    return out;
  }();
  return keys;
}

PipelineConfig parse_config(std::string_view text, const std::string& origin) {
  PipelineConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto where = origin + ":" + std::to_string(number) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    const Field* field = nullptr;
    for (const Field& f : fields()) {
      if (key == f.key) field = &f;
    }
    if (field == nullptr) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");

    bool ok = false;
    switch (field->kind) {
      case Kind::Real:
      case Kind::Degrees: {
        double v = 0.0;
        ok = parse_number(value, v) && std::isfinite(v);
        if (ok) field->real(cfg) = field->kind == Kind::Degrees ? deg_to_rad(v) : v;
        break;
      }
      case Kind::Int:
        ok = parse_number(value, field->integer(cfg));
        break;
      case Kind::Uint64:
        ok = parse_number(value, field->u64(cfg));
        break;
      case Kind::Bool:
        if (value == "1" || value == "true") {
          field->flag(cfg) = true;
          ok = true;
        } else if (value == "0" || value == "false") {
          field->flag(cfg) = false;
          ok = true;
        }
        break;
    }
    if (!ok) throw ConfigError(where + "invalid value '" + value + "' for '" + key + "'");
  }
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

PipelineConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string config_to_text(const PipelineConfig& cfg) {
  PipelineConfig copy = cfg;
  std::string out;
  for (const Field& f : fields()) {
    out += f.key;
    out += " = ";
    switch (f.kind) {
      case Kind::Real:
        out += format_double(f.real(copy));
        break;
      case Kind::Degrees:
        out += format_double(rad_to_deg(f.real(copy)));
        break;
      case Kind::Int:
        out += std::to_string(f.integer(copy));
        break;
      case Kind::Uint64:
        out += std::to_string(f.u64(copy));
        break;
      case Kind::Bool:
        out += f.flag(copy) ? "1" : "0";
        break;
    }
    out += '\n';
  }
  return out;
}

void write_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << config_to_text(cfg);
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace lidaraug
