#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "lidaraug/config.hpp"
#include "lidaraug/errors.hpp"
#include "lidaraug/gradcheck.hpp"
#include "lidaraug/io.hpp"
#include "lidaraug/pipeline.hpp"
#include "lidaraug/synth.hpp"

namespace fs = std::filesystem;

namespace lidaraug::cli {

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool out_required) {
  cmd->add_option("--config", c.config, "Configuration file (key = value)");
  cmd->add_option("--seed", c.seed, "Random seed; overrides the configuration");
  auto* out = cmd->add_option("--out", c.out, "Output path");
  if (out_required) out->required();
}

PipelineConfig load_config(const Common& c, const fs::path& fallback = {}) {
  PipelineConfig cfg;
  if (!c.config.empty()) {
    cfg = read_config(c.config);
  } else if (!fallback.empty() && fs::exists(fallback)) {
    cfg = read_config(fallback);
  }
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

fs::path with_ext(const fs::path& p, const char* ext) {
  fs::path out = p;
  out.replace_extension(ext);
  return out;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError(p.parent_path().string() + ": " + ec.message());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError(path.string() + ": cannot open for writing");
  f << text;
  if (!f) throw IoError(path.string() + ": write failed");
}

}  // namespace

int dispatch(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"LiDAR domain-augmentation toolkit", "lidaraug"};
  app.require_subcommand(1);

  Common synth_opts;
  int n_source = 20;
  int n_labeled = 4;
  int n_unlabeled = 16;
  auto* synth = app.add_subcommand("synth", "Write a synthetic manifest directory");
  add_common(synth, synth_opts, true);
  synth->add_option("--n-source", n_source, "Source scenes")->check(CLI::NonNegativeNumber);
  synth->add_option("--n-labeled", n_labeled, "Labeled target scenes")->check(CLI::NonNegativeNumber);
  synth->add_option("--n-unlabeled", n_unlabeled, "Unlabeled target scenes")->check(CLI::NonNegativeNumber);

  Common match_opts;
  std::string match_in;
  auto* match = app.add_subcommand("match", "Resample a source cloud to the target sensor layout");
  add_common(match, match_opts, true);
  match->add_option("--in", match_in, "Input cloud (.bin); a sibling .txt is carried along")->required();

  Common mix_opts;
  std::string mix_source;
  std::string mix_target;
  bool no_match = false;
  auto* mix = app.add_subcommand("mix", "Polar-mix a source scene with a labeled target scene");
  add_common(mix, mix_opts, true);
  mix->add_option("--source", mix_source, "Source cloud (.bin)")->required();
  mix->add_option("--target", mix_target, "Labeled target cloud (.bin) with sibling .txt")->required();
  mix->add_flag("--no-match", no_match, "Skip distribution matching of the source scene");

  Common adv_opts;
  std::string adv_in;
  std::string adv_labels;
  auto* adv = app.add_subcommand("adv", "Adversarially perturb a pseudo-labeled target scene");
  add_common(adv, adv_opts, true);
  adv->add_option("--in", adv_in, "Unlabeled target cloud (.bin)")->required();
  adv->add_option("--labels", adv_labels, "Pseudo-label file (default: sibling .txt)");

  Common pipe_opts;
  std::string manifest;
  auto* pipeline = app.add_subcommand("pipeline", "Run both stages over a manifest directory");
  add_common(pipeline, pipe_opts, true);
  pipeline->add_option("--manifest", manifest, "Manifest directory")->required();

  Common grad_opts;
  std::string grad_in;
  std::string grad_labels;
  double step = 1e-5;
  double tolerance = 1e-5;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare the surrogate gradient with finite differences");
  add_common(gradcheck, grad_opts, false);
  gradcheck->add_option("--in", grad_in, "Cloud to check (default: built-in fixture)");
  gradcheck->add_option("--labels", grad_labels, "Boxes for --in (default: sibling .txt)");
  gradcheck->add_option("--step", step, "Central-difference step in meters");
  gradcheck->add_option("--tolerance", tolerance, "Largest acceptable relative error");

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    std::ostringstream help_out;
    std::ostringstream help_err;
    const int code = app.exit(e, help_out, help_err);
    out << help_out.str();
    err << help_err.str();
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (synth->parsed()) {
      const PipelineConfig cfg = load_config(synth_opts);
      SynthCounts counts;
      counts.source = n_source;
      counts.target_labeled = n_labeled;
      counts.target_unlabeled = n_unlabeled;
      const Datasets data = synthesize_dataset(cfg.seed, cfg, counts);
      write_manifest(synth_opts.out, data, cfg);
      out << "wrote " << data.source.size() << " source, " << data.target_labeled.size()
          << " labeled target, " << data.target_unlabeled.size() << " unlabeled target scenes to "
          << synth_opts.out << '\n';
    } else if (match->parsed()) {
      const PipelineConfig cfg = load_config(match_opts);
      const Scene input = read_scene(match_in, DomainTag::Source, false);
      const Scene matched = lidar_distribution_match(input, cfg.source_sensor, cfg.target_sensor);
      ensure_parent(match_opts.out);
      write_scene(matched, match_opts.out, !matched.boxes.empty());
      const DownsampleFactors f = downsample_factors(cfg.source_sensor, cfg.target_sensor);
      out << "points " << input.points.size() << " -> " << matched.points.size() << " (factors "
          << f.vertical << "x" << f.horizontal << ")\n";
    } else if (mix->parsed()) {
      PipelineConfig cfg = load_config(mix_opts);
      Scene source = read_scene(mix_source, DomainTag::Source, false);
      if (!no_match) source = lidar_distribution_match(source, cfg.source_sensor, cfg.target_sensor);
      const Scene target = read_scene(mix_target, DomainTag::TargetLabeled, true);
      Rng rng = derive_rng(cfg.seed, 0);
      const SectorMask mask = sample_sectors(rng, cfg.mask);
      const Scene mixed = polar_mix(source, target, mask);
      ensure_parent(mix_opts.out);
      write_scene(mixed, mix_opts.out, true);
      out << "mixed " << mixed.points.size() << " points, " << mixed.boxes.size() << " boxes; sectors";
      for (const Sector& s : mask.sectors()) {
        out << " [" << rad_to_deg(s.start) << ", " << rad_to_deg(s.start + s.width) << ")";
      }
      out << '\n';
    } else if (adv->parsed()) {
      const PipelineConfig cfg = load_config(adv_opts);
      Scene scene;
      scene.points = read_cloud(adv_in);
      scene.tag = DomainTag::TargetUnlabeled;
      scene.pseudo_labeled = true;
      const fs::path labels = adv_labels.empty() ? with_ext(adv_in, ".txt") : fs::path(adv_labels);
      scene.boxes = read_labels(labels);
      Rng rng = derive_rng(cfg.seed, 0);
      const SurrogateLoss provider(cfg.oracle.knee);
      const AdversarialSample sample =
          adversarial_perturb(scene, scene.boxes, provider, cfg.perturbation, rng);
      ensure_parent(adv_opts.out);
      write_scene(sample.scene, adv_opts.out, true);
      const PerturbStats& s = sample.stats;
      out << "candidates=" << s.candidates << " selected=" << s.selected << " translated=" << s.translated
          << " added=" << s.added << " removed=" << s.removed << " points=" << sample.scene.points.size()
          << '\n';
    } else if (pipeline->parsed()) {
      const fs::path dir = manifest;
      const PipelineConfig cfg = load_config(pipe_opts, dir / "config.txt");
      const Datasets data = read_manifest(dir);
      const auto [first, second] = run_full(cfg, data);
      const fs::path out_dir = pipe_opts.out;
      std::error_code ec;
      fs::create_directories(out_dir, ec);
      if (ec) throw IoError(out_dir.string() + ": " + ec.message());
      const std::string log = report_log_lines(first) + report_log_lines(second);
      write_text(out_dir / "report.log", log);
      write_text(out_dir / "summary.json", reports_to_json(first, second));
      out << log;
    } else if (gradcheck->parsed()) {
      const PipelineConfig cfg = load_config(grad_opts);
      Scene scene;
      if (grad_in.empty()) {
        Rng rng = derive_rng(cfg.seed, 0);
        scene = gradcheck_fixture(rng);
      } else {
        scene.points = read_cloud(grad_in);
        const fs::path labels = grad_labels.empty() ? with_ext(grad_in, ".txt") : fs::path(grad_labels);
        scene.boxes = read_labels(labels);
      }
      const SurrogateLoss provider(cfg.oracle.knee);
      const GradCheckResult r = finite_difference_check(provider, scene, scene.boxes, step);
      out << "points=" << r.points_checked << " max_relative_error=" << r.max_relative_error << '\n';
      if (!(r.max_relative_error < tolerance)) {
        err << "gradient check failed: " << r.max_relative_error << " >= " << tolerance << '\n';
        return kValidationError;
      }
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }
  return kOk;
}

}  // namespace lidaraug::cli
