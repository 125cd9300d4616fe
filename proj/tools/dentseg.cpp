#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "dentseg/bench.hpp"
#include "dentseg/config.hpp"
#include "dentseg/evaluation.hpp"
#include "dentseg/io.hpp"
#include "dentseg/json.hpp"
#include "dentseg/phantom.hpp"
#include "dentseg/projection.hpp"
#include "dentseg/rotation.hpp"
#include "dentseg/segmentation.hpp"

namespace fs = std::filesystem;
using namespace dentseg;
using nlohmann::json;

namespace {

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what) : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void ensure_new(const fs::path& path, bool force) {
  if (!force && fs::exists(path)) {
    throw StageError("write", path.string() + " exists (use --force to overwrite)");
  }
}

// Config file first, then individual flags on top of it.
struct ConfigFlags {
  std::string file;
  std::vector<std::pair<std::string, std::string>> values;

  void attach(CLI::App* app) {
    app->add_option("--config", file, "key = value config file")->check(CLI::ExistingFile);
    auto* group = app->add_option_group("Pipeline settings", "override the config file and defaults");
    for (const auto& key : config_keys()) {
      const std::string name = key.name;
      group->add_option_function<std::string>(
          "--" + name, [this, name](const std::string& v) { values.emplace_back(name, v); }, key.help);
    }
  }

  SegmentationConfig build() const {
    SegmentationConfig cfg;
    try {
      if (!file.empty()) apply_config_file(cfg, file);
      for (const auto& [k, v] : values) set_config_value(cfg, k, v);
      cfg.validate();
    } catch (const std::exception& e) {
      throw UsageError(std::string("invalid configuration: ") + e.what());
    }
    return cfg;
  }
};

GrayImage load_input(const std::string& path) {
  return stage("load", [&] { return load_image(path); });
}

void write_text(const fs::path& path, const std::string& text, bool force) {
  ensure_new(path, force);
  std::ofstream out(path);
  if (!out) throw StageError("write", "cannot write " + path.string());
  out << text;
}

int cmd_preprocess(const std::string& in, const std::string& out, bool dump, bool force, const ConfigFlags& flags) {
  const SegmentationConfig cfg = flags.build();
  const GrayImage img = load_input(in);
  const fs::path out_path(out);
  ensure_new(out_path, force);
  StageObserver observer;
  if (dump) {
    observer = [&](const std::string& name, const GrayImage& stage_img) {
      fs::path p = out_path;
      p.replace_filename(out_path.stem().string() + "_" + name + out_path.extension().string());
      stage("write", [&] {
        ensure_new(p, force);
        save_image(stage_img, p);
        return 0;
      });
    };
  }
  const GrayImage result = stage("preprocess", [&] { return preprocess_pipeline(img, cfg.preprocess, observer); });
  stage("write", [&] {
    save_image(result, out_path);
    return 0;
  });
  return 0;
}

int cmd_project(const std::string& in, bool raw, const ConfigFlags& flags) {
  const SegmentationConfig cfg = flags.build();
  GrayImage img = load_input(in);
  if (!raw) img = stage("preprocess", [&] { return preprocess_pipeline(img, cfg.preprocess); });
  const ValleySet valleys = stage("projection", [&] { return cfg.valleys.detect(img); });
  std::cout << "# valleys";
  for (std::size_t v : valleys.positions) std::cout << ' ' << v;
  std::cout << "\n# min_separation " << valleys.min_separation << '\n';
  std::cout << profile_to_text(valleys.profile);
  return 0;
}

int cmd_rotation(const std::string& in, bool raw, const ConfigFlags& flags) {
  const SegmentationConfig cfg = flags.build();
  GrayImage img = load_input(in);
  if (!raw) img = stage("preprocess", [&] { return preprocess_pipeline(img, cfg.preprocess); });
  const RotationEstimate est = stage("rotation", [&] { return estimate_rotation(img, cfg.trace); });
  std::cout << json(est).dump(2) << '\n';
  return 0;
}

int cmd_segment(const std::string& in, const std::string& overlay, const std::string& output, bool timing,
                bool force, const ConfigFlags& flags) {
  const SegmentationConfig cfg = flags.build();
  const GrayImage img = load_input(in);
  if (!overlay.empty()) ensure_new(overlay, force);
  SegmentationResult res = stage("segment", [&] { return segment(img, cfg); });
  if (!timing) res.timing_ms.clear();
  const std::string text = json(res).dump(2) + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    write_text(output, text, force);
  }
  if (!overlay.empty()) {
    stage("overlay", [&] {
      save_rgb_png(render_overlay(img, res), overlay);
      return 0;
    });
  }
  return 0;
}

int cmd_evaluate(const std::string& csv, bool as_json) {
  const EvalCsv parsed = stage("evaluate", [&] { return load_eval_csv(csv); });
  const EvalReport report = stage("evaluate", [&] { return make_report(parsed.matrix, parsed.declared_totals); });
  if (as_json) {
    std::cout << json(report).dump(2) << '\n';
  } else {
    std::cout << format_report_table(report);
  }
  return 0;
}

std::vector<PhantomSpec> read_specs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file " + path);
  const json doc = json::parse(in);
  const json& list = doc.is_object() && doc.contains("specs") ? doc.at("specs") : doc;
  std::vector<PhantomSpec> specs;
  if (list.is_array()) {
    for (const auto& s : list) specs.push_back(s.get<PhantomSpec>());
  } else {
    specs.push_back(list.get<PhantomSpec>());
  }
  return specs;
}

int cmd_synth(const std::string& spec_file, bool default_batch, const std::string& out_dir, bool masks,
              std::optional<double> noise, bool force) {
  std::vector<PhantomSpec> specs =
      stage("synth", [&] { return default_batch ? default_batch_specs() : read_specs(spec_file); });
  if (noise) {
    for (auto& s : specs) s.noise_sigma = *noise;
  }
  const Manifest m = stage("synth", [&] { return write_batch(specs, out_dir, {masks, force}); });
  std::cout << "wrote " << m.entries.size() << " phantoms to " << (fs::path(out_dir) / "manifest.json").string()
            << '\n';
  return 0;
}

int cmd_bench(const std::string& manifest_path, bool as_json, std::size_t threads, const ConfigFlags& flags) {
  const SegmentationConfig cfg = flags.build();
  const Manifest manifest = stage("load", [&] { return load_manifest(manifest_path); });
  const BenchResult result = stage("bench", [&] { return run_bench(manifest, cfg, threads); });
  if (as_json) {
    json items = json::array();
    for (const auto& it : result.items) {
      items.push_back({{"index", it.index},
                       {"image", manifest.entries[it.index].image_path.generic_string()},
                       {"segmented_ok", it.segmented_ok},
                       {"total_teeth", it.total_teeth},
                       {"detected_teeth", it.detected_teeth},
                       {"applied_degrees", it.applied_degrees}});
    }
    std::cout << json{{"report", result.report}, {"items", items}}.dump(2) << '\n';
  } else {
    std::cout << format_report_table(result.report);
    std::cout << "films " << result.items.size() << '\n' << to_csv(result.matrix);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teeth segmentation for periapical dental radiographs"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  bool force = false;
  std::string in, out, overlay, output, mode;
  bool dump = false, raw = false, timing = false, as_json = false, masks = false, default_batch = false;
  std::string spec_file;
  std::optional<double> noise;
  std::size_t threads = 1;

  ConfigFlags pre_flags, proj_flags, rot_flags, seg_flags, bench_flags;

  auto* pre = app.add_subcommand("preprocess", "Run the filter cascade");
  pre->add_option("input", in, "input PGM/PNG")->required()->check(CLI::ExistingFile);
  pre->add_option("output", out, "output PGM/PNG")->required();
  pre->add_flag("--dump-stages", dump, "also write each stage as <output stem>_<stage>");
  pre->add_flag("--force", force, "overwrite existing files");
  pre_flags.attach(pre);

  auto* proj = app.add_subcommand("project", "Print the column projection profile and its valleys");
  proj->add_option("input", in, "input PGM/PNG")->required()->check(CLI::ExistingFile);
  proj->add_flag("--raw", raw, "skip preprocessing");
  proj_flags.attach(proj);

  auto* rot = app.add_subcommand("rotation", "Estimate the tilt from root-canal traces");
  rot->add_option("input", in, "input PGM/PNG")->required()->check(CLI::ExistingFile);
  rot->add_flag("--raw", raw, "skip preprocessing");
  rot_flags.attach(rot);

  auto* seg = app.add_subcommand("segment", "Full pipeline: separators between teeth");
  seg->add_option("input", in, "input PGM/PNG")->required()->check(CLI::ExistingFile);
  seg->add_option("--mode", mode, "line-rotate or image-rotate")
      ->check(CLI::IsMember({"line-rotate", "image-rotate"}));
  seg->add_option("--overlay", overlay, "write a PNG with the separators drawn");
  seg->add_option("-o,--output", output, "write the JSON here instead of stdout");
  seg->add_flag("--timing", timing, "report per-stage wall time");
  seg->add_flag("--force", force, "overwrite existing files");
  seg_flags.attach(seg);

  auto* eval = app.add_subcommand("evaluate", "Metrics for a p[j][i] count matrix");
  eval->add_option("matrix", in, "CSV matrix")->required()->check(CLI::ExistingFile);
  eval->add_flag("--json", as_json, "JSON instead of a table");

  auto* synth = app.add_subcommand("synth", "Render synthetic phantoms with ground truth");
  auto* spec_opt = synth->add_option("--spec", spec_file, "JSON spec, list of specs, or {\"specs\": [...]}")
                       ->check(CLI::ExistingFile);
  auto* batch_opt = synth->add_flag("--default-batch", default_batch, "the 51-phantom default batch");
  spec_opt->excludes(batch_opt);
  synth->add_option("--out", out, "output directory")->required();
  synth->add_flag("--masks", masks, "also write gap and tooth masks");
  synth->add_option("--noise", noise, "override every spec's noise sigma")->check(CLI::NonNegativeNumber);
  synth->add_flag("--force", force, "overwrite existing files");

  auto* bench = app.add_subcommand("bench", "Segment and score every phantom of a manifest");
  bench->add_option("manifest", in, "manifest.json")->required()->check(CLI::ExistingFile);
  bench->add_option("--mode", mode, "line-rotate or image-rotate")
      ->check(CLI::IsMember({"line-rotate", "image-rotate"}));
  bench->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 256));
  bench->add_flag("--json", as_json, "JSON instead of a table");
  bench_flags.attach(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (!mode.empty()) {
      seg_flags.values.emplace_back("rotation.mode", mode);
      bench_flags.values.emplace_back("rotation.mode", mode);
    }
    if (*pre) return cmd_preprocess(in, out, dump, force, pre_flags);
    if (*proj) return cmd_project(in, raw, proj_flags);
    if (*rot) return cmd_rotation(in, raw, rot_flags);
    if (*seg) return cmd_segment(in, overlay, output, timing, force, seg_flags);
    if (*eval) return cmd_evaluate(in, as_json);
    if (*synth) {
      if (!default_batch && spec_file.empty()) throw UsageError("synth needs --spec <file> or --default-batch");
      return cmd_synth(spec_file, default_batch, out, masks, noise, force);
    }
    if (*bench) return cmd_bench(in, as_json, threads, bench_flags);
  } catch (const UsageError& e) {
    std::cerr << "dentseg: " << e.what() << '\n';
    return 1;
  } catch (const StageError& e) {
    std::cerr << "dentseg: " << e.stage() << " failed: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dentseg: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
