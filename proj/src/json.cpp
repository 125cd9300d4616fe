#include "dentseg/json.hpp"

#include <fstream>
#include <stdexcept>

namespace dentseg {

using nlohmann::json;

void to_json(json& j, const IntensityLevels& v) {
  j = {{"air", v.air}, {"gum", v.gum}, {"dentin", v.dentin}, {"canal", v.canal}};
}

void from_json(const json& j, IntensityLevels& v) {
  v.air = j.value("air", v.air);
  v.gum = j.value("gum", v.gum);
  v.dentin = j.value("dentin", v.dentin);
  v.canal = j.value("canal", v.canal);
}

void to_json(json& j, const PhantomSpec& v) {
  j = {{"width", v.width},
       {"height", v.height},
       {"tooth_count", v.tooth_count},
       {"gap_width", v.gap_width},
       {"tilt_degrees", v.tilt_degrees},
       {"canal_teeth", v.canal_teeth},
       {"levels", v.levels},
       {"noise_sigma", v.noise_sigma},
       {"seed", v.seed}};
}

// Missing keys keep the spec defaults so hand-written spec files stay short.
void from_json(const json& j, PhantomSpec& v) {
  PhantomSpec d;
  v.width = j.value("width", d.width);
  v.height = j.value("height", d.height);
  v.tooth_count = j.value("tooth_count", d.tooth_count);
  v.gap_width = j.value("gap_width", d.gap_width);
  v.tilt_degrees = j.value("tilt_degrees", d.tilt_degrees);
  v.canal_teeth = j.value("canal_teeth", d.canal_teeth);
  v.levels = j.value("levels", d.levels);
  v.noise_sigma = j.value("noise_sigma", d.noise_sigma);
  v.seed = j.value("seed", d.seed);
}

void to_json(json& j, const ColumnRange& v) { j = {{"left", v.left}, {"right", v.right}}; }

void from_json(const json& j, ColumnRange& v) {
  j.at("left").get_to(v.left);
  j.at("right").get_to(v.right);
}

void to_json(json& j, const CanalLine& v) {
  j = {{"tooth", v.tooth},   {"x_untilted", v.x_untilted}, {"top", v.top},
       {"bottom", v.bottom}, {"slope", v.slope},           {"col_at_center_row", v.col_at_center_row}};
}

void from_json(const json& j, CanalLine& v) {
  j.at("tooth").get_to(v.tooth);
  j.at("x_untilted").get_to(v.x_untilted);
  j.at("top").get_to(v.top);
  j.at("bottom").get_to(v.bottom);
  j.at("slope").get_to(v.slope);
  j.at("col_at_center_row").get_to(v.col_at_center_row);
}

void to_json(json& j, const PhantomTruth& v) {
  j = {{"width", v.width},         {"height", v.height},           {"tilt_degrees", v.tilt_degrees},
       {"tooth_top", v.tooth_top}, {"tooth_bottom", v.tooth_bottom}, {"teeth", v.teeth},
       {"gaps", v.gaps},           {"gap_centers", v.gap_centers},   {"canals", v.canals}};
}

void from_json(const json& j, PhantomTruth& v) {
  j.at("width").get_to(v.width);
  j.at("height").get_to(v.height);
  j.at("tilt_degrees").get_to(v.tilt_degrees);
  j.at("tooth_top").get_to(v.tooth_top);
  j.at("tooth_bottom").get_to(v.tooth_bottom);
  j.at("teeth").get_to(v.teeth);
  j.at("gaps").get_to(v.gaps);
  j.at("gap_centers").get_to(v.gap_centers);
  j.at("canals").get_to(v.canals);
}

void to_json(json& j, const RotationEstimate& v) {
  j = {{"mean_degrees", v.mean_degrees}, {"per_set_degrees", v.degrees}, {"sets_used", v.sets_used}, {"iterations", 1}};
}

void to_json(json& j, const RotationSummary& v) {
  j = {{"mean_degrees", v.mean_degrees},
       {"per_set_degrees", v.per_set_degrees},
       {"sets_used", v.sets_used},
       {"iterations", v.iterations}};
}

void to_json(json& j, const Segment& v) { j = {{"x0", v.p0.x}, {"y0", v.p0.y}, {"x1", v.p1.x}, {"y1", v.p1.y}}; }

void to_json(json& j, const SegmentationResult& v) {
  j = {{"rotation", v.rotation},
       {"separators", v.separators},
       {"valley_columns", v.valley_columns},
       {"tooth_count", v.tooth_count},
       {"timing_ms", v.timing_ms}};
}

void to_json(json& j, const EvalReport& v) {
  j = {{"n_max", v.n_max},
       {"F", v.film_totals},
       {"optimality", v.optimality},
       {"sub_optimality", v.sub_optimality},
       {"failure", v.failure}};
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  json entries = json::array();
  for (const auto& e : m.entries) {
    entries.push_back({{"image_path", e.image_path.generic_string()},
                       {"truth_path", e.truth_path.generic_string()},
                       {"spec", e.spec}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << json{{"entries", entries}}.dump(2) << '\n';
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed manifest " + path.string() + ": " + e.what());
  }
  Manifest m{path.parent_path(), {}};
  try {
    for (const auto& e : doc.at("entries")) {
      m.entries.push_back({e.at("image_path").get<std::string>(), e.at("truth_path").get<std::string>(),
                           e.at("spec").get<PhantomSpec>()});
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed manifest " + path.string() + ": " + e.what());
  }
  return m;
}

PhantomTruth load_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open truth file " + path.string());
  try {
    return json::parse(in).get<PhantomTruth>();
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed truth file " + path.string() + ": " + e.what());
  }
}

}  // namespace dentseg
