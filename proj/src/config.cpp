#include "dentseg/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dentseg {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v) {
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || std::isnan(out)) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
  return out;
}

long parse_long(const std::string& v) {
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

std::size_t parse_size(const std::string& v) {
  const long n = parse_long(v);
  if (n < 0) throw ConfigError("expected a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(n);
}

int parse_int(const std::string& v) {
  const long n = parse_long(v);
  if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
    throw ConfigError("integer out of range: '" + v + "'");
  }
  return static_cast<int>(n);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError("expected true/false, got '" + v + "'");
}

std::string fmt(double v) {
  if (std::isinf(v)) return "inf";
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

std::string fmt(bool v) { return v ? "true" : "false"; }

template <class T>
std::string fmt_opt(const std::optional<T>& v) {
  if (!v) return "auto";
  if constexpr (std::is_floating_point_v<T>) {
    return fmt(*v);
  } else {
    return std::to_string(*v);
  }
}

template <class T, class Parse>
std::optional<T> parse_opt(const std::string& v, Parse parse) {
  if (v == "auto") return std::nullopt;
  return parse(v);
}

using Cfg = SegmentationConfig;

#define DOUBLE_KEY(NAME, HELP, FIELD)                                           \
  ConfigKey {                                                                   \
    NAME, HELP, [](Cfg& c, const std::string& v) { c.FIELD = parse_double(v); }, \
        [](const Cfg& c) { return fmt(c.FIELD); }                               \
  }
#define INT_KEY(NAME, HELP, FIELD)                                           \
  ConfigKey {                                                                \
    NAME, HELP, [](Cfg& c, const std::string& v) { c.FIELD = parse_int(v); }, \
        [](const Cfg& c) { return std::to_string(c.FIELD); }                 \
  }
#define SIZE_KEY(NAME, HELP, FIELD)                                           \
  ConfigKey {                                                                 \
    NAME, HELP, [](Cfg& c, const std::string& v) { c.FIELD = parse_size(v); }, \
        [](const Cfg& c) { return std::to_string(c.FIELD); }                  \
  }
#define BOOL_KEY(NAME, HELP, FIELD)                                           \
  ConfigKey {                                                                 \
    NAME, HELP, [](Cfg& c, const std::string& v) { c.FIELD = parse_bool(v); }, \
        [](const Cfg& c) { return fmt(c.FIELD); }                             \
  }
#define OPT_DOUBLE_KEY(NAME, HELP, FIELD)                                                        \
  ConfigKey {                                                                                    \
    NAME, HELP, [](Cfg& c, const std::string& v) { c.FIELD = parse_opt<double>(v, parse_double); }, \
        [](const Cfg& c) { return fmt_opt(c.FIELD); }                                            \
  }
#define OPT_SIZE_KEY(NAME, HELP, FIELD)                                                               \
  ConfigKey {                                                                                         \
    NAME, HELP, [](Cfg& c, const std::string& v) { c.FIELD = parse_opt<std::size_t>(v, parse_size); }, \
        [](const Cfg& c) { return fmt_opt(c.FIELD); }                                                 \
  }

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      BOOL_KEY("butterworth.enabled", "run the Butterworth low-pass stage", preprocess.stages.butterworth),
      INT_KEY("butterworth.order", "Butterworth order n", preprocess.butterworth.order),
      OPT_DOUBLE_KEY("butterworth.cutoff", "cutoff radius d0 in frequency bins (auto: 0.3*min(w,h)/2)",
                     preprocess.butterworth.cutoff),
      DOUBLE_KEY("butterworth.dc_gain", "pass-band gain g0", preprocess.butterworth.dc_gain),
      BOOL_KEY("homomorphic.enabled", "run the homomorphic stage", preprocess.stages.homomorphic),
      DOUBLE_KEY("homomorphic.gamma_low", "low-frequency gain", preprocess.homomorphic.gamma_low),
      DOUBLE_KEY("homomorphic.gamma_high", "high-frequency gain", preprocess.homomorphic.gamma_high),
      OPT_DOUBLE_KEY("homomorphic.cutoff", "cutoff radius d0 (auto: 0.3*min(w,h)/2)", preprocess.homomorphic.cutoff),
      INT_KEY("homomorphic.order", "order of the high-pass transition", preprocess.homomorphic.order),
      BOOL_KEY("mean.enabled", "run the mean filter", preprocess.stages.mean),
      INT_KEY("mean.size", "mean filter size (odd)", preprocess.smoothing.mean_size),
      BOOL_KEY("wiener.enabled", "run the adaptive Wiener filter", preprocess.stages.wiener),
      INT_KEY("wiener.rows", "Wiener window rows", preprocess.smoothing.wiener_rows),
      INT_KEY("wiener.cols", "Wiener window columns", preprocess.smoothing.wiener_cols),
      BOOL_KEY("gaussian.enabled", "run the Gaussian filter", preprocess.stages.gaussian),
      DOUBLE_KEY("gaussian.sigma", "Gaussian sigma", preprocess.smoothing.gaussian_sigma),
      INT_KEY("gaussian.size", "Gaussian kernel size (odd)", preprocess.smoothing.gaussian_size),
      DOUBLE_KEY("trace.prominence_fraction", "row maximum prominence relative to the row range",
                 trace.prominence_fraction),
      DOUBLE_KEY("trace.gating_distance", "max column jump between traced maxima (inf allowed)",
                 trace.gating_distance),
      DOUBLE_KEY("trace.min_trace_fraction", "minimum trace length relative to the band height",
                 trace.min_trace_fraction),
      OPT_SIZE_KEY("projection.min_separation", "minimum valley separation (auto: round(w/6))",
                   valleys.min_separation),
      OPT_SIZE_KEY("projection.edge_margin", "ignored border columns (auto: round(w/20))", valleys.edge_margin),
      OPT_SIZE_KEY("projection.window", "profile smoothing window, odd (auto: round(w/50) made odd)",
                   valleys.profile_window),
      ConfigKey{"rotation.mode", "line-rotate or image-rotate",
                [](Cfg& c, const std::string& v) {
                  try {
                    c.mode = parse_mode(v);
                  } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                  }
                },
                [](const Cfg& c) { return to_string(c.mode); }},
      DOUBLE_KEY("rotation.tol", "stop iterating below this angle (degrees)", tol),
      SIZE_KEY("rotation.max_iter", "maximum rotation estimates", max_iter),
  };
  return keys;
}

#undef DOUBLE_KEY
#undef INT_KEY
#undef SIZE_KEY
#undef BOOL_KEY
#undef OPT_DOUBLE_KEY
#undef OPT_SIZE_KEY

void set_config_value(SegmentationConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      try {
        k.set(cfg, trim(value));
      } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
      }
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_text(SegmentationConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(no) + ": expected key = value");
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(no) + ": " + e.what());
    }
  }
}

void apply_config_file(SegmentationConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    apply_config_text(cfg, buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_to_text(const SegmentationConfig& cfg) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

}  // namespace dentseg
