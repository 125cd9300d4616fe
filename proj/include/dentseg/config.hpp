#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dentseg/segmentation.hpp"

namespace dentseg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One settable field of SegmentationConfig, e.g. "wiener.rows".
struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(SegmentationConfig&, const std::string&)> set;
  std::function<std::string(const SegmentationConfig&)> get;
};

const std::vector<ConfigKey>& config_keys();

void set_config_value(SegmentationConfig& cfg, const std::string& key, const std::string& value);

/// "key = value" lines; '#' starts a comment. Unknown keys are errors.
void apply_config_text(SegmentationConfig& cfg, const std::string& text);
void apply_config_file(SegmentationConfig& cfg, const std::filesystem::path& path);

/// Every key with its current value, in config-file syntax.
std::string config_to_text(const SegmentationConfig& cfg);

}  // namespace dentseg
