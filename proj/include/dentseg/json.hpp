#pragma once

#include <filesystem>

#include <json.hpp>

#include "dentseg/evaluation.hpp"
#include "dentseg/phantom.hpp"
#include "dentseg/rotation.hpp"
#include "dentseg/segmentation.hpp"

namespace dentseg {

void to_json(nlohmann::json& j, const IntensityLevels& v);
void from_json(const nlohmann::json& j, IntensityLevels& v);
void to_json(nlohmann::json& j, const PhantomSpec& v);
void from_json(const nlohmann::json& j, PhantomSpec& v);
void to_json(nlohmann::json& j, const ColumnRange& v);
void from_json(const nlohmann::json& j, ColumnRange& v);
void to_json(nlohmann::json& j, const CanalLine& v);
void from_json(const nlohmann::json& j, CanalLine& v);
void to_json(nlohmann::json& j, const PhantomTruth& v);
void from_json(const nlohmann::json& j, PhantomTruth& v);

void to_json(nlohmann::json& j, const RotationEstimate& v);
void to_json(nlohmann::json& j, const RotationSummary& v);
void to_json(nlohmann::json& j, const Segment& v);
void to_json(nlohmann::json& j, const SegmentationResult& v);
void to_json(nlohmann::json& j, const EvalReport& v);

/// {"entries": [{"image_path", "truth_path", "spec"}]}; paths relative to the
/// manifest's directory.
void save_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);

PhantomTruth load_truth(const std::filesystem::path& path);

}  // namespace dentseg
