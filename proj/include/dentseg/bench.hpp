#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dentseg/evaluation.hpp"
#include "dentseg/phantom.hpp"
#include "dentseg/segmentation.hpp"

namespace dentseg {

struct BenchItem {
  std::size_t index = 0;
  std::size_t segmented_ok = 0;
  std::size_t total_teeth = 0;
  std::size_t detected_teeth = 0;
  double applied_degrees = 0.0;
};

struct BenchResult {
  std::vector<BenchItem> items;  // manifest order
  EvalMatrix matrix{1};
  EvalReport report;
};

/// Segments every manifest image and scores it against its truth file.
/// Items are computed on `threads` workers but stored by index, so the
/// result does not depend on the thread count.
BenchResult run_bench(const Manifest& manifest, const SegmentationConfig& cfg, std::size_t threads = 1);

}  // namespace dentseg
