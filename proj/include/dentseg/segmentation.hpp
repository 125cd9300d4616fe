#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dentseg/image.hpp"
#include "dentseg/io.hpp"
#include "dentseg/phantom.hpp"
#include "dentseg/preprocess.hpp"
#include "dentseg/rotation.hpp"

namespace dentseg {

struct SegmentationConfig {
  PreprocessConfig preprocess;
  TraceConfig trace;
  ValleyParams valleys;
  Mode mode = Mode::ImageRotate;
  double tol = 0.25;
  std::size_t max_iter = 5;

  void validate() const;
  ModeParams mode_params() const { return {trace, tol, max_iter, valleys}; }
};

struct RotationSummary {
  double mean_degrees = 0.0;  // angle of the separators from vertical
  std::vector<double> per_set_degrees;
  std::size_t sets_used = 0;
  std::size_t iterations = 0;
};

struct SegmentationResult {
  std::size_t width = 0;  // of the segmented image
  std::size_t height = 0;
  RotationSummary rotation;
  std::vector<Segment> separators;  // original-image coordinates, sorted by midpoint x
  std::vector<std::size_t> valley_columns;
  std::size_t tooth_count = 1;
  std::map<std::string, double> timing_ms;
};

/// preprocess -> rotation estimate -> valleys -> separators per cfg.mode.
SegmentationResult segment(const GrayImage& img, const SegmentationConfig& cfg = {});

/// Gray copy of the image with separators drawn 2 px wide in blue.
RgbImage render_overlay(const GrayImage& img, const SegmentationResult& res);

/// Pixels of the line between two rounded endpoints, one per step along the
/// major axis (Bresenham).
std::vector<std::pair<long, long>> rasterize_line(Point a, Point b);

struct ToothScore {
  std::size_t segmented_ok = 0;
  std::size_t total_teeth = 0;
};

/// A gap is hit when some separator, clipped to the rows the teeth span
/// (in the untilted frame), stays inside the gap's column range. A tooth is
/// correct when each of its bounding gaps is hit (film edges always count)
/// and no separator that hits no gap runs through the tooth.
ToothScore count_correct(const SegmentationResult& res, const PhantomTruth& truth);

}  // namespace dentseg
