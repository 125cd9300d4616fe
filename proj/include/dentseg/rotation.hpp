#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dentseg/image.hpp"
#include "dentseg/projection.hpp"

namespace dentseg {

struct TracePoint {
  double row;
  double col;
};

/// One tracked run of row maxima; rows strictly increase.
struct TraceSet {
  std::vector<TracePoint> points;
};

struct TraceConfig {
  double prominence_fraction = 0.10;
  /// Maximum column jump between consecutive points of one set; infinity
  /// assigns every maximum to its nearest set.
  double gating_distance = 3.0;
  double min_trace_fraction = 0.5;

  void validate() const;
};

struct RotationEstimate {
  std::vector<double> slopes;   // column change per row
  std::vector<double> degrees;  // atan(slope), in degrees from vertical
  double mean_degrees = 0.0;
  std::size_t sets_used = 0;
};

/// Local maxima of one image row whose prominence reaches
/// prominence_fraction * (row max - row min). Prominence follows the usual
/// topographic definition: on each side, walk outward until a strictly
/// higher sample (or the row end); the peak's height above the higher of the
/// two minima found is its prominence. Plateaus report their center.
std::vector<std::size_t> row_maxima(const GrayImage& img, std::size_t row, const TraceConfig& cfg);
std::vector<std::size_t> row_maxima(std::span<const double> values, double prominence_fraction);

/// Seeds one set per maximum of the band's first row, then extends each set
/// row by row with its nearest maximum inside the gate. Sets shorter than
/// min_trace_fraction of the band height are dropped.
std::vector<TraceSet> trace_maxima(const GrayImage& img, const Band& band, const TraceConfig& cfg);

/// Least-squares slope of column on row.
double fit_slope(const TraceSet& set);

double slope_to_degrees(double slope);

/// Middle band -> traces -> slopes -> mean angle. Sets steeper than 45
/// degrees are discarded. No surviving set yields sets_used == 0 and a zero
/// angle.
RotationEstimate estimate_rotation(const GrayImage& img, const TraceConfig& cfg = {});

struct RotationIteration {
  GrayImage image;
  double total_degrees = 0.0;        // rotation applied to the input
  std::vector<double> corrections;   // per-iteration, sums to total_degrees
  std::size_t iterations = 0;        // estimates performed
  RotationEstimate first;            // estimate on the unrotated input
  RotationEstimate last;             // estimate on the returned image
};

/// Estimate, rotate by -mean, repeat until |mean| < tol, no set survives, or
/// max_iter estimates have run. Every step resamples the original input by
/// the accumulated angle and re-estimates only on the rotated support.
/// `first` skips the initial estimate when the caller already has it.
RotationIteration iterate_rotation(const GrayImage& img, const TraceConfig& cfg, double tol = 0.25,
                                   std::size_t max_iter = 5,
                                   const std::optional<RotationEstimate>& first = std::nullopt);

namespace detail {

/// Half-open column range [begin, end) of one row.
struct RowSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Per row of rotate(img, degrees): the columns whose source point lies
/// inside the original image (everything else is fill).
std::vector<RowSpan> rotated_support(std::size_t width, std::size_t height, double degrees);

/// trace_maxima / estimate_rotation with maxima searched only inside each
/// row's span.
std::vector<TraceSet> trace_maxima(const GrayImage& img, const Band& band, const TraceConfig& cfg,
                                   const std::vector<RowSpan>& support);
RotationEstimate estimate_rotation(const GrayImage& img, const TraceConfig& cfg,
                                   const std::vector<RowSpan>& support);

}  // namespace detail

enum class Mode { LineRotate, ImageRotate };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct Segment {
  Point p0;
  Point p1;

  double mid_x() const { return 0.5 * (p0.x + p1.x); }
};

/// Valley detection parameters; unset values use the width-based defaults.
struct ValleyParams {
  std::optional<std::size_t> min_separation;
  std::optional<std::size_t> edge_margin;
  std::optional<std::size_t> profile_window;

  ValleySet detect(const GrayImage& img) const;
};

struct ModeParams {
  TraceConfig trace;
  double tol = 0.25;
  std::size_t max_iter = 5;
  ValleyParams valleys;
};

struct ModeResult {
  std::vector<Segment> separators;    // original-image coordinates
  std::vector<std::size_t> valley_columns;  // working-image coordinates
  double applied_degrees = 0.0;       // angle of the separators from vertical
  std::size_t iterations = 1;
};

/// Line-rotate: tilt a full-height line through (x_v, h/2) by the estimated
/// angle for each valley of the unrotated image. Image-rotate: straighten the
/// image iteratively, re-detect valleys, and map vertical separators back to
/// the original frame.
ModeResult apply_mode(const GrayImage& img, const ValleySet& valleys, const RotationEstimate& est,
                      Mode mode, const ModeParams& params = {});

}  // namespace dentseg
