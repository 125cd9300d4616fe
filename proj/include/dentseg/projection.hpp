#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dentseg/image.hpp"

namespace dentseg {

/// Per-column accumulated intensity.
struct ProjectionProfile {
  std::vector<double> values;
  std::size_t source_width = 0;
  std::size_t source_height = 0;

  std::size_t size() const { return values.size(); }
};

struct ValleySet {
  std::vector<std::size_t> positions;  // ascending
  std::size_t min_separation = 1;
  ProjectionProfile profile;  // the (smoothed) profile the positions index
};

/// proj(x) = sum over rows of f(x, y), accumulated top to bottom.
ProjectionProfile vertical_projection(const GrayImage& img);

/// round(w/50), bumped to the next odd number; at least 1.
std::size_t default_profile_window(std::size_t width);
std::size_t default_min_separation(std::size_t width);  // round(w/6), at least 1
std::size_t default_edge_margin(std::size_t width);     // round(w/20)

/// Centered moving average with replicated ends. window must be odd and
/// no longer than the profile.
ProjectionProfile smooth_profile(const ProjectionProfile& p, std::size_t window);

/// Strict local minima (plateaus resolved to their center) inside
/// [begin, end), in ascending position order.
std::vector<std::size_t> local_minima(const std::vector<double>& values, std::size_t begin,
                                      std::size_t end);

/// Candidate minima inside [edge_margin, w - edge_margin), accepted greedily
/// from the deepest so that all accepted positions are at least
/// min_separation apart. Ties go to the lower column.
ValleySet detect_valleys(const ProjectionProfile& p, std::size_t min_separation,
                         std::size_t edge_margin);

/// Two-column "x value" text, one line per column.
std::string profile_to_text(const ProjectionProfile& p);

}  // namespace dentseg
