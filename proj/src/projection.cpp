#include "dentseg/projection.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "dentseg/kernels.hpp"

namespace dentseg {

ProjectionProfile vertical_projection(const GrayImage& img) {
  ProjectionProfile p{std::vector<double>(img.width(), 0.0), img.width(), img.height()};
  const auto& k = kernels::active();
  for (std::size_t y = 0; y < img.height(); ++y) k.accumulate(p.values.data(), img.row(y).data(), img.width());
  return p;
}

std::size_t default_profile_window(std::size_t width) {
  auto window = static_cast<std::size_t>(round_half_up(static_cast<double>(width) / 50.0));
  if (window % 2 == 0) ++window;
  return std::min(window, width % 2 == 1 ? width : width - 1);
}

std::size_t default_min_separation(std::size_t width) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(round_half_up(static_cast<double>(width) / 6.0)));
}

std::size_t default_edge_margin(std::size_t width) {
  return static_cast<std::size_t>(round_half_up(static_cast<double>(width) / 20.0));
}

ProjectionProfile smooth_profile(const ProjectionProfile& p, std::size_t window) {
  if (window == 0 || window % 2 == 0) throw std::invalid_argument("smoothing window must be odd and >= 1");
  if (window > p.size()) throw std::invalid_argument("smoothing window longer than the profile");
  if (window == 1) return p;

  const std::size_t radius = window / 2;
  const std::size_t n = p.size();
  std::vector<double> padded(n + 2 * radius);
  for (std::size_t i = 0; i < padded.size(); ++i) {
    const long src = std::clamp<long>(static_cast<long>(i) - static_cast<long>(radius), 0, static_cast<long>(n) - 1);
    padded[i] = p.values[static_cast<std::size_t>(src)];
  }
  const std::vector<double> ones(radius + 1, 1.0);
  ProjectionProfile out{std::vector<double>(n), p.source_width, p.source_height};
  const auto& k = kernels::active();
  k.symmetric_line(out.values.data(), padded.data(), ones.data(), radius, n);
  k.divide(out.values.data(), static_cast<double>(window), n);
  return out;
}

std::vector<std::size_t> local_minima(const std::vector<double>& values, std::size_t begin,
                                      std::size_t end) {
  std::vector<std::size_t> out;
  const std::size_t n = values.size();
  std::size_t a = 1;
  while (a + 1 < n) {
    std::size_t b = a;
    while (b + 1 < n && values[b + 1] == values[a]) ++b;
    if (b + 1 < n && values[a - 1] > values[a] && values[b + 1] > values[a]) {
      const std::size_t center = (a + b + 1) / 2;
      if (center >= begin && center < end) out.push_back(center);
    }
    a = b + 1;
  }
  return out;
}

ValleySet detect_valleys(const ProjectionProfile& p, std::size_t min_separation, std::size_t edge_margin) {
  if (min_separation < 1) throw std::invalid_argument("min_separation must be >= 1");
  ValleySet result{{}, min_separation, p};
  const std::size_t n = p.size();
  if (2 * edge_margin >= n) return result;

  std::vector<std::size_t> candidates = local_minima(p.values, edge_margin, n - edge_margin);
  std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    return p.values[a] < p.values[b];
  });
  for (std::size_t c : candidates) {
    const bool clear = std::all_of(result.positions.begin(), result.positions.end(), [&](std::size_t q) {
      return (c > q ? c - q : q - c) >= min_separation;
    });
    if (clear) result.positions.push_back(c);
  }
  std::sort(result.positions.begin(), result.positions.end());
  return result;
}

std::string profile_to_text(const ProjectionProfile& p) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t x = 0; x < p.size(); ++x) out << x << ' ' << p.values[x] << '\n';
  return out.str();
}

}  // namespace dentseg
