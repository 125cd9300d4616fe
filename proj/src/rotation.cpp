#include "dentseg/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace dentseg {

void TraceConfig::validate() const {
  if (!(prominence_fraction > 0.0 && prominence_fraction < 1.0)) {
    throw std::invalid_argument("prominence_fraction must lie in (0, 1)");
  }
  if (!(gating_distance >= 0.0)) throw std::invalid_argument("gating_distance must be >= 0");
  if (!(min_trace_fraction > 0.0 && min_trace_fraction <= 1.0)) {
    throw std::invalid_argument("min_trace_fraction must lie in (0, 1]");
  }
}

std::vector<std::size_t> row_maxima(std::span<const double> v, double prominence_fraction) {
  std::vector<std::size_t> out;
  const std::size_t n = v.size();
  if (n < 3) return out;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  const double threshold = prominence_fraction * range;

  std::size_t a = 1;
  while (a + 1 < n) {
    std::size_t b = a;
    while (b + 1 < n && v[b + 1] == v[a]) ++b;
    if (b + 1 < n && v[a - 1] < v[a] && v[b + 1] < v[a]) {
      const double peak = v[a];
      double left_min = peak;
      for (std::size_t i = a; i-- > 0;) {
        if (v[i] > peak) break;
        left_min = std::min(left_min, v[i]);
      }
      double right_min = peak;
      for (std::size_t i = b + 1; i < n; ++i) {
        if (v[i] > peak) break;
        right_min = std::min(right_min, v[i]);
      }
      if (peak - std::max(left_min, right_min) >= threshold) out.push_back((a + b + 1) / 2);
    }
    a = b + 1;
  }
  return out;
}

std::vector<std::size_t> row_maxima(const GrayImage& img, std::size_t row, const TraceConfig& cfg) {
  if (row >= img.height()) throw std::out_of_range("row index outside the image");
  return row_maxima(img.row(row), cfg.prominence_fraction);
}

namespace {

template <class RowMaxima>
std::vector<TraceSet> trace_rows(const Band& band, const TraceConfig& cfg, RowMaxima&& row_maxima) {
  std::vector<TraceSet> sets;
  for (std::size_t col : row_maxima(band.row_start)) {
    sets.push_back(TraceSet{{{static_cast<double>(band.row_start), static_cast<double>(col)}}});
  }

  struct Claim {
    double distance;
    double col;
  };
  std::vector<std::optional<Claim>> claims(sets.size());
  for (std::size_t row = band.row_start + 1; row < band.row_end && !sets.empty(); ++row) {
    std::fill(claims.begin(), claims.end(), std::nullopt);
    for (std::size_t m : row_maxima(row)) {
      const double col = static_cast<double>(m);
      std::optional<std::size_t> nearest;
      double best = 0.0;
      for (std::size_t k = 0; k < sets.size(); ++k) {
        const double d = std::abs(col - sets[k].points.back().col);
        if (!nearest || d < best) {
          nearest = k;
          best = d;
        }
      }
      if (!nearest || best > cfg.gating_distance) continue;
      auto& claim = claims[*nearest];
      // Maxima arrive in ascending column order, so on a distance tie the
      // lower column keeps the set.
      if (!claim || best < claim->distance) claim = Claim{best, col};
    }
    for (std::size_t k = 0; k < sets.size(); ++k) {
      if (claims[k]) sets[k].points.push_back({static_cast<double>(row), claims[k]->col});
    }
  }

  const double min_points = cfg.min_trace_fraction * static_cast<double>(band.height());
  std::erase_if(sets, [&](const TraceSet& s) { return static_cast<double>(s.points.size()) < min_points; });
  return sets;
}

void check_band(const GrayImage& img, const Band& band) {
  if (band.row_start >= band.row_end || band.row_end > img.height()) {
    throw std::invalid_argument("band outside the image");
  }
}

RotationEstimate summarize(const std::vector<TraceSet>& sets) {
  RotationEstimate est;
  for (const TraceSet& set : sets) {
    double slope = 0.0;
    try {
      slope = fit_slope(set);
    } catch (const std::invalid_argument&) {
      continue;
    }
    const double deg = slope_to_degrees(slope);
    if (std::abs(deg) > kMaxRotationDegrees) continue;
    est.slopes.push_back(slope);
    est.degrees.push_back(deg);
  }
  est.sets_used = est.degrees.size();
  if (est.sets_used > 0) {
    est.mean_degrees = std::accumulate(est.degrees.begin(), est.degrees.end(), 0.0) /
                       static_cast<double>(est.sets_used);
  }
  return est;
}

}  // namespace

std::vector<TraceSet> trace_maxima(const GrayImage& img, const Band& band, const TraceConfig& cfg) {
  cfg.validate();
  check_band(img, band);
  return trace_rows(band, cfg, [&](std::size_t row) { return row_maxima(img, row, cfg); });
}

namespace detail {

std::vector<RowSpan> rotated_support(std::size_t width, std::size_t height, double degrees) {
  std::vector<RowSpan> spans(height);
  const double xmax = static_cast<double>(width) - 1.0;
  const double ymax = static_cast<double>(height) - 1.0;
  for (std::size_t y = 0; y < height; ++y) {
    bool any = false;
    for (std::size_t x = 0; x < width; ++x) {
      const Point src = rotate_point({static_cast<double>(x), static_cast<double>(y)}, -degrees, width, height);
      if (src.x < 0.0 || src.y < 0.0 || src.x > xmax || src.y > ymax) continue;
      if (!any) spans[y].begin = x;
      spans[y].end = x + 1;
      any = true;
    }
  }
  return spans;
}

std::vector<TraceSet> trace_maxima(const GrayImage& img, const Band& band, const TraceConfig& cfg,
                                   const std::vector<RowSpan>& support) {
  cfg.validate();
  check_band(img, band);
  if (support.size() != img.height()) throw std::invalid_argument("support must have one span per row");
  return trace_rows(band, cfg, [&](std::size_t row) {
    const RowSpan s = support[row];
    const auto full = img.row(row);
    if (s.end <= s.begin || s.end > full.size()) return std::vector<std::size_t>{};
    auto cols = row_maxima(full.subspan(s.begin, s.end - s.begin), cfg.prominence_fraction);
    for (auto& c : cols) c += s.begin;
    return cols;
  });
}

RotationEstimate estimate_rotation(const GrayImage& img, const TraceConfig& cfg,
                                   const std::vector<RowSpan>& support) {
  if (img.height() < 3) return {};
  return summarize(trace_maxima(img, middle_band(img), cfg, support));
}

}  // namespace detail

double fit_slope(const TraceSet& set) {
  const auto& pts = set.points;
  if (pts.size() < 2) throw std::invalid_argument("slope fit needs at least two points");
  // Rows are shifted by the first row so integer traces stay exact.
  const double r0 = pts.front().row;
  double sr = 0.0, sc = 0.0, src = 0.0, srr = 0.0;
  for (const auto& p : pts) {
    const double r = p.row - r0;
    sr += r;
    sc += p.col;
    src += r * p.col;
    srr += r * r;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * srr - sr * sr;
  if (!(denom > 0.0)) throw std::invalid_argument("degenerate trace: all points on one row");
  return (n * src - sr * sc) / denom;
}

double slope_to_degrees(double slope) { return std::atan(slope) * 180.0 / std::numbers::pi; }

RotationEstimate estimate_rotation(const GrayImage& img, const TraceConfig& cfg) {
  if (img.height() < 3) return {};
  return summarize(trace_maxima(img, middle_band(img), cfg));
}

RotationIteration iterate_rotation(const GrayImage& img, const TraceConfig& cfg, double tol,
                                   std::size_t max_iter, const std::optional<RotationEstimate>& first) {
  if (!(tol > 0.0)) throw std::invalid_argument("rotation tolerance must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");

  RotationIteration result{img, 0.0, {}, 0, {}, {}};
  for (std::size_t it = 0; it < max_iter; ++it) {
    RotationEstimate est;
    if (it == 0) {
      est = first ? *first : estimate_rotation(img, cfg);
    } else {
      est = detail::estimate_rotation(
          result.image, cfg, detail::rotated_support(img.width(), img.height(), result.total_degrees));
    }
    ++result.iterations;
    if (it == 0) result.first = est;
    result.last = est;
    if (est.sets_used == 0 || std::abs(est.mean_degrees) < tol) break;

    const double target = std::clamp(result.total_degrees - est.mean_degrees, -kMaxRotationDegrees,
                                     kMaxRotationDegrees);
    const double correction = target - result.total_degrees;
    if (correction == 0.0) break;
    result.corrections.push_back(correction);
    result.total_degrees = std::accumulate(result.corrections.begin(), result.corrections.end(), 0.0);
    result.image = rotate(img, result.total_degrees);
  }
  return result;
}

std::string to_string(Mode mode) { return mode == Mode::LineRotate ? "line-rotate" : "image-rotate"; }

Mode parse_mode(const std::string& text) {
  if (text == "line-rotate") return Mode::LineRotate;
  if (text == "image-rotate") return Mode::ImageRotate;
  throw std::invalid_argument("unknown mode '" + text + "' (expected line-rotate or image-rotate)");
}

ValleySet ValleyParams::detect(const GrayImage& img) const {
  const std::size_t w = img.width();
  const ProjectionProfile raw = vertical_projection(img);
  const ProjectionProfile smoothed = smooth_profile(raw, profile_window.value_or(default_profile_window(w)));
  return detect_valleys(smoothed, min_separation.value_or(default_min_separation(w)),
                        edge_margin.value_or(default_edge_margin(w)));
}

ModeResult apply_mode(const GrayImage& img, const ValleySet& valleys, const RotationEstimate& est, Mode mode,
                      const ModeParams& params) {
  const double h = static_cast<double>(img.height());
  ModeResult result;

  if (mode == Mode::LineRotate) {
    const double t = std::tan(est.mean_degrees * std::numbers::pi / 180.0);
    const double pivot = h / 2.0;
    for (std::size_t xv : valleys.positions) {
      const double x = static_cast<double>(xv);
      result.separators.push_back({{x + (0.0 - pivot) * t, 0.0}, {x + (h - 1.0 - pivot) * t, h - 1.0}});
    }
    result.valley_columns = valleys.positions;
    result.applied_degrees = est.mean_degrees;
    result.iterations = 1;
    return result;
  }

  const RotationIteration iter = iterate_rotation(img, params.trace, params.tol, params.max_iter, est);
  result.iterations = iter.iterations;
  // The separators carry the tilt that the correction removed.
  result.applied_degrees = -iter.total_degrees;
  const ValleySet working =
      iter.total_degrees == 0.0 ? valleys : params.valleys.detect(iter.image);
  result.valley_columns = working.positions;
  for (std::size_t xv : working.positions) {
    Point top{static_cast<double>(xv), 0.0};
    Point bottom{static_cast<double>(xv), h - 1.0};
    if (iter.total_degrees != 0.0) {
      top = rotate_point(top, -iter.total_degrees, img.width(), img.height());
      bottom = rotate_point(bottom, -iter.total_degrees, img.width(), img.height());
    }
    result.separators.push_back({top, bottom});
  }
  return result;
}

}  // namespace dentseg
