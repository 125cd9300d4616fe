#include "dentseg/segmentation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace dentseg {
namespace {

class StageClock {
 public:
  explicit StageClock(std::map<std::string, double>& sink) : sink_(sink) {}

  void lap(const std::string& stage) {
    const auto now = std::chrono::steady_clock::now();
    sink_[stage] = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
  }

 private:
  std::map<std::string, double>& sink_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

struct ClippedSpan {
  double x_min;
  double x_max;
};

// Column span of the segment a-b restricted to rows [top, bottom].
std::optional<ClippedSpan> clip_to_rows(Point a, Point b, double top, double bottom) {
  if (a.y > b.y) std::swap(a, b);
  const double y0 = std::max(a.y, top);
  const double y1 = std::min(b.y, bottom);
  if (y0 > y1) return std::nullopt;
  const double dy = b.y - a.y;
  auto x_at = [&](double y) { return dy == 0.0 ? a.x : a.x + (b.x - a.x) * (y - a.y) / dy; };
  if (dy == 0.0) return ClippedSpan{std::min(a.x, b.x), std::max(a.x, b.x)};
  const double xa = x_at(y0);
  const double xb = x_at(y1);
  return ClippedSpan{std::min(xa, xb), std::max(xa, xb)};
}

}  // namespace

void SegmentationConfig::validate() const {
  preprocess.validate();
  trace.validate();
  if (!(tol > 0.0)) throw std::invalid_argument("rotation tolerance must be > 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (valleys.min_separation && *valleys.min_separation < 1) {
    throw std::invalid_argument("min_separation must be >= 1");
  }
  if (valleys.profile_window && *valleys.profile_window % 2 == 0) {
    throw std::invalid_argument("profile window must be odd");
  }
}

SegmentationResult segment(const GrayImage& img, const SegmentationConfig& cfg) {
  cfg.validate();
  SegmentationResult res;
  res.width = img.width();
  res.height = img.height();
  StageClock clock(res.timing_ms);

  const GrayImage pre = preprocess_pipeline(img, cfg.preprocess);
  clock.lap("preprocess");
  const RotationEstimate est = estimate_rotation(pre, cfg.trace);
  clock.lap("rotation");
  const ValleySet valleys = cfg.valleys.detect(pre);
  clock.lap("projection");
  ModeResult mode = apply_mode(pre, valleys, est, cfg.mode, cfg.mode_params());
  clock.lap("separators");

  res.rotation = {mode.applied_degrees, est.degrees, est.sets_used, mode.iterations};
  res.separators = std::move(mode.separators);
  std::stable_sort(res.separators.begin(), res.separators.end(),
                   [](const Segment& a, const Segment& b) { return a.mid_x() < b.mid_x(); });
  res.valley_columns = std::move(mode.valley_columns);
  res.tooth_count = res.separators.size() + 1;
  return res;
}

std::vector<std::pair<long, long>> rasterize_line(Point a, Point b) {
  long x0 = round_half_up_int(a.x);
  long y0 = round_half_up_int(a.y);
  const long x1 = round_half_up_int(b.x);
  const long y1 = round_half_up_int(b.y);
  const long dx = std::abs(x1 - x0);
  const long dy = -std::abs(y1 - y0);
  const long sx = x0 < x1 ? 1 : -1;
  const long sy = y0 < y1 ? 1 : -1;
  long err = dx + dy;
  std::vector<std::pair<long, long>> out;
  out.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
  while (true) {
    out.emplace_back(x0, y0);
    if (x0 == x1 && y0 == y1) break;
    const long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
  return out;
}

RgbImage render_overlay(const GrayImage& img, const SegmentationResult& res) {
  RgbImage out{img.width(), img.height(), std::vector<std::uint8_t>(img.size() * 3)};
  for (std::size_t i = 0; i < img.size(); ++i) {
    const std::uint8_t g = quantize(img.pixels()[i]);
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = g;
  }
  const auto w = static_cast<long>(img.width());
  const auto h = static_cast<long>(img.height());
  auto paint = [&](long x, long y) {
    if (x < 0 || y < 0 || x >= w || y >= h) return;
    std::uint8_t* p = out.pixel(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
    p[0] = 0;
    p[1] = 0;
    p[2] = 255;
  };
  for (const Segment& s : res.separators) {
    const bool steep = std::abs(s.p1.y - s.p0.y) >= std::abs(s.p1.x - s.p0.x);
    for (auto [x, y] : rasterize_line(s.p0, s.p1)) {
      paint(x, y);
      steep ? paint(x + 1, y) : paint(x, y + 1);
    }
  }
  return out;
}

ToothScore count_correct(const SegmentationResult& res, const PhantomTruth& truth) {
  if (res.width != truth.width || res.height != truth.height) {
    throw std::invalid_argument("segmentation result and ground truth have different dimensions");
  }
  const std::size_t n_teeth = truth.teeth.size();
  std::vector<bool> gap_hit(truth.gaps.size(), false);
  std::vector<bool> crossed(n_teeth, false);

  for (const Segment& s : res.separators) {
    const Point a = rotate_point(s.p0, -truth.tilt_degrees, truth.width, truth.height);
    const Point b = rotate_point(s.p1, -truth.tilt_degrees, truth.width, truth.height);
    const auto span = clip_to_rows(a, b, truth.tooth_top, truth.tooth_bottom);
    if (!span) continue;
    bool hits = false;
    for (std::size_t g = 0; g < truth.gaps.size(); ++g) {
      if (span->x_min > truth.gaps[g].left && span->x_max < truth.gaps[g].right) {
        gap_hit[g] = true;
        hits = true;
      }
    }
    if (hits) continue;
    for (std::size_t t = 0; t < n_teeth; ++t) {
      if (span->x_max >= truth.teeth[t].left && span->x_min <= truth.teeth[t].right) crossed[t] = true;
    }
  }

  ToothScore score{0, n_teeth};
  for (std::size_t t = 0; t < n_teeth; ++t) {
    const bool left_ok = t == 0 || gap_hit[t - 1];
    const bool right_ok = t + 1 == n_teeth || gap_hit[t];
    if (left_ok && right_ok && !crossed[t]) ++score.segmented_ok;
  }
  return score;
}

}  // namespace dentseg
