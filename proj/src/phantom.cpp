#include "dentseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "dentseg/io.hpp"
#include "dentseg/json.hpp"

namespace dentseg {
namespace {

// Fractions of the image height.
constexpr double kToothTop = 0.06;
constexpr double kToothBottom = 0.94;
constexpr double kGumLine = 0.30;
constexpr double kRootTaper = 0.70;
constexpr double kCanalTop = 0.15;
constexpr double kCanalBottom = 0.88;
constexpr double kMinToothWidth = 16.0;

// Rounded top corners; from kRootTaper down the root narrows linearly to a
// flat apex just wider than the canal.
struct ToothShape {
  double left, right, top, bottom, radius, root_start, apex_half;

  bool contains(double x, double y) const {
    if (x < left || x > right || y < top || y > bottom) return false;
    const double center = 0.5 * (left + right);
    const double half = 0.5 * (right - left);
    if (y >= root_start) {
      const double t = (y - root_start) / (bottom - root_start);
      return std::abs(x - center) <= half + (apex_half - half) * t;
    }
    const double cx = std::clamp(x, left + radius, right - radius);
    const double cy = std::max(y, top + radius);
    const double dx = x - cx;
    const double dy = y - cy;
    return dx * dx + dy * dy <= radius * radius;
  }
};

double canal_half_width(double tooth_width) { return 0.5 * std::clamp(0.14 * tooth_width, 6.0, 14.0); }

ToothShape make_tooth(double left, double width, double h) {
  const double radius = std::min(0.3 * width, 0.1 * h);
  const double apex_half = std::min(canal_half_width(width) + 3.0, 0.5 * width);
  return {left, left + width, -0.5 + kToothTop * h, -0.5 + kToothBottom * h, radius, -0.5 + kRootTaper * h, apex_half};
}

// The untilted scene, evaluated at continuous pixel-index coordinates
// (pixel centers on integers, image extent [-0.5, w - 0.5]).
class Scene {
 public:
  explicit Scene(const PhantomSpec& spec) : spec_(spec) {
    const double w = static_cast<double>(spec.width);
    const double h = static_cast<double>(spec.height);
    pitch_ = w / static_cast<double>(spec.tooth_count);
    tooth_width_ = pitch_ - spec.gap_width;
    top_ = -0.5 + kToothTop * h;
    bottom_ = -0.5 + kToothBottom * h;
    gum_line_ = -0.5 + kGumLine * h;
    canal_top_ = -0.5 + kCanalTop * h;
    canal_bottom_ = -0.5 + kCanalBottom * h;
    canal_half_ = canal_half_width(tooth_width_);
  }

  // Indices outside [0, tooth_count) continue the row past the film edges.
  ToothShape tooth(long k) const {
    const double left = -0.5 + static_cast<double>(k) * pitch_ + 0.5 * spec_.gap_width;
    return make_tooth(left, tooth_width_, static_cast<double>(spec_.height));
  }

  double tooth_center(std::size_t k) const {
    const ToothShape r = tooth(static_cast<long>(k));
    return 0.5 * (r.left + r.right);
  }

  double value(double x, double y) const {
    const double fk = std::floor((x + 0.5) / pitch_);
    const long k = static_cast<long>(fk);
    if (tooth(k).contains(x, y)) {
      if (k >= 0 && static_cast<std::size_t>(k) < spec_.tooth_count && is_canal(static_cast<std::size_t>(k)) &&
          std::abs(x - tooth_center(static_cast<std::size_t>(k))) <= canal_half_ && y >= canal_top_ &&
          y <= canal_bottom_) {
        return spec_.levels.canal;
      }
      return spec_.levels.dentin;
    }
    return y >= gum_line_ ? spec_.levels.gum : spec_.levels.air;
  }

  bool is_canal(std::size_t k) const {
    return std::find(spec_.canal_teeth.begin(), spec_.canal_teeth.end(), k) != spec_.canal_teeth.end();
  }

  double top() const { return top_; }
  double bottom() const { return bottom_; }
  double canal_top() const { return canal_top_; }
  double canal_bottom() const { return canal_bottom_; }

 private:
  const PhantomSpec& spec_;
  double pitch_, tooth_width_, top_, bottom_, gum_line_, canal_top_, canal_bottom_, canal_half_;
};

// Maps output pixel coordinates back into the untilted frame.
class InverseTilt {
 public:
  InverseTilt(double degrees, std::size_t w, std::size_t h)
      : c_(std::cos(degrees * std::numbers::pi / 180.0)),
        s_(std::sin(degrees * std::numbers::pi / 180.0)),
        cx_((static_cast<double>(w) - 1.0) / 2.0),
        cy_((static_cast<double>(h) - 1.0) / 2.0) {}

  Point operator()(double x, double y) const {
    const double dx = x - cx_;
    const double dy = y - cy_;
    return {cx_ + dx * c_ - dy * s_, cy_ + dx * s_ + dy * c_};
  }

 private:
  double c_, s_, cx_, cy_;
};

GrayImage rasterize_mask(const PhantomTruth& truth, auto&& inside) {
  GrayImage mask(truth.width, truth.height);
  const InverseTilt untilt(truth.tilt_degrees, truth.width, truth.height);
  for (std::size_t y = 0; y < truth.height; ++y) {
    for (std::size_t x = 0; x < truth.width; ++x) {
      const Point p = untilt(static_cast<double>(x), static_cast<double>(y));
      if (inside(p)) mask.at(x, y) = 255.0;
    }
  }
  return mask;
}

void ensure_writable(const std::filesystem::path& p, bool overwrite) {
  if (!overwrite && std::filesystem::exists(p)) {
    throw std::runtime_error(p.string() + " exists (pass --force to overwrite)");
  }
}

}  // namespace

void PhantomSpec::validate() const {
  if (width < 32 || height < 32) throw std::invalid_argument("phantom must be at least 32x32");
  if (tooth_count < 1 || tooth_count > 6) throw std::invalid_argument("tooth_count must lie in 1..6");
  if (!(gap_width >= 2.0)) throw std::invalid_argument("gap_width must be >= 2");
  if (static_cast<double>(tooth_count) * (kMinToothWidth + gap_width) > static_cast<double>(width)) {
    throw std::invalid_argument("infeasible geometry: teeth and gaps do not fit the width");
  }
  if (!std::isfinite(tilt_degrees) || std::abs(tilt_degrees) > kMaxRotationDegrees) {
    throw std::invalid_argument("tilt must be finite and within +/-45 degrees");
  }
  for (std::size_t k : canal_teeth) {
    if (k >= tooth_count) throw std::invalid_argument("canal tooth index out of range");
  }
  const auto& l = levels;
  if (!(0.0 <= l.air && l.air < l.gum && l.gum < l.dentin && l.dentin < l.canal && l.canal <= 255.0)) {
    throw std::invalid_argument("intensity levels must satisfy 0 <= air < gum < dentin < canal <= 255");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw std::invalid_argument("noise_sigma must be >= 0");
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = static_cast<double>(engine_() >> 11) * kScale;
  const double u2 = static_cast<double>(engine_() >> 11) * kScale;
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  const Scene scene(spec);
  const std::size_t w = spec.width;
  const std::size_t h = spec.height;
  const InverseTilt untilt(spec.tilt_degrees, w, h);

  std::vector<double> pixels(w * h);
  static constexpr double kOffsets[2] = {-0.25, 0.25};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (double oy : kOffsets) {
        for (double ox : kOffsets) {
          const Point p = untilt(static_cast<double>(x) + ox, static_cast<double>(y) + oy);
          acc += scene.value(p.x, p.y);
        }
      }
      pixels[y * w + x] = acc / 4.0;
    }
  }
  if (spec.noise_sigma > 0.0) {
    NormalStream normal(spec.seed);
    for (double& v : pixels) v = std::clamp(v + spec.noise_sigma * normal.next(), 0.0, 255.0);
  }

  PhantomTruth truth;
  truth.width = w;
  truth.height = h;
  truth.tilt_degrees = spec.tilt_degrees;
  truth.tooth_top = scene.top();
  truth.tooth_bottom = scene.bottom();
  for (std::size_t k = 0; k < spec.tooth_count; ++k) {
    const ToothShape r = scene.tooth(static_cast<long>(k));
    truth.teeth.push_back({r.left, r.right});
    if (k + 1 < spec.tooth_count) {
      const ToothShape next = scene.tooth(static_cast<long>(k + 1));
      truth.gaps.push_back({r.right, next.left});
      truth.gap_centers.push_back(0.5 * (r.right + next.left));
    }
  }
  const double rad = spec.tilt_degrees * std::numbers::pi / 180.0;
  const double cx = (static_cast<double>(w) - 1.0) / 2.0;
  std::vector<std::size_t> canal_teeth = spec.canal_teeth;
  std::sort(canal_teeth.begin(), canal_teeth.end());
  canal_teeth.erase(std::unique(canal_teeth.begin(), canal_teeth.end()), canal_teeth.end());
  for (std::size_t k : canal_teeth) {
    const double xc = scene.tooth_center(k);
    truth.canals.push_back({k, xc, scene.canal_top(), scene.canal_bottom(), std::tan(rad),
                            cx + (xc - cx) / std::cos(rad)});
  }
  return {GrayImage(w, h, std::move(pixels)), std::move(truth)};
}

GrayImage gap_mask(const PhantomTruth& truth, std::size_t gap) {
  if (gap >= truth.gaps.size()) throw std::out_of_range("gap index out of range");
  const ColumnRange g = truth.gaps[gap];
  return rasterize_mask(truth, [&](Point p) {
    return p.x > g.left && p.x < g.right && p.y >= truth.tooth_top && p.y <= truth.tooth_bottom;
  });
}

GrayImage tooth_mask(const PhantomTruth& truth, std::size_t tooth) {
  if (tooth >= truth.teeth.size()) throw std::out_of_range("tooth index out of range");
  const ColumnRange t = truth.teeth[tooth];
  const ToothShape shape = make_tooth(t.left, t.right - t.left, static_cast<double>(truth.height));
  return rasterize_mask(truth, [&](Point p) { return shape.contains(p.x, p.y); });
}

std::vector<PhantomSpec> default_batch_specs() {
  std::vector<PhantomSpec> specs;
  for (std::size_t i = 0; i < 51; ++i) {
    PhantomSpec s;
    s.tooth_count = 2 + i % 4;
    s.tilt_degrees = -15.0 + 30.0 * static_cast<double>((7 * i) % 51) / 50.0;
    s.width = 450 + 4 * ((37 * i) % 51);
    s.height = 600 + 5 * ((23 * i) % 51);
    s.gap_width = round_half_up(static_cast<double>(s.width) / 20.0);
    s.canal_teeth = {i % s.tooth_count};
    s.noise_sigma = 8.0;
    s.seed = 1000 + i;
    specs.push_back(s);
  }
  return specs;
}

Manifest write_batch(const std::vector<PhantomSpec>& specs, const std::filesystem::path& out_dir,
                     const BatchOptions& options) {
  if (specs.empty()) throw std::invalid_argument("phantom batch needs at least one spec");
  for (const auto& s : specs) s.validate();
  std::filesystem::create_directories(out_dir);

  Manifest manifest{out_dir, {}};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "phantom_%03zu", i);
    const std::filesystem::path image_name = std::string(stem) + ".pgm";
    const std::filesystem::path truth_name = std::string(stem) + ".json";
    ensure_writable(out_dir / image_name, options.overwrite);
    ensure_writable(out_dir / truth_name, options.overwrite);

    const Phantom ph = generate_phantom(specs[i]);
    save_image(ph.image, out_dir / image_name);

    nlohmann::json truth = ph.truth;
    if (options.write_masks) {
      nlohmann::json gaps = nlohmann::json::array();
      for (std::size_t g = 0; g < ph.truth.gaps.size(); ++g) {
        const std::string name = std::string(stem) + "_gap" + std::to_string(g) + ".pgm";
        ensure_writable(out_dir / name, options.overwrite);
        save_image(gap_mask(ph.truth, g), out_dir / name);
        gaps.push_back(name);
      }
      nlohmann::json teeth = nlohmann::json::array();
      for (std::size_t t = 0; t < ph.truth.teeth.size(); ++t) {
        const std::string name = std::string(stem) + "_tooth" + std::to_string(t) + ".pgm";
        ensure_writable(out_dir / name, options.overwrite);
        save_image(tooth_mask(ph.truth, t), out_dir / name);
        teeth.push_back(name);
      }
      truth["gap_mask_paths"] = gaps;
      truth["tooth_mask_paths"] = teeth;
    }
    std::ofstream(out_dir / truth_name) << truth.dump(2) << '\n';
    manifest.entries.push_back({image_name, truth_name, specs[i]});
  }
  const auto manifest_path = out_dir / "manifest.json";
  ensure_writable(manifest_path, options.overwrite);
  save_manifest(manifest, manifest_path);
  return manifest;
}

}  // namespace dentseg
