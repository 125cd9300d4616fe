#include "dentseg/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dentseg/kernels.hpp"

namespace dentseg {
namespace {

double default_cutoff(const GrayImage& img) {
  return kDefaultCutoffFraction * static_cast<double>(std::min(img.width(), img.height())) / 2.0;
}

std::size_t clamp_index(long i, std::size_t n) {
  return static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(n) - 1));
}

// Separable symmetric convolution with replicated borders. weights[0] is the
// center tap, weights[k] the tap at distance k. Vertical pass first, then
// horizontal; both are exactly mirror-symmetric in their summation order.
std::vector<double> separable_symmetric(const GrayImage& img, const std::vector<double>& weights) {
  const auto& k = kernels::active();
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::size_t radius = weights.size() - 1;

  std::vector<double> vertical(w * h);
  std::vector<const double*> rows(2 * radius + 1);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const long src = static_cast<long>(y) + static_cast<long>(j) - static_cast<long>(radius);
      rows[j] = img.row(clamp_index(src, h)).data();
    }
    k.symmetric_rows(vertical.data() + y * w, rows.data(), weights.data(), radius, w);
  }

  std::vector<double> out(w * h);
  std::vector<double> padded(w + 2 * radius);
  for (std::size_t y = 0; y < h; ++y) {
    const double* line = vertical.data() + y * w;
    for (std::size_t i = 0; i < padded.size(); ++i) {
      padded[i] = line[clamp_index(static_cast<long>(i) - static_cast<long>(radius), w)];
    }
    k.symmetric_line(out.data() + y * w, padded.data(), weights.data(), radius, w);
  }
  return out;
}

// Sum over an asymmetric rows x cols window (offsets -rows/2 .. rows-rows/2-1).
std::vector<double> box_sum(const std::vector<double>& src, std::size_t w, std::size_t h, int rows,
                            int cols) {
  const auto& k = kernels::active();
  const long up = rows / 2;
  const long left = cols / 2;

  std::vector<double> vertical(w * h, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    double* dst = vertical.data() + y * w;
    for (long dy = -up; dy < rows - up; ++dy) {
      const std::size_t sy = clamp_index(static_cast<long>(y) + dy, h);
      k.accumulate(dst, src.data() + sy * w, w);
    }
  }

  std::vector<double> out(w * h);
  std::vector<double> padded(w + static_cast<std::size_t>(cols) - 1);
  for (std::size_t y = 0; y < h; ++y) {
    const double* line = vertical.data() + y * w;
    for (std::size_t i = 0; i < padded.size(); ++i) {
      padded[i] = line[clamp_index(static_cast<long>(i) - left, w)];
    }
    k.window_sum(out.data() + y * w, padded.data(), static_cast<std::size_t>(cols), w);
  }
  return out;
}

GrayImage to_image(std::size_t w, std::size_t h, std::vector<double> values) {
  for (double& v : values) v = std::max(v, 0.0);
  return GrayImage(w, h, std::move(values));
}

}  // namespace

double ButterworthSpec::cutoff_for(const GrayImage& img) const {
  return cutoff.value_or(default_cutoff(img));
}

void ButterworthSpec::validate() const {
  if (order < 1) throw std::invalid_argument("butterworth order must be >= 1");
  if (cutoff && !(*cutoff > 0.0)) throw std::invalid_argument("butterworth cutoff must be > 0");
  if (!(dc_gain > 0.0)) throw std::invalid_argument("butterworth dc gain must be > 0");
}

double HomomorphicSpec::cutoff_for(const GrayImage& img) const {
  return cutoff.value_or(default_cutoff(img));
}

void HomomorphicSpec::validate() const {
  if (order < 1) throw std::invalid_argument("homomorphic order must be >= 1");
  if (cutoff && !(*cutoff > 0.0)) throw std::invalid_argument("homomorphic cutoff must be > 0");
  // Equal gains are allowed: that is the identity setting.
  if (!(gamma_low > 0.0) || gamma_low > gamma_high) {
    throw std::invalid_argument("homomorphic gains must satisfy 0 < gamma_low <= gamma_high");
  }
}

void SmoothingSpec::validate() const {
  if (mean_size < 3 || mean_size % 2 == 0) throw std::invalid_argument("mean_size must be odd and >= 3");
  if (wiener_rows < 2 || wiener_cols < 2) throw std::invalid_argument("wiener neighborhood must be at least 2x2");
  if (!(gaussian_sigma > 0.0)) throw std::invalid_argument("gaussian_sigma must be > 0");
  if (gaussian_size < 1 || gaussian_size % 2 == 0) throw std::invalid_argument("gaussian_size must be odd");
}

void PreprocessConfig::validate() const {
  butterworth.validate();
  homomorphic.validate();
  smoothing.validate();
}

double butterworth_gain(const ButterworthSpec& spec, double cutoff, double d) {
  const double ratio = d / cutoff;
  return spec.dc_gain / std::sqrt(1.0 + std::pow(ratio, 2.0 * spec.order));
}

double butterworth_gain(const ButterworthSpec& spec, double d) {
  if (!spec.cutoff) throw std::invalid_argument("butterworth_gain needs an explicit cutoff");
  return butterworth_gain(spec, *spec.cutoff, d);
}

double homomorphic_gain(const HomomorphicSpec& spec, double cutoff, double d) {
  const double highpass = 1.0 - 1.0 / (1.0 + std::pow(d / cutoff, 2.0 * spec.order));
  return (spec.gamma_high - spec.gamma_low) * highpass + spec.gamma_low;
}

GrayImage butterworth_filter(const GrayImage& img, const ButterworthSpec& spec) {
  spec.validate();
  const double d0 = spec.cutoff_for(img);
  return apply_frequency_filter(img, [&](double d) { return butterworth_gain(spec, d0, d); });
}

GrayImage homomorphic_filter(const GrayImage& img, const HomomorphicSpec& spec) {
  spec.validate();
  const double d0 = spec.cutoff_for(img);
  std::vector<double> logs(img.size());
  std::transform(img.pixels().begin(), img.pixels().end(), logs.begin(),
                 [](double v) { return std::log1p(v); });
  // apply_frequency_filter clamps at zero, which is also the floor of log1p.
  const GrayImage filtered = apply_frequency_filter(
      GrayImage(img.width(), img.height(), std::move(logs)),
      [&](double d) { return homomorphic_gain(spec, d0, d); });
  std::vector<double> out(filtered.size());
  std::transform(filtered.pixels().begin(), filtered.pixels().end(), out.begin(),
                 [](double v) { return std::clamp(std::expm1(v), 0.0, 255.0); });
  return GrayImage(img.width(), img.height(), std::move(out));
}

GrayImage mean_filter(const GrayImage& img, int size) {
  if (size < 3 || size % 2 == 0) {
    throw std::invalid_argument("mean filter window must be odd and >= 3, got " + std::to_string(size));
  }
  if (static_cast<std::size_t>(size) > std::min(img.width(), img.height())) {
    throw std::invalid_argument("mean filter window " + std::to_string(size) + " exceeds the image");
  }
  const std::vector<double> ones(static_cast<std::size_t>(size / 2 + 1), 1.0);
  std::vector<double> sums = separable_symmetric(img, ones);
  kernels::active().divide(sums.data(), static_cast<double>(size) * size, sums.size());
  return to_image(img.width(), img.height(), std::move(sums));
}

LocalStats local_statistics(const GrayImage& img, int rows, int cols) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("wiener neighborhood must be at least 2x2");
  const auto& k = kernels::active();
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::vector<double> values(img.pixels().begin(), img.pixels().end());
  std::vector<double> squares(values.size());
  k.square(squares.data(), values.data(), values.size());

  const std::vector<double> s = box_sum(values, w, h, rows, cols);
  const std::vector<double> s2 = box_sum(squares, w, h, rows, cols);
  LocalStats stats{std::vector<double>(w * h), std::vector<double>(w * h)};
  k.moments(stats.mean.data(), stats.variance.data(), s.data(), s2.data(),
            static_cast<double>(rows) * cols, w * h);
  return stats;
}

GrayImage wiener_filter(const GrayImage& img, int rows, int cols) {
  const LocalStats stats = local_statistics(img, rows, cols);
  double noise = 0.0;
  for (double v : stats.variance) noise += v;
  noise /= static_cast<double>(stats.variance.size());

  std::vector<double> out(img.size());
  kernels::active().wiener_combine(out.data(), img.pixels().data(), stats.mean.data(),
                                   stats.variance.data(), noise, out.size());
  return to_image(img.width(), img.height(), std::move(out));
}

std::vector<double> gaussian_kernel(double sigma, int size) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("gaussian sigma must be > 0");
  if (size < 1 || size % 2 == 0) throw std::invalid_argument("gaussian size must be odd and >= 1");
  const int radius = size / 2;
  std::vector<double> taps(static_cast<std::size_t>(radius + 1));
  for (int i = 0; i <= radius; ++i) taps[static_cast<std::size_t>(i)] = std::exp(-0.5 * i * i / (sigma * sigma));
  double total = taps[0];
  for (int i = 1; i <= radius; ++i) total += 2.0 * taps[static_cast<std::size_t>(i)];
  for (double& t : taps) t /= total;
  return taps;
}

GrayImage gaussian_filter(const GrayImage& img, double sigma, int size) {
  return to_image(img.width(), img.height(), separable_symmetric(img, gaussian_kernel(sigma, size)));
}

GrayImage preprocess_pipeline(const GrayImage& img, const PreprocessConfig& cfg,
                              const StageObserver& observer) {
  cfg.validate();
  GrayImage current = img;
  auto stage = [&](bool enabled, const char* name, auto&& fn) {
    if (!enabled) return;
    current = fn(current);
    if (observer) observer(name, current);
  };
  const auto& sm = cfg.smoothing;
  stage(cfg.stages.butterworth, "butterworth",
        [&](const GrayImage& x) { return butterworth_filter(x, cfg.butterworth); });
  stage(cfg.stages.homomorphic, "homomorphic",
        [&](const GrayImage& x) { return homomorphic_filter(x, cfg.homomorphic); });
  stage(cfg.stages.mean, "mean", [&](const GrayImage& x) { return mean_filter(x, sm.mean_size); });
  stage(cfg.stages.wiener, "wiener",
        [&](const GrayImage& x) { return wiener_filter(x, sm.wiener_rows, sm.wiener_cols); });
  stage(cfg.stages.gaussian, "gaussian",
        [&](const GrayImage& x) { return gaussian_filter(x, sm.gaussian_sigma, sm.gaussian_size); });
  return current;
}

}  // namespace dentseg
