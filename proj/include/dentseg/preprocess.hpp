#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dentseg/image.hpp"

namespace dentseg {

/// Default cutoff radius of both frequency filters as a fraction of
/// min(w, h) / 2.
inline constexpr double kDefaultCutoffFraction = 0.3;

struct ButterworthSpec {
  int order = 2;
  std::optional<double> cutoff;  // unset: kDefaultCutoffFraction * min(w,h)/2
  double dc_gain = 1.0;

  double cutoff_for(const GrayImage& img) const;
  void validate() const;
};

struct HomomorphicSpec {
  double gamma_low = 0.5;
  double gamma_high = 1.5;
  std::optional<double> cutoff;
  int order = 2;

  double cutoff_for(const GrayImage& img) const;
  void validate() const;
};

struct SmoothingSpec {
  int mean_size = 15;
  int wiener_rows = 10;
  int wiener_cols = 10;
  double gaussian_sigma = 2.0;
  int gaussian_size = 9;

  void validate() const;
};

/// Which stages of the cascade run. All on by default.
struct StageToggles {
  bool butterworth = true;
  bool homomorphic = true;
  bool mean = true;
  bool wiener = true;
  bool gaussian = true;
};

struct PreprocessConfig {
  ButterworthSpec butterworth;
  HomomorphicSpec homomorphic;
  SmoothingSpec smoothing;
  StageToggles stages;

  void validate() const;
};

/// Low-pass magnitude response: G = g0 / sqrt(1 + (d/d0)^(2n)).
double butterworth_gain(const ButterworthSpec& spec, double cutoff, double d);
/// Same, with the spec's explicit cutoff (throws when the cutoff is unset).
double butterworth_gain(const ButterworthSpec& spec, double d);

/// High-emphasis response built on the Butterworth high-pass:
/// (gamma_high - gamma_low) * (1 - 1/(1 + (d/d0)^(2n))) + gamma_low.
double homomorphic_gain(const HomomorphicSpec& spec, double cutoff, double d);

using RadialGain = std::function<double(double)>;

/// Forward DFT, multiply each bin by gain(distance from centered DC), inverse
/// DFT; negative results are clamped to zero. Works for any image size.
GrayImage apply_frequency_filter(const GrayImage& img, const RadialGain& gain);

GrayImage butterworth_filter(const GrayImage& img, const ButterworthSpec& spec = {});
GrayImage homomorphic_filter(const GrayImage& img, const HomomorphicSpec& spec = {});

GrayImage mean_filter(const GrayImage& img, int size);

/// Local mean and (population) variance over a rows x cols window anchored
/// at offset -rows/2 .. rows-rows/2-1 (and likewise for columns); borders
/// replicate.
struct LocalStats {
  std::vector<double> mean;
  std::vector<double> variance;
};
LocalStats local_statistics(const GrayImage& img, int rows, int cols);

/// Pixel-wise adaptive Wiener filter; the noise power is the mean of all
/// local variances.
GrayImage wiener_filter(const GrayImage& img, int rows = 10, int cols = 10);

/// Normalized, truncated Gaussian kernel of odd length `size`.
std::vector<double> gaussian_kernel(double sigma, int size);

GrayImage gaussian_filter(const GrayImage& img, double sigma = 2.0, int size = 9);

/// Called after every stage that ran, with the stage name.
using StageObserver = std::function<void(const std::string& stage, const GrayImage& out)>;

/// butterworth -> homomorphic -> mean -> wiener -> gaussian, skipping any
/// stage switched off in the toggles.
GrayImage preprocess_pipeline(const GrayImage& img, const PreprocessConfig& cfg,
                              const StageObserver& observer = {});

}  // namespace dentseg
