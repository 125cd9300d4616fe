#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

#include "dentseg/kernels.hpp"
#include "dentseg/preprocess.hpp"

namespace dentseg {
namespace {

// FFTW's planner is not re-entrant; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

struct Plan {
  fftw_plan handle = nullptr;
  ~Plan() {
    if (handle != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(handle);
    }
  }
};

// Signed frequency of unshifted DFT index k in a length-n transform, i.e.
// its offset from the DC bin after an fftshift.
double signed_frequency(std::size_t k, std::size_t n) {
  const std::size_t half = (n + 1) / 2;
  return k < half ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
}

}  // namespace

GrayImage apply_frequency_filter(const GrayImage& img, const RadialGain& gain) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const std::size_t cw = w / 2 + 1;  // r2c keeps the non-negative column frequencies
  const std::size_t bins = h * cw;

  std::unique_ptr<double, FftwFree> spatial(fftw_alloc_real(w * h));
  std::unique_ptr<fftw_complex, FftwFree> spectrum(fftw_alloc_complex(bins));
  if (!spatial || !spectrum) throw std::bad_alloc();

  Plan forward;
  Plan inverse;
  {
    std::lock_guard lock(planner_mutex());
    forward.handle = fftw_plan_dft_r2c_2d(static_cast<int>(h), static_cast<int>(w), spatial.get(),
                                          spectrum.get(), FFTW_ESTIMATE);
    inverse.handle = fftw_plan_dft_c2r_2d(static_cast<int>(h), static_cast<int>(w), spectrum.get(),
                                          spatial.get(), FFTW_ESTIMATE);
  }
  if (forward.handle == nullptr || inverse.handle == nullptr) {
    throw std::runtime_error("FFTW planning failed");
  }

  std::copy(img.pixels().begin(), img.pixels().end(), spatial.get());
  fftw_execute(forward.handle);

  // Fold the 1/(w*h) inverse normalization into the gains.
  const double norm = 1.0 / static_cast<double>(w * h);
  std::vector<double> gains(bins);
  for (std::size_t u = 0; u < h; ++u) {
    const double fu = signed_frequency(u, h);
    for (std::size_t v = 0; v < cw; ++v) {
      const double fv = signed_frequency(v, w);
      gains[u * cw + v] = gain(std::sqrt(fu * fu + fv * fv)) * norm;
    }
  }
  kernels::active().scale_complex(reinterpret_cast<double*>(spectrum.get()), gains.data(), bins);

  fftw_execute(inverse.handle);

  std::vector<double> out(spatial.get(), spatial.get() + w * h);
  for (double& v : out) v = std::max(v, 0.0);
  return GrayImage(w, h, std::move(out));
}

}  // namespace dentseg
