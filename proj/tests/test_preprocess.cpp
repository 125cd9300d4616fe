#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "dentseg/phantom.hpp"
#include "dentseg/preprocess.hpp"
#include "dentseg/projection.hpp"
#include "support.hpp"

using namespace dentseg;

namespace {

double max_abs_diff(const GrayImage& a, const GrayImage& b) {
  REQUIRE(a.width() == b.width());
  REQUIRE(a.height() == b.height());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.pixels()[i] - b.pixels()[i]));
  return m;
}

bool is_constant(const GrayImage& img, double value, double tol) {
  for (double v : img.pixels()) {
    if (std::abs(v - value) > tol) return false;
  }
  return true;
}

long clampi(long v, long lo, long hi) { return std::max(lo, std::min(v, hi)); }

// Direct O(N^2) 2D DFT filter: X = DFT(x); Y = gain(radius) * X; y = Re IDFT(Y).
GrayImage dft_filter_oracle(const GrayImage& img, const RadialGain& gain) {
  const long w = static_cast<long>(img.width()), h = static_cast<long>(img.height());
  using C = std::complex<double>;
  const double tau = 2.0 * std::numbers::pi;
  std::vector<C> spec(img.size());
  for (long v = 0; v < h; ++v) {
    for (long u = 0; u < w; ++u) {
      C acc = 0.0;
      for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
          const double phase = -tau * (static_cast<double>(u * x) / w + static_cast<double>(v * y) / h);
          acc += img.at(x, y) * C(std::cos(phase), std::sin(phase));
        }
      }
      const double fu = u < (w + 1) / 2 ? u : u - w;
      const double fv = v < (h + 1) / 2 ? v : v - h;
      spec[v * w + u] = acc * gain(std::hypot(fu, fv));
    }
  }
  GrayImage out(img.width(), img.height());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      C acc = 0.0;
      for (long v = 0; v < h; ++v) {
        for (long u = 0; u < w; ++u) {
          const double phase = tau * (static_cast<double>(u * x) / w + static_cast<double>(v * y) / h);
          acc += spec[v * w + u] * C(std::cos(phase), std::sin(phase));
        }
      }
      out.at(x, y) = std::max(acc.real() / static_cast<double>(w * h), 0.0);
    }
  }
  return out;
}

GrayImage mean_oracle(const GrayImage& img, long size) {
  const long w = static_cast<long>(img.width()), h = static_cast<long>(img.height()), r = size / 2;
  GrayImage out(img.width(), img.height());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double s = 0.0;
      for (long dy = -r; dy <= r; ++dy) {
        for (long dx = -r; dx <= r; ++dx) s += img.at(clampi(x + dx, 0, w - 1), clampi(y + dy, 0, h - 1));
      }
      out.at(x, y) = s / static_cast<double>(size * size);
    }
  }
  return out;
}

GrayImage gaussian_oracle(const GrayImage& img, double sigma, long size) {
  const long w = static_cast<long>(img.width()), h = static_cast<long>(img.height()), r = size / 2;
  std::vector<double> k2(size * size);
  double total = 0.0;
  for (long dy = -r; dy <= r; ++dy) {
    for (long dx = -r; dx <= r; ++dx) {
      const double v = std::exp(-static_cast<double>(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      k2[(dy + r) * size + dx + r] = v;
      total += v;
    }
  }
  GrayImage out(img.width(), img.height());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double s = 0.0;
      for (long dy = -r; dy <= r; ++dy) {
        for (long dx = -r; dx <= r; ++dx) {
          s += k2[(dy + r) * size + dx + r] * img.at(clampi(x + dx, 0, w - 1), clampi(y + dy, 0, h - 1));
        }
      }
      out.at(x, y) = s / total;
    }
  }
  return out;
}

GrayImage wiener_oracle(const GrayImage& img, long rows, long cols) {
  const long w = static_cast<long>(img.width()), h = static_cast<long>(img.height());
  std::vector<double> mu(img.size()), var(img.size());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double s = 0.0, s2 = 0.0;
      for (long dy = -rows / 2; dy < rows - rows / 2; ++dy) {
        for (long dx = -cols / 2; dx < cols - cols / 2; ++dx) {
          const double v = img.at(clampi(x + dx, 0, w - 1), clampi(y + dy, 0, h - 1));
          s += v;
          s2 += v * v;
        }
      }
      const double n = static_cast<double>(rows * cols);
      mu[y * w + x] = s / n;
      var[y * w + x] = std::max(s2 / n - (s / n) * (s / n), 0.0);
    }
  }
  double noise = 0.0;
  for (double v : var) noise += v;
  noise /= static_cast<double>(var.size());
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double den = std::max(var[i], noise);
    out.pixels()[i] =
        den == 0.0 ? mu[i] : mu[i] + std::max(var[i] - noise, 0.0) / den * (img.pixels()[i] - mu[i]);
  }
  return out;
}

PhantomSpec small_phantom(std::uint64_t seed, double sigma = 8.0) {
  PhantomSpec s;
  s.width = 160;
  s.height = 200;
  s.tooth_count = 3;
  s.gap_width = 10;
  s.noise_sigma = sigma;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_SUITE("preprocess") {
  TEST_CASE("butterworth gain: half power at the cutoff") {
    ButterworthSpec spec;
    for (double d0 : {1.0, 10.0, 50.0, 300.0}) {
      spec.cutoff = d0;
      CHECK(std::abs(butterworth_gain(spec, d0) - 1.0 / std::sqrt(2.0)) < 1e-12);
    }
    spec.cutoff.reset();
    CHECK_THROWS(butterworth_gain(spec, 1.0));
  }

  TEST_CASE("butterworth gain is non-increasing and starts at g0") {
    testing::Gen gen(8);
    for (int t = 0; t < 200; ++t) {
      ButterworthSpec spec;
      spec.order = static_cast<int>(gen.integer(1, 6));
      spec.dc_gain = gen.real(0.1, 3.0);
      const double d0 = gen.real(0.5, 400.0);
      CHECK(butterworth_gain(spec, d0, 0.0) == spec.dc_gain);
      double prev = spec.dc_gain;
      for (double d = 0.0; d < 1000.0; d += gen.real(0.1, 20.0)) {
        const double g = butterworth_gain(spec, d0, d);
        CHECK(g <= prev);
        prev = g;
      }
    }
  }

  TEST_CASE("spec validation") {
    ButterworthSpec b;
    b.order = 0;
    CHECK_THROWS(b.validate());
    HomomorphicSpec hspec;
    hspec.gamma_low = -1.0;
    CHECK_THROWS(hspec.validate());
    SmoothingSpec s;
    s.mean_size = 4;
    CHECK_THROWS(s.validate());
    s = {};
    s.gaussian_sigma = 0.0;
    CHECK_THROWS(s.validate());
    s = {};
    s.wiener_rows = 1;
    CHECK_THROWS(s.validate());
  }

  TEST_CASE("frequency filter matches a direct DFT oracle") {
    testing::Gen gen(21);
    for (auto [w, h] : {std::pair<std::size_t, std::size_t>{7, 5}, {8, 6}, {9, 4}, {5, 11}}) {
      const GrayImage img = gen.image(w, h);
      ButterworthSpec spec;
      spec.cutoff = 2.0;
      const RadialGain gain = [&](double d) { return butterworth_gain(spec, d); };
      CHECK(max_abs_diff(apply_frequency_filter(img, gain), dft_filter_oracle(img, gain)) < 1e-9);
      HomomorphicSpec hspec;
      const RadialGain hgain = [&](double d) { return homomorphic_gain(hspec, 1.5, d); };
      CHECK(max_abs_diff(apply_frequency_filter(img, hgain), dft_filter_oracle(img, hgain)) < 1e-9);
    }
  }

  TEST_CASE("butterworth: constants pass, DC gain scales") {
    CHECK(is_constant(butterworth_filter(GrayImage(37, 29, 123.0)), 123.0, 1e-9));
    ButterworthSpec spec;
    spec.dc_gain = 0.5;
    CHECK(is_constant(butterworth_filter(GrayImage(16, 16, 80.0), spec), 40.0, 1e-9));
  }

  TEST_CASE("butterworth attenuates a checkerboard by the gain at its radius") {
    GrayImage img(64, 64);
    for (std::size_t y = 0; y < 64; ++y) {
      for (std::size_t x = 0; x < 64; ++x) img.at(x, y) = 100.0 + ((x + y) % 2 ? 50.0 : -50.0);
    }
    ButterworthSpec spec;
    spec.cutoff = 4.0;
    const GrayImage out = butterworth_filter(img, spec);
    // The alternating component sits at frequency (-32, -32).
    const double expected = 50.0 * butterworth_gain(spec, std::hypot(32.0, 32.0));
    for (std::size_t y = 0; y < 64; ++y) {
      for (std::size_t x = 0; x < 64; ++x) {
        const double sign = (x + y) % 2 ? 1.0 : -1.0;
        CHECK(std::abs(out.at(x, y) - (100.0 + sign * expected)) < 1e-6);
      }
    }
  }

  TEST_CASE("butterworth acts on non-constant content") {
    const Phantom ph = generate_phantom(small_phantom(4));
    CHECK(max_abs_diff(butterworth_filter(ph.image), ph.image) > 1.0);
  }

  TEST_CASE("homomorphic on constants") {
    HomomorphicSpec unit;
    unit.gamma_low = 1.0;
    unit.gamma_high = 1.0;
    CHECK(is_constant(homomorphic_filter(GrayImage(30, 20, 77.0), unit), 77.0, 1e-6));
    const GrayImage out = homomorphic_filter(GrayImage(30, 20, 100.0));
    CHECK(is_constant(out, std::exp(0.5 * std::log(101.0)) - 1.0, 1e-6));
    CHECK(std::abs(out.at(0, 0) - 9.0499) < 1e-4);
  }

  TEST_CASE("homomorphic raises log-domain contrast above the cutoff") {
    // Fine texture well above d0: its log amplitude gains gamma_high.
    GrayImage img(64, 64);
    for (std::size_t y = 0; y < 64; ++y) {
      for (std::size_t x = 0; x < 64; ++x) img.at(x, y) = (x + y) % 2 ? 150.0 : 50.0;
    }
    HomomorphicSpec spec;
    spec.cutoff = 4.0;
    const GrayImage out = homomorphic_filter(img, spec);
    const double in_amp = std::log1p(150.0) - std::log1p(50.0);
    const double out_amp = std::log1p(out.at(1, 0)) - std::log1p(out.at(0, 0));
    const double g = homomorphic_gain(spec, 4.0, std::hypot(32.0, 32.0));
    CHECK(out_amp == doctest::Approx(g * in_amp).epsilon(1e-9));
    CHECK(out_amp > in_amp);
  }

  TEST_CASE("homomorphic output is finite and non-negative") {
    testing::Gen gen(31);
    for (int t = 0; t < 10; ++t) {
      HomomorphicSpec spec;
      spec.gamma_high = gen.real(1.0, 4.0);
      const GrayImage out = homomorphic_filter(gen.image(gen.size(5, 40), gen.size(5, 40)), spec);
      for (double v : out.pixels()) CHECK((std::isfinite(v) && v >= 0.0 && v <= 255.0));
    }
  }

  TEST_CASE("mean filter") {
    CHECK(mean_filter(GrayImage(20, 20, 42.0), 15) == GrayImage(20, 20, 42.0));
    GrayImage impulse(3, 3);
    impulse.at(1, 1) = 9.0;
    CHECK(mean_filter(impulse, 3).at(1, 1) == 1.0);
    const Phantom ph = generate_phantom(small_phantom(9));
    CHECK(max_abs_diff(mean_filter(ph.image, 15), mean_oracle(ph.image, 15)) < 1e-9);
    CHECK_THROWS(mean_filter(impulse, 2));
    CHECK_THROWS(mean_filter(impulse, 5));
    CHECK_THROWS(mean_filter(impulse, 1));
  }

  TEST_CASE("wiener filter") {
    CHECK(wiener_filter(GrayImage(25, 25, 17.0)) == GrayImage(25, 25, 17.0));
    testing::Gen gen(12);
    for (int t = 0; t < 5; ++t) {
      const GrayImage img = gen.image(gen.size(10, 40), gen.size(10, 40));
      const long rows = gen.integer(2, 9), cols = gen.integer(2, 9);
      CHECK(max_abs_diff(wiener_filter(img, rows, cols), wiener_oracle(img, rows, cols)) < 1e-9);
    }
    CHECK_THROWS(wiener_filter(GrayImage(5, 5), 1, 4));
    CHECK_THROWS(wiener_filter(GrayImage(5, 5), 4, 1));
  }

  TEST_CASE("wiener: equal local variances give the local means") {
    // Period-2 stripes: every 10-wide window holds five of each value.
    GrayImage img(40, 30);
    for (std::size_t y = 0; y < 30; ++y) {
      for (std::size_t x = 0; x < 40; ++x) img.at(x, y) = x % 2 ? 10.0 : 30.0;
    }
    const LocalStats st = local_statistics(img, 10, 10);
    const GrayImage out = wiener_filter(img, 10, 10);
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (st.variance[i] == st.variance[0]) CHECK(out.pixels()[i] == doctest::Approx(st.mean[i]));
    }
  }

  TEST_CASE("wiener reduces the error of a noisy phantom") {
    const GrayImage clean = generate_phantom(small_phantom(1, 0.0)).image;
    const GrayImage noisy = generate_phantom(small_phantom(1, 8.0)).image;
    auto mse = [&](const GrayImage& a) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(a.pixels()[i] - clean.pixels()[i], 2);
      return s / static_cast<double>(a.size());
    };
    CHECK(mse(wiener_filter(noisy, 5, 5)) < 0.5 * mse(noisy));
  }

  TEST_CASE("gaussian filter") {
    const auto half = gaussian_kernel(2.0, 9);
    REQUIRE(half.size() == 5);
    double total = half[0];
    for (std::size_t i = 1; i < half.size(); ++i) total += 2.0 * half[i];
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(is_constant(gaussian_filter(GrayImage(20, 20, 64.0)), 64.0, 1e-9));

    GrayImage impulse(33, 33);
    impulse.at(16, 16) = 1.0;
    CHECK(gaussian_filter(impulse, 2.0, 9).at(16, 16) == doctest::Approx(half[0] * half[0]).epsilon(1e-14));

    testing::Gen gen(44);
    for (int t = 0; t < 4; ++t) {
      const GrayImage img = gen.image(gen.size(9, 50), gen.size(9, 50));
      const double sigma = gen.real(0.5, 4.0);
      const long size = 2 * gen.integer(1, 5) + 1;
      CHECK(max_abs_diff(gaussian_filter(img, sigma, static_cast<int>(size)), gaussian_oracle(img, sigma, size)) <
            1e-9);
    }
    CHECK_THROWS(gaussian_filter(impulse, 0.0, 9));
    CHECK_THROWS(gaussian_filter(impulse, 1.0, 8));
  }

  TEST_CASE("gaussian preserves the sum of interior-dominated images") {
    const Phantom ph = generate_phantom(small_phantom(5));
    const double in = ph.image.sum();
    CHECK(std::abs(gaussian_filter(ph.image).sum() - in) / in < 1e-3);
  }

  TEST_CASE("mean and gaussian commute with mirroring exactly") {
    testing::Gen gen(99);
    for (int t = 0; t < 20; ++t) {
      const GrayImage img = gen.image(gen.size(15, 60), gen.size(15, 60));
      CHECK(mean_filter(mirror_horizontal(img), 15) == mirror_horizontal(mean_filter(img, 15)));
      CHECK(gaussian_filter(mirror_horizontal(img)) == mirror_horizontal(gaussian_filter(img)));
    }
  }

  TEST_CASE("every filter keeps dimensions and non-negativity") {
    testing::Gen gen(5);
    const GrayImage img = gen.image(31, 26);
    for (const GrayImage& out : {butterworth_filter(img), homomorphic_filter(img), mean_filter(img, 15),
                                 wiener_filter(img), gaussian_filter(img)}) {
      CHECK(out.width() == 31);
      CHECK(out.height() == 26);
      for (double v : out.pixels()) CHECK((std::isfinite(v) && v >= 0.0));
    }
  }

  TEST_CASE("pipeline order, stage skipping and identity") {
    testing::Gen gen(6);
    const GrayImage img = gen.image(40, 32);
    PreprocessConfig cfg;
    std::vector<std::string> seen;
    const GrayImage out = preprocess_pipeline(img, cfg, [&](const std::string& s, const GrayImage&) {
      seen.push_back(s);
    });
    CHECK(seen == std::vector<std::string>{"butterworth", "homomorphic", "mean", "wiener", "gaussian"});
    const GrayImage manual = gaussian_filter(
        wiener_filter(mean_filter(homomorphic_filter(butterworth_filter(img)), 15), 10, 10), 2.0, 9);
    CHECK(out == manual);

    cfg.stages = {false, false, false, false, false};
    CHECK(preprocess_pipeline(img, cfg) == img);

    // Unit gains on the frequency stages leave the image unchanged too.
    PreprocessConfig unit;
    unit.stages = {true, true, false, false, false};
    unit.butterworth.cutoff = 1e12;
    unit.homomorphic.gamma_low = 1.0;
    unit.homomorphic.gamma_high = 1.0;
    CHECK(max_abs_diff(preprocess_pipeline(img, unit), img) < 1e-9);

    cfg = {};
    cfg.stages.wiener = false;
    seen.clear();
    preprocess_pipeline(img, cfg, [&](const std::string& s, const GrayImage&) { seen.push_back(s); });
    CHECK(seen == std::vector<std::string>{"butterworth", "homomorphic", "mean", "gaussian"});
  }

  TEST_CASE("smoothing reduces projection minima on noisy phantoms") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const GrayImage img = generate_phantom(small_phantom(seed)).image;
      const auto before = vertical_projection(img).values;
      const auto after = vertical_projection(preprocess_pipeline(img, {})).values;
      CHECK(local_minima(after, 0, after.size()).size() < local_minima(before, 0, before.size()).size());
    }
  }
}
