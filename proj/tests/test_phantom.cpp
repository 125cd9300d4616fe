#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "dentseg/io.hpp"
#include "dentseg/json.hpp"
#include "dentseg/phantom.hpp"
#include "dentseg/projection.hpp"
#include "support.hpp"

using namespace dentseg;

namespace {

PhantomSpec golden_spec() {
  PhantomSpec s;
  s.width = 96;
  s.height = 80;
  s.tooth_count = 3;
  s.gap_width = 6.0;
  s.tilt_degrees = 5.0;
  s.canal_teeth = {0, 2};
  s.noise_sigma = 8.0;
  s.seed = 20240;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_SUITE("phantom") {
  TEST_CASE("std::mt19937_64 gives the 10000th value the C++ standard requires") {
    std::mt19937_64 e;
    e.discard(9999);
    CHECK(e() == 9981545732273789042ULL);
  }

  TEST_CASE("normal stream is a Box-Muller pair stream") {
    NormalStream n(5);
    std::mt19937_64 e(5);
    const double u1 = double(e() >> 11) / 9007199254740992.0;
    const double u2 = double(e() >> 11) / 9007199254740992.0;
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    CHECK(n.next() == r * std::cos(2.0 * std::numbers::pi * u2));
    CHECK(n.next() == r * std::sin(2.0 * std::numbers::pi * u2));

    NormalStream big(9);
    double sum = 0.0, sq = 0.0;
    const int count = 200000;
    for (int i = 0; i < count; ++i) {
      const double v = big.next();
      sum += v;
      sq += v * v;
    }
    CHECK(std::abs(sum / count) < 0.01);
    CHECK(std::abs(sq / count - 1.0) < 0.02);
  }

  TEST_CASE("generation is deterministic") {
    const PhantomSpec s = golden_spec();
    CHECK(generate_phantom(s).image == generate_phantom(s).image);
    PhantomSpec other = s;
    other.seed = s.seed + 1;
    CHECK_FALSE(generate_phantom(s).image == generate_phantom(other).image);
  }

  TEST_CASE("golden phantom file") {
    const GrayImage golden = load_image(std::filesystem::path(DENTSEG_TEST_DATA) / "golden_phantom.pgm");
    const GrayImage img = generate_phantom(golden_spec()).image;
    REQUIRE(golden.width() == img.width());
    REQUIRE(golden.height() == img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
      CHECK(golden.pixels()[i] == double(quantize(img.pixels()[i])));
    }
  }

  TEST_CASE("noise-free pixels are averages of four level samples") {
    PhantomSpec s = golden_spec();
    s.noise_sigma = 0.0;
    const IntensityLevels l = s.levels;
    const std::vector<double> levels{l.air, l.gum, l.dentin, l.canal};
    std::set<double> allowed;
    for (double a : levels)
      for (double b : levels)
        for (double c : levels)
          for (double d : levels) allowed.insert((a + b + c + d) / 4.0);
    const GrayImage img = generate_phantom(s).image;
    for (double v : img.pixels()) {
      const auto it = allowed.lower_bound(v - 1e-9);
      CHECK((it != allowed.end() && std::abs(*it - v) <= 1e-9));
    }
  }

  TEST_CASE("noisy pixels stay within [0, 255]") {
    PhantomSpec s = golden_spec();
    s.noise_sigma = 60.0;
    const GrayImage img = generate_phantom(s).image;
    for (double v : img.pixels()) CHECK((v >= 0.0 && v <= 255.0));
  }

  TEST_CASE("single tooth: no gaps and one bright column block") {
    PhantomSpec s;
    s.width = 200;
    s.height = 240;
    s.tooth_count = 1;
    s.canal_teeth = {0};
    s.noise_sigma = 0.0;
    const Phantom ph = generate_phantom(s);
    CHECK(ph.truth.gaps.empty());
    REQUIRE(ph.truth.teeth.size() == 1);
    const auto v = vertical_projection(ph.image).values;
    const auto arg = double(std::max_element(v.begin(), v.end()) - v.begin());
    CHECK(std::abs(arg - ph.truth.canals[0].x_untilted) <= 7.0);
    // Columns inside the tooth outweigh every column outside it.
    const ColumnRange t = ph.truth.teeth[0];
    double inside_min = 1e300, outside_max = 0.0;
    for (std::size_t x = 0; x < v.size(); ++x) {
      if (double(x) > t.left + 2 && double(x) < t.right - 2) inside_min = std::min(inside_min, v[x]);
      if (double(x) < t.left || double(x) > t.right) outside_max = std::max(outside_max, v[x]);
    }
    CHECK(inside_min > outside_max);
  }

  TEST_CASE("truth layout") {
    PhantomSpec s;
    s.width = 480;
    s.height = 600;
    s.tooth_count = 4;
    s.gap_width = 20.0;
    const PhantomTruth t = generate_phantom(s).truth;
    REQUIRE(t.teeth.size() == 4);
    REQUIRE(t.gaps.size() == 3);
    for (std::size_t g = 0; g < 3; ++g) {
      CHECK(t.gaps[g].left == t.teeth[g].right);
      CHECK(t.gaps[g].right == t.teeth[g + 1].left);
      CHECK(t.gaps[g].right - t.gaps[g].left == doctest::Approx(20.0));
      CHECK(t.gap_centers[g] == doctest::Approx(120.0 * double(g + 1) - 0.5));
    }
    CHECK(t.tooth_top < t.tooth_bottom);
  }

  TEST_CASE("four-tooth projection minima match the gap centers") {
    PhantomSpec s;
    s.width = 480;
    s.height = 600;
    s.tooth_count = 4;
    s.noise_sigma = 0.0;
    const Phantom ph = generate_phantom(s);
    const auto v = vertical_projection(ph.image).values;
    const auto mins = local_minima(v, 24, v.size() - 24);
    REQUIRE(mins.size() == 3);
    for (std::size_t g = 0; g < 3; ++g) CHECK(std::abs(double(mins[g]) - ph.truth.gap_centers[g]) <= 2.0);
  }

  TEST_CASE("masks are disjoint and ordered left to right") {
    for (double tilt : {0.0, -9.0, 13.0}) {
      PhantomSpec s = golden_spec();
      s.width = 240;
      s.height = 200;
      s.gap_width = 12.0;
      s.tilt_degrees = tilt;
      const PhantomTruth t = generate_phantom(s).truth;
      std::vector<GrayImage> masks;
      for (std::size_t k = 0; k < t.teeth.size(); ++k) {
        masks.push_back(tooth_mask(t, k));
        if (k < t.gaps.size()) masks.push_back(gap_mask(t, k));
      }
      std::vector<double> centroid;
      for (const auto& m : masks) {
        double sx = 0.0, n = 0.0;
        for (std::size_t y = 0; y < m.height(); ++y)
          for (std::size_t x = 0; x < m.width(); ++x)
            if (m.at(x, y) > 0) {
              sx += double(x);
              n += 1.0;
            }
        REQUIRE(n > 0.0);
        centroid.push_back(sx / n);
      }
      CHECK(std::is_sorted(centroid.begin(), centroid.end()));
      for (std::size_t i = 0; i < masks.size(); ++i)
        for (std::size_t j = i + 1; j < masks.size(); ++j)
          for (std::size_t p = 0; p < masks[i].size(); ++p)
            REQUIRE_FALSE((masks[i].pixels()[p] > 0 && masks[j].pixels()[p] > 0));
      CHECK_THROWS(gap_mask(t, t.gaps.size()));
      CHECK_THROWS(tooth_mask(t, t.teeth.size()));
    }
  }

  TEST_CASE("canal centerline follows the tilt") {
    for (double tilt : {-12.0, 0.0, 8.0}) {
      PhantomSpec s;
      s.width = 500;
      s.height = 700;
      s.tooth_count = 4;
      s.canal_teeth = {2};
      s.tilt_degrees = tilt;
      s.noise_sigma = 0.0;
      const Phantom ph = generate_phantom(s);
      const CanalLine& c = ph.truth.canals.at(0);
      CHECK(c.slope == doctest::Approx(std::tan(tilt * std::numbers::pi / 180.0)));

      const double threshold = 0.5 * (s.levels.dentin + s.levels.canal);
      const Band band = middle_band(ph.image);
      double sr = 0, sc = 0, src = 0, srr = 0, n = 0;
      for (std::size_t y = band.row_start; y < band.row_end; ++y) {
        const double guess = c.col_at_center_row + c.slope * (double(y) - 349.5);
        double sum = 0.0, count = 0.0;
        for (long x = long(guess) - 30; x <= long(guess) + 30; ++x) {
          if (ph.image.at(std::size_t(x), y) > threshold) {
            sum += double(x);
            count += 1.0;
          }
        }
        REQUIRE(count > 0.0);
        const double col = sum / count;
        if (y == 350) CHECK(std::abs(col - (c.col_at_center_row + 0.5 * c.slope)) <= 1.0);
        const double r = double(y);
        sr += r;
        sc += col;
        src += r * col;
        srr += r * r;
        n += 1.0;
      }
      const double slope = (n * src - sr * sc) / (n * srr - sr * sr);
      CHECK(std::abs(slope - c.slope) <= 0.01);
    }
  }

  TEST_CASE("default batch") {
    const auto specs = default_batch_specs();
    REQUIRE(specs.size() == 51);
    std::set<std::size_t> counts;
    for (const auto& s : specs) {
      CHECK_NOTHROW(s.validate());
      CHECK((s.width >= 450 && s.width <= 650));
      CHECK((s.height >= 600 && s.height <= 850));
      CHECK(std::abs(s.tilt_degrees) <= 15.0);
      CHECK(s.noise_sigma == 8.0);
      counts.insert(s.tooth_count);
    }
    CHECK(counts == std::set<std::size_t>{2, 3, 4, 5});
    CHECK(default_batch_specs() == specs);
  }

  TEST_CASE("spec validation") {
    auto bad = [](auto&& mutate) {
      PhantomSpec s;
      mutate(s);
      return s;
    };
    CHECK_NOTHROW(PhantomSpec{}.validate());
    CHECK_THROWS(bad([](PhantomSpec& s) { s.width = 31; }).validate());
    CHECK_THROWS(bad([](PhantomSpec& s) { s.tooth_count = 0; }).validate());
    CHECK_THROWS(bad([](PhantomSpec& s) { s.tooth_count = 7; }).validate());
    CHECK_THROWS(bad([](PhantomSpec& s) { s.gap_width = 1.0; }).validate());
    CHECK_THROWS(bad([](PhantomSpec& s) {
                   s.width = 100;
                   s.tooth_count = 6;
                 }).validate());
    CHECK_THROWS(bad([](PhantomSpec& s) { s.tilt_degrees = 45.5; }).validate());
    CHECK_THROWS(bad([](PhantomSpec& s) { s.tilt_degrees = std::nan(""); }).validate());
    CHECK_THROWS(bad([](PhantomSpec& s) { s.canal_teeth = {4}; }).validate());
    CHECK_THROWS(bad([](PhantomSpec& s) { s.levels.gum = 10.0; }).validate());
    CHECK_THROWS(bad([](PhantomSpec& s) { s.levels.canal = 300.0; }).validate());
    CHECK_THROWS(bad([](PhantomSpec& s) { s.noise_sigma = -1.0; }).validate());
    CHECK_THROWS(generate_phantom(bad([](PhantomSpec& s) { s.tooth_count = 0; })));
  }

  TEST_CASE("batch writing is reproducible and round-trips") {
    std::vector<PhantomSpec> specs(3, golden_spec());
    specs[1].tilt_degrees = -4.0;
    specs[2].tooth_count = 2;
    specs[2].canal_teeth = {1};
    const auto a = testing::scratch_dir("batch_a");
    const auto b = testing::scratch_dir("batch_b");
    const Manifest ma = write_batch(specs, a, {true, false});
    write_batch(specs, b, {true, false});
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
      CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
    CHECK(std::filesystem::exists(a / "phantom_000_gap1.pgm"));
    CHECK(std::filesystem::exists(a / "phantom_002_tooth1.pgm"));

    const Manifest loaded = load_manifest(a / "manifest.json");
    REQUIRE(loaded.entries.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(loaded.entries[i].spec == specs[i]);
      CHECK(loaded.entries[i].image_path == ma.entries[i].image_path);
      const Phantom ph = generate_phantom(specs[i]);
      const PhantomTruth t = load_truth(loaded.resolve(loaded.entries[i].truth_path));
      CHECK(t.gap_centers == ph.truth.gap_centers);
      CHECK(t.tilt_degrees == ph.truth.tilt_degrees);
      REQUIRE(t.canals.size() == ph.truth.canals.size());
      CHECK(t.canals[0].col_at_center_row == ph.truth.canals[0].col_at_center_row);
      CHECK(load_image(loaded.resolve(loaded.entries[i].image_path)).width() == specs[i].width);
    }

    CHECK_THROWS(write_batch(specs, a));
    CHECK_NOTHROW(write_batch(specs, a, {false, true}));
    CHECK_THROWS(write_batch({}, testing::scratch_dir("batch_empty")));
  }

  TEST_CASE("spec JSON fills missing keys with defaults") {
    const PhantomSpec s = nlohmann::json::parse(R"({"tooth_count": 3, "tilt_degrees": -2.5})").get<PhantomSpec>();
    PhantomSpec expect;
    expect.tooth_count = 3;
    expect.tilt_degrees = -2.5;
    CHECK(s == expect);
    const nlohmann::json j = golden_spec();
    CHECK(j.get<PhantomSpec>() == golden_spec());
  }
}
