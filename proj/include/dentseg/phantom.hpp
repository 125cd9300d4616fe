#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dentseg/image.hpp"

namespace dentseg {

struct IntensityLevels {
  double air = 30.0;
  double gum = 120.0;
  double dentin = 200.0;
  double canal = 250.0;

  bool operator==(const IntensityLevels&) const = default;
};

struct PhantomSpec {
  std::size_t width = 500;
  std::size_t height = 700;
  std::size_t tooth_count = 4;
  double gap_width = 24.0;
  double tilt_degrees = 0.0;
  std::vector<std::size_t> canal_teeth{1};
  IntensityLevels levels;
  double noise_sigma = 8.0;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const PhantomSpec&) const = default;
};

/// Closed column interval [left, right] in pixel-index coordinates of the
/// untilted scene.
struct ColumnRange {
  double left;
  double right;

  double center() const { return 0.5 * (left + right); }
};

struct CanalLine {
  std::size_t tooth;
  double x_untilted;  // centerline column before the tilt
  double top;         // row extent before the tilt
  double bottom;
  double slope;       // column change per row after the tilt, tan(tilt)
  double col_at_center_row;  // centerline column on the middle row after the tilt
};

/// Ground truth in the untilted frame plus the tilt that maps it onto the
/// image (rotation about the image center, as `rotate` does).
struct PhantomTruth {
  std::size_t width = 0;
  std::size_t height = 0;
  double tilt_degrees = 0.0;
  double tooth_top = 0.0;  // rows spanned by the teeth, untilted
  double tooth_bottom = 0.0;
  std::vector<ColumnRange> teeth;
  std::vector<ColumnRange> gaps;
  std::vector<double> gap_centers;
  std::vector<CanalLine> canals;
};

/// Rasterized masks (255 inside, 0 outside) sampled at pixel centers.
GrayImage gap_mask(const PhantomTruth& truth, std::size_t gap);
GrayImage tooth_mask(const PhantomTruth& truth, std::size_t tooth);

struct Phantom {
  GrayImage image;
  PhantomTruth truth;
};

/// Noise is drawn from std::mt19937_64 seeded with spec.seed, one normal
/// deviate per pixel in row-major order via Box-Muller: u1, u2 are
/// (next() >> 11) * 2^-53; r = sqrt(-2 ln(1 - u1)); the pair
/// (r cos 2 pi u2, r sin 2 pi u2) feeds two consecutive pixels.
Phantom generate_phantom(const PhantomSpec& spec);

/// The standard normal stream used by generate_phantom.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// 51 specs covering 2..5 teeth, tilts in [-15, 15] degrees, widths in
/// [450, 650] and heights in [600, 850], noise sigma 8.
std::vector<PhantomSpec> default_batch_specs();

struct ManifestEntry {
  std::filesystem::path image_path;  // as written in the manifest (relative to it)
  std::filesystem::path truth_path;
  PhantomSpec spec;
};

struct Manifest {
  std::filesystem::path directory;  // manifest location; entries resolve against it
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const std::filesystem::path& p) const { return directory / p; }
};

struct BatchOptions {
  bool write_masks = false;
  bool overwrite = false;
};

/// Renders every spec into `out_dir` (phantom_NNN.pgm + phantom_NNN.json,
/// optional masks) and writes manifest.json. Returns the manifest.
Manifest write_batch(const std::vector<PhantomSpec>& specs, const std::filesystem::path& out_dir,
                     const BatchOptions& options = {});

}  // namespace dentseg
