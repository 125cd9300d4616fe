#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dentseg/image.hpp"

namespace dentseg {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads 8-bit binary PGM (P5) or 8-bit PNG. Color PNGs are reduced to
/// luminance Y = 0.299 R + 0.587 G + 0.114 B.
GrayImage load_image(const std::filesystem::path& path);

/// Writes PGM or PNG depending on the extension (.pgm / .png). Values are
/// clamped to [0, 255] and rounded half up.
void save_image(const GrayImage& img, const std::filesystem::path& path);

std::uint8_t quantize(double value);

/// Interleaved 8-bit RGB raster for overlays.
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> data;  // 3 bytes per pixel, row-major

  std::uint8_t* pixel(std::size_t x, std::size_t y) { return &data[(y * width + x) * 3]; }
  const std::uint8_t* pixel(std::size_t x, std::size_t y) const {
    return &data[(y * width + x) * 3];
  }
};

void save_rgb_png(const RgbImage& img, const std::filesystem::path& path);

}  // namespace dentseg
