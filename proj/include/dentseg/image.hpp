#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace dentseg {

/// Round half up; the single rounding convention used throughout the library.
inline double round_half_up(double x) { return std::floor(x + 0.5); }

inline long round_half_up_int(double x) { return static_cast<long>(std::floor(x + 0.5)); }

/// Floating-point grayscale raster, row-major. Intensities are finite and
/// non-negative; 8-bit files map onto [0, 255].
class GrayImage {
 public:
  GrayImage(std::size_t width, std::size_t height, double fill = 0.0);
  GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }

  double at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  double& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }

  std::span<const double> row(std::size_t y) const {
    return {pixels_.data() + y * width_, width_};
  }
  std::span<double> row(std::size_t y) { return {pixels_.data() + y * width_, width_}; }

  std::span<const double> pixels() const { return pixels_; }
  std::span<double> pixels() { return pixels_; }

  double sum() const;
  double mean() const { return sum() / static_cast<double>(pixels_.size()); }

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> pixels_;
};

/// Horizontal mirror (column x becomes w-1-x).
GrayImage mirror_horizontal(const GrayImage& img);

/// Half-open row interval [row_start, row_end).
struct Band {
  std::size_t row_start;
  std::size_t row_end;

  std::size_t height() const { return row_end - row_start; }
  bool operator==(const Band&) const = default;
};

/// Middle third of the image rows, scanned from round(h/3) through
/// round(2h/3) inclusive.
Band middle_band(const GrayImage& img);
Band middle_band(std::size_t height);

/// Rotate about the image center with bilinear sampling; samples falling
/// outside the source read as 0. Positive angles turn a vertical line into
/// one whose column grows with row by tan(degrees), i.e. counter-clockwise
/// on screen. |degrees| must not exceed 45.
GrayImage rotate(const GrayImage& img, double degrees);

inline constexpr double kMaxRotationDegrees = 45.0;

struct Point {
  double x;
  double y;
  bool operator==(const Point&) const = default;
};

/// Map a point through the same rotation `rotate` applies to pixel content.
Point rotate_point(Point p, double degrees, std::size_t width, std::size_t height);

namespace detail {
// Bilinear rotation without the angle guard; `rotate` forwards here.
GrayImage rotate_bilinear(const GrayImage& img, double radians);
}  // namespace detail

}  // namespace dentseg
