#include "dentseg/image.hpp"

#include <algorithm>
#include <numbers>
#include <string>

namespace dentseg {
namespace {

void check_dims(std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) {
    throw std::invalid_argument("image dimensions must be positive, got " + std::to_string(width) +
                                "x" + std::to_string(height));
  }
}

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

GrayImage::GrayImage(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  if (!std::isfinite(fill) || fill < 0.0) throw std::invalid_argument("fill must be finite and >= 0");
  pixels_.assign(width * height, fill);
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != width * height) {
    throw std::invalid_argument("pixel buffer size " + std::to_string(pixels_.size()) +
                                " does not match " + std::to_string(width) + "x" +
                                std::to_string(height));
  }
  for (double v : pixels_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("pixel values must be finite and >= 0");
    }
  }
}

double GrayImage::sum() const {
  double total = 0.0;
  for (double v : pixels_) total += v;
  return total;
}

GrayImage mirror_horizontal(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t y = 0; y < img.height(); ++y) {
    auto src = img.row(y);
    auto dst = out.row(y);
    for (std::size_t x = 0; x < img.width(); ++x) dst[x] = src[img.width() - 1 - x];
  }
  return out;
}

Band middle_band(std::size_t height) {
  if (height < 3) throw std::invalid_argument("image too short for a middle band (h < 3)");
  // round(h/3) and round(2h/3) with halves rounded up, in integer arithmetic.
  const std::size_t start = (2 * height + 3) / 6;
  const std::size_t last = (4 * height + 3) / 6;
  return Band{start, last + 1};
}

Band middle_band(const GrayImage& img) { return middle_band(img.height()); }

Point rotate_point(Point p, double degrees, std::size_t width, std::size_t height) {
  const double rad = deg_to_rad(degrees);
  const double c = std::cos(rad);
  const double s = std::sin(rad);
  const double cx = (static_cast<double>(width) - 1.0) / 2.0;
  const double cy = (static_cast<double>(height) - 1.0) / 2.0;
  const double dx = p.x - cx;
  const double dy = p.y - cy;
  return {cx + dx * c + dy * s, cy - dx * s + dy * c};
}

namespace detail {

GrayImage rotate_bilinear(const GrayImage& img, double radians) {
  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  const double cx = (static_cast<double>(w) - 1.0) / 2.0;
  const double cy = (static_cast<double>(h) - 1.0) / 2.0;
  const auto iw = static_cast<long>(w);
  const auto ih = static_cast<long>(h);

  auto sample = [&](long x, long y) -> double {
    if (x < 0 || y < 0 || x >= iw || y >= ih) return 0.0;
    return img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
  };

  GrayImage out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    const double dy = static_cast<double>(y) - cy;
    auto dst = out.row(y);
    for (std::size_t x = 0; x < w; ++x) {
      const double dx = static_cast<double>(x) - cx;
      const double sx = cx + dx * c - dy * s;
      const double sy = cy + dx * s + dy * c;
      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      const auto x0 = static_cast<long>(fx0);
      const auto y0 = static_cast<long>(fy0);
      if (x0 < -1 || y0 < -1 || x0 >= iw || y0 >= ih) {
        dst[x] = 0.0;
        continue;
      }
      const double ax = sx - fx0;
      const double ay = sy - fy0;
      const double top = (1.0 - ax) * sample(x0, y0) + ax * sample(x0 + 1, y0);
      const double bottom = (1.0 - ax) * sample(x0, y0 + 1) + ax * sample(x0 + 1, y0 + 1);
      dst[x] = std::max(0.0, (1.0 - ay) * top + ay * bottom);
    }
  }
  return out;
}

}  // namespace detail

GrayImage rotate(const GrayImage& img, double degrees) {
  if (!std::isfinite(degrees)) throw std::invalid_argument("rotation angle must be finite");
  if (std::abs(degrees) > kMaxRotationDegrees) {
    throw std::invalid_argument("rotation angle " + std::to_string(degrees) +
                                " exceeds the +/-45 degree guard");
  }
  if (degrees == 0.0) return img;
  return detail::rotate_bilinear(img, deg_to_rad(degrees));
}

}  // namespace dentseg
