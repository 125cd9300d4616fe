#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dentseg/image.hpp"

namespace testing {

// Hand-rolled generators; every property test seeds its own engine so a
// failure reproduces from the printed seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  std::size_t size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(engine_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  bool coin() { return size(0, 1) == 1; }

  dentseg::GrayImage image(std::size_t w, std::size_t h, double lo = 0.0, double hi = 255.0) {
    std::vector<double> px(w * h);
    for (double& v : px) v = real(lo, hi);
    return {w, h, std::move(px)};
  }

  // Integer-valued pixels, like decoded 8-bit files.
  dentseg::GrayImage byte_image(std::size_t w, std::size_t h) {
    std::vector<double> px(w * h);
    for (double& v : px) v = static_cast<double>(integer(0, 255));
    return {w, h, std::move(px)};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("dentseg_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
