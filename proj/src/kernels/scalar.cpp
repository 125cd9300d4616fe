#include <algorithm>

#include "dentseg/kernels.hpp"

namespace dentseg::kernels {
namespace {

void accumulate(double* dst, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void square(double* out, const double* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = src[i] * src[i];
}

void divide(double* data, double divisor, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) data[i] /= divisor;
}

void symmetric_rows(double* out, const double* const* rows, const double* weights,
                    std::size_t radius, std::size_t n) {
  const double* center = rows[radius];
  for (std::size_t i = 0; i < n; ++i) {
    double acc = weights[0] * center[i];
    for (std::size_t k = 1; k <= radius; ++k) {
      acc += weights[k] * (rows[radius - k][i] + rows[radius + k][i]);
    }
    out[i] = acc;
  }
}

void symmetric_line(double* out, const double* padded, const double* weights,
                    std::size_t radius, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* c = padded + i + radius;
    double acc = weights[0] * c[0];
    for (std::size_t k = 1; k <= radius; ++k) {
      acc += weights[k] * (c[-static_cast<std::ptrdiff_t>(k)] + c[k]);
    }
    out[i] = acc;
  }
}

void window_sum(double* out, const double* padded, std::size_t len, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = padded[i];
    for (std::size_t k = 1; k < len; ++k) acc += padded[i + k];
    out[i] = acc;
  }
}

void moments(double* mean, double* var, const double* s, const double* s2, double count,
             std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double m = s[i] / count;
    const double v = s2[i] / count - m * m;
    mean[i] = m;
    var[i] = std::max(v, 0.0);
  }
}

void wiener_combine(double* out, const double* in, const double* mean, const double* var,
                    double noise, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = std::max(var[i], noise);
    if (denom > 0.0) {
      const double gain = std::max(var[i] - noise, 0.0) / denom;
      out[i] = mean[i] + gain * (in[i] - mean[i]);
    } else {
      out[i] = mean[i];
    }
  }
}

void scale_complex(double* data, const double* gains, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    data[2 * i] *= gains[i];
    data[2 * i + 1] *= gains[i];
  }
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{
      "scalar",      accumulate, square,  divide,         symmetric_rows,
      symmetric_line, window_sum, moments, wiener_combine, scale_complex,
  };
  return table;
}

}  // namespace dentseg::kernels
