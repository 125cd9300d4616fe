// Compiled with -mavx2 only; entered through the dispatch table after a
// runtime CPU check. Remainders fall through to the same scalar expressions
// so results match the reference bit-for-bit.

#include <immintrin.h>

#include <algorithm>

#include "dentseg/kernels.hpp"

namespace dentseg::kernels {
namespace {

constexpr std::size_t kLanes = 4;

void accumulate(double* dst, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_loadu_pd(src + i)));
  }
  for (; i < n; ++i) dst[i] += src[i];
}

void square(double* out, const double* src, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d v = _mm256_loadu_pd(src + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(v, v));
  }
  for (; i < n; ++i) out[i] = src[i] * src[i];
}

void divide(double* data, double divisor, std::size_t n) {
  const __m256d d = _mm256_set1_pd(divisor);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(data + i, _mm256_div_pd(_mm256_loadu_pd(data + i), d));
  }
  for (; i < n; ++i) data[i] /= divisor;
}

void symmetric_rows(double* out, const double* const* rows, const double* weights,
                    std::size_t radius, std::size_t n) {
  const double* center = rows[radius];
  const __m256d w0 = _mm256_set1_pd(weights[0]);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d acc = _mm256_mul_pd(w0, _mm256_loadu_pd(center + i));
    for (std::size_t k = 1; k <= radius; ++k) {
      const __m256d pair =
          _mm256_add_pd(_mm256_loadu_pd(rows[radius - k] + i), _mm256_loadu_pd(rows[radius + k] + i));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(weights[k]), pair));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = weights[0] * center[i];
    for (std::size_t k = 1; k <= radius; ++k) {
      acc += weights[k] * (rows[radius - k][i] + rows[radius + k][i]);
    }
    out[i] = acc;
  }
}

void symmetric_line(double* out, const double* padded, const double* weights,
                    std::size_t radius, std::size_t n) {
  const __m256d w0 = _mm256_set1_pd(weights[0]);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const double* c = padded + i + radius;
    __m256d acc = _mm256_mul_pd(w0, _mm256_loadu_pd(c));
    for (std::size_t k = 1; k <= radius; ++k) {
      const __m256d pair = _mm256_add_pd(_mm256_loadu_pd(c - k), _mm256_loadu_pd(c + k));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(weights[k]), pair));
    }
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    const double* c = padded + i + radius;
    double acc = weights[0] * c[0];
    for (std::size_t k = 1; k <= radius; ++k) {
      acc += weights[k] * (c[-static_cast<std::ptrdiff_t>(k)] + c[k]);
    }
    out[i] = acc;
  }
}

void window_sum(double* out, const double* padded, std::size_t len, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d acc = _mm256_loadu_pd(padded + i);
    for (std::size_t k = 1; k < len; ++k) acc = _mm256_add_pd(acc, _mm256_loadu_pd(padded + i + k));
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < n; ++i) {
    double acc = padded[i];
    for (std::size_t k = 1; k < len; ++k) acc += padded[i + k];
    out[i] = acc;
  }
}

void moments(double* mean, double* var, const double* s, const double* s2, double count,
             std::size_t n) {
  const __m256d c = _mm256_set1_pd(count);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d m = _mm256_div_pd(_mm256_loadu_pd(s + i), c);
    const __m256d v = _mm256_sub_pd(_mm256_div_pd(_mm256_loadu_pd(s2 + i), c), _mm256_mul_pd(m, m));
    _mm256_storeu_pd(mean + i, m);
    // max_pd(zero, v) returns v unless 0 > v, matching std::max(v, 0.0).
    _mm256_storeu_pd(var + i, _mm256_max_pd(zero, v));
  }
  for (; i < n; ++i) {
    const double m = s[i] / count;
    const double v = s2[i] / count - m * m;
    mean[i] = m;
    var[i] = std::max(v, 0.0);
  }
}

void wiener_combine(double* out, const double* in, const double* mean, const double* var,
                    double noise, std::size_t n) {
  const __m256d nz = _mm256_set1_pd(noise);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d v = _mm256_loadu_pd(var + i);
    const __m256d m = _mm256_loadu_pd(mean + i);
    const __m256d denom = _mm256_max_pd(nz, v);
    const __m256d gain = _mm256_div_pd(_mm256_max_pd(zero, _mm256_sub_pd(v, nz)), denom);
    const __m256d upd =
        _mm256_add_pd(m, _mm256_mul_pd(gain, _mm256_sub_pd(_mm256_loadu_pd(in + i), m)));
    const __m256d positive = _mm256_cmp_pd(denom, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(m, upd, positive));
  }
  for (; i < n; ++i) {
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
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // (g0, g0, g1, g1) against (re0, im0, re1, im1)
    const __m256d g = _mm256_set_pd(gains[i + 1], gains[i + 1], gains[i], gains[i]);
    _mm256_storeu_pd(data + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(data + 2 * i), g));
  }
  for (; i < n; ++i) {
    data[2 * i] *= gains[i];
    data[2 * i + 1] *= gains[i];
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{
      "avx2",        accumulate, square,  divide,         symmetric_rows,
      symmetric_line, window_sum, moments, wiener_combine, scale_complex,
  };
  return table;
}

}  // namespace dentseg::kernels
