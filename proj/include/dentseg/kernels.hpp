#pragma once

#include <cstddef>

namespace dentseg::kernels {

// Inner loops shared by the filters and the projection. Every variant must
// produce bit-identical results to the scalar reference: each output element
// is computed with the same sequence of IEEE operations, and no variant uses
// fused multiply-add.
struct KernelTable {
  const char* name;

  // dst[i] += src[i]
  void (*accumulate)(double* dst, const double* src, std::size_t n);

  // out[i] = src[i] * src[i]
  void (*square)(double* out, const double* src, std::size_t n);

  // data[i] /= divisor
  void (*divide)(double* data, double divisor, std::size_t n);

  // Vertical pass of a symmetric kernel. rows[radius] is the center row,
  // rows[radius - k] and rows[radius + k] the rows at distance k:
  //   out[i] = w[0] * rows[r][i] + sum_{k=1..r} w[k] * (rows[r-k][i] + rows[r+k][i])
  void (*symmetric_rows)(double* out, const double* const* rows, const double* weights,
                         std::size_t radius, std::size_t n);

  // Horizontal pass of a symmetric kernel over a line padded by `radius`
  // samples on each side (padded[radius] is output index 0).
  void (*symmetric_line)(double* out, const double* padded, const double* weights,
                         std::size_t radius, std::size_t n);

  // out[i] = sum_{k=0..len-1} padded[i + k], accumulated in k order.
  void (*window_sum)(double* out, const double* padded, std::size_t len, std::size_t n);

  // Local moments from window sums: mean = s / count,
  // var = max(s2 / count - mean * mean, 0).
  void (*moments)(double* mean, double* var, const double* s, const double* s2, double count,
                  std::size_t n);

  // Adaptive Wiener update:
  //   out = mean + (max(var - noise, 0) / max(var, noise)) * (in - mean)
  // with out = mean where max(var, noise) == 0.
  void (*wiener_combine)(double* out, const double* in, const double* mean, const double* var,
                         double noise, std::size_t n);

  // Interleaved complex data (re, im) scaled by a real gain per element.
  void (*scale_complex)(double* data, const double* gains, std::size_t n);
};

const KernelTable& scalar();

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2();

// The table used by the library. Chosen once: AVX2 when available, unless
// the environment variable DENTSEG_KERNELS=scalar is set.
const KernelTable& active();

// Overrides the active table (tests and benchmarking).
void set_active(const KernelTable& table);

}  // namespace dentseg::kernels
