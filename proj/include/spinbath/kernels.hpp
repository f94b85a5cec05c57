#pragma once

// Data-parallel inner loops. Every kernel has a portable scalar reference
// implementation and, on x86-64, an AVX2/FMA variant. The active table is
// chosen once at runtime from CPUID; SPINBATH_SIMD=scalar|avx2 overrides it.

#include <cstddef>
#include <cstdint>

#include "spinbath/common.hpp"

namespace spinbath::kernels {

/// Coefficients of one two-spin term -(Jx SxSx + Jy SySy + Jz SzSz) in the
/// up/down basis, split by whether the two bits agree.
struct BondCoefficients {
  double equal_diag;    // <aa|h|aa>
  double equal_flip;    // <bb|h|aa>, b = flipped a
  double differ_diag;   // <ab|h|ab>
  double differ_flip;   // <ba|h|ab>
};

struct KernelTable {
  const char* name;

  /// out[k] += diag(k) * in[k] + flip(k) * in[k ^ (mask_i | mask_j)]
  void (*bond_apply)(const cplx* in, cplx* out, std::uint64_t dim,
                     std::uint64_t mask_i, std::uint64_t mask_j,
                     const BondCoefficients& c);

  /// prev[k] = a * w[k] + b * cur[k] - prev[k]   (Chebyshev recurrence)
  void (*cheb_step)(const cplx* w, const cplx* cur, cplx* prev, double a,
                    double b, std::uint64_t dim);

  /// y[k] += alpha * x[k]
  void (*axpy)(cplx alpha, const cplx* x, cplx* y, std::uint64_t dim);

  /// x[k] *= alpha
  void (*scale)(cplx alpha, cplx* x, std::uint64_t dim);

  /// sum_k conj(x[k]) * y[k]
  cplx (*dot)(const cplx* x, const cplx* y, std::uint64_t dim);

  /// sum_k |x[k]|^2
  double (*norm2)(const cplx* x, std::uint64_t dim);
};

const KernelTable& scalar_table();

/// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// Table used by the library.
const KernelTable& active();

/// Force a table by name ("scalar" or "avx2"). Returns false if unavailable.
bool select(const char* name);

}  // namespace spinbath::kernels
