// AVX2/FMA kernels. Compiled with -mavx2 -mfma; only reachable through
// dispatch.cpp after a CPUID check. One __m256d holds two complex doubles.

#include "spinbath/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace spinbath::kernels {
namespace {

inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

// alpha * x for two complex lanes.
inline __m256d cmul(__m256d re, __m256d im, __m256d x) {
  const __m256d swapped = _mm256_permute_pd(x, 0b0101);
  return _mm256_fmaddsub_pd(re, x, _mm256_mul_pd(im, swapped));
}

void bond_apply(const cplx* in, cplx* out, std::uint64_t dim, std::uint64_t mask_i,
                std::uint64_t mask_j, const BondCoefficients& c) {
  const std::uint64_t flip = mask_i | mask_j;
  auto equal = [&](std::uint64_t k) { return ((k & mask_i) != 0) == ((k & mask_j) != 0); };
  if (dim < 2) {
    for (std::uint64_t k = 0; k < dim; ++k) {
      const bool e = equal(k);
      out[k] += (e ? c.equal_diag : c.differ_diag) * in[k] +
                (e ? c.equal_flip : c.differ_flip) * in[k ^ flip];
    }
    return;
  }
  const __m256d eq_d = _mm256_set1_pd(c.equal_diag);
  const __m256d eq_f = _mm256_set1_pd(c.equal_flip);
  const __m256d ne_d = _mm256_set1_pd(c.differ_diag);
  const __m256d ne_f = _mm256_set1_pd(c.differ_flip);

  if ((flip & 1) == 0) {
    // Both lanes share the bit pattern at the bond sites and the partner
    // pair is contiguous.
    for (std::uint64_t k = 0; k < dim; k += 2) {
      const bool e = equal(k);
      const __m256d d = e ? eq_d : ne_d;
      const __m256d f = e ? eq_f : ne_f;
      __m256d acc = load2(out + k);
      acc = _mm256_fmadd_pd(d, load2(in + k), acc);
      acc = _mm256_fmadd_pd(f, load2(in + (k ^ flip)), acc);
      store2(out + k, acc);
    }
    return;
  }

  // Bit 0 is a bond site: lanes differ and the partner pair is reversed.
  for (std::uint64_t k = 0; k < dim; k += 2) {
    const bool e0 = equal(k);
    const bool e1 = equal(k + 1);
    const double d0 = e0 ? c.equal_diag : c.differ_diag;
    const double d1 = e1 ? c.equal_diag : c.differ_diag;
    const double f0 = e0 ? c.equal_flip : c.differ_flip;
    const double f1 = e1 ? c.equal_flip : c.differ_flip;
    const __m256d d = _mm256_set_pd(d1, d1, d0, d0);
    const __m256d f = _mm256_set_pd(f1, f1, f0, f0);
    const std::uint64_t p = (k ^ flip) & ~std::uint64_t{1};
    __m256d partner = load2(in + p);
    partner = _mm256_permute2f128_pd(partner, partner, 0x01);
    __m256d acc = load2(out + k);
    acc = _mm256_fmadd_pd(d, load2(in + k), acc);
    acc = _mm256_fmadd_pd(f, partner, acc);
    store2(out + k, acc);
  }
}

void cheb_step(const cplx* w, const cplx* cur, cplx* prev, double a, double b,
               std::uint64_t dim) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::uint64_t k = 0;
  for (; k + 2 <= dim; k += 2) {
    const __m256d t = _mm256_fmsub_pd(vb, load2(cur + k), load2(prev + k));
    store2(prev + k, _mm256_fmadd_pd(va, load2(w + k), t));
  }
  for (; k < dim; ++k) prev[k] = a * w[k] + b * cur[k] - prev[k];
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::uint64_t dim) {
  const __m256d re = _mm256_set1_pd(alpha.real());
  const __m256d im = _mm256_set1_pd(alpha.imag());
  std::uint64_t k = 0;
  for (; k + 2 <= dim; k += 2) {
    store2(y + k, _mm256_add_pd(load2(y + k), cmul(re, im, load2(x + k))));
  }
  for (; k < dim; ++k) y[k] += alpha * x[k];
}

void scale(cplx alpha, cplx* x, std::uint64_t dim) {
  const __m256d re = _mm256_set1_pd(alpha.real());
  const __m256d im = _mm256_set1_pd(alpha.imag());
  std::uint64_t k = 0;
  for (; k + 2 <= dim; k += 2) store2(x + k, cmul(re, im, load2(x + k)));
  for (; k < dim; ++k) x[k] *= alpha;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

cplx dot(const cplx* x, const cplx* y, std::uint64_t dim) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::uint64_t k = 0;
  for (; k + 2 <= dim; k += 2) {
    const __m256d vx = load2(x + k);
    const __m256d vy = load2(y + k);
    acc_re = _mm256_fmadd_pd(vx, vy, acc_re);
    acc_im = _mm256_fmadd_pd(vx, _mm256_permute_pd(vy, 0b0101), acc_im);
  }
  // acc_im lanes hold [xr*yi, xi*yr, ...]
  acc_im = _mm256_mul_pd(acc_im, _mm256_set_pd(-1.0, 1.0, -1.0, 1.0));
  double re = hsum(acc_re);
  double im = hsum(acc_im);
  for (; k < dim; ++k) {
    re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
  }
  return {re, im};
}

double norm2(const cplx* x, std::uint64_t dim) {
  __m256d acc = _mm256_setzero_pd();
  std::uint64_t k = 0;
  for (; k + 2 <= dim; k += 2) {
    const __m256d v = load2(x + k);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double s = hsum(acc);
  for (; k < dim; ++k) s += std::norm(x[k]);
  return s;
}

constexpr KernelTable kAvx2{"avx2", bond_apply, cheb_step, axpy, scale, dot, norm2};

}  // namespace

const KernelTable* avx2_table_unchecked() { return &kAvx2; }

}  // namespace spinbath::kernels

#else

namespace spinbath::kernels {
const KernelTable* avx2_table_unchecked() { return nullptr; }
}  // namespace spinbath::kernels

#endif
