// Portable reference kernels. The AVX2 variants are tested against these.

#include "spinbath/kernels.hpp"

namespace spinbath::kernels {
namespace {

void bond_apply(const cplx* in, cplx* out, std::uint64_t dim, std::uint64_t mask_i,
                std::uint64_t mask_j, const BondCoefficients& c) {
  const std::uint64_t flip = mask_i | mask_j;
  for (std::uint64_t k = 0; k < dim; ++k) {
    const bool equal = ((k & mask_i) != 0) == ((k & mask_j) != 0);
    const double d = equal ? c.equal_diag : c.differ_diag;
    const double f = equal ? c.equal_flip : c.differ_flip;
    out[k] += d * in[k] + f * in[k ^ flip];
  }
}

void cheb_step(const cplx* w, const cplx* cur, cplx* prev, double a, double b,
               std::uint64_t dim) {
  for (std::uint64_t k = 0; k < dim; ++k) prev[k] = a * w[k] + b * cur[k] - prev[k];
}

void axpy(cplx alpha, const cplx* x, cplx* y, std::uint64_t dim) {
  for (std::uint64_t k = 0; k < dim; ++k) y[k] += alpha * x[k];
}

void scale(cplx alpha, cplx* x, std::uint64_t dim) {
  for (std::uint64_t k = 0; k < dim; ++k) x[k] *= alpha;
}

cplx dot(const cplx* x, const cplx* y, std::uint64_t dim) {
  double re = 0.0, im = 0.0;
  for (std::uint64_t k = 0; k < dim; ++k) {
    re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
  }
  return {re, im};
}

double norm2(const cplx* x, std::uint64_t dim) {
  double s = 0.0;
  for (std::uint64_t k = 0; k < dim; ++k) s += std::norm(x[k]);
  return s;
}

constexpr KernelTable kScalar{"scalar", bond_apply, cheb_step, axpy, scale, dot, norm2};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace spinbath::kernels
