#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "spinbath/kernels.hpp"

using namespace spinbath;

namespace {

CVector sample(std::uint64_t dim, std::uint64_t seed) {
  return oracle::to_cvector(oracle::random_vector(dim, seed));
}

double max_abs_diff(const CVector& a, const CVector& b) {
  double d = 0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace

TEST_CASE("scalar table is always available and named") {
  CHECK(std::string(kernels::scalar_table().name) == "scalar");
  CHECK(kernels::select("scalar"));
  CHECK(std::string(kernels::active().name) == "scalar");
  CHECK_FALSE(kernels::select("sse9"));
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const kernels::KernelTable* fast = kernels::avx2_table();
  if (fast == nullptr) {
    MESSAGE("AVX2 not available on this CPU; equivalence skipped");
    return;
  }
  const kernels::KernelTable& ref = kernels::scalar_table();
  // Odd-sized tails and both low and high masks exercise the lane handling.
  for (std::uint64_t dim : {2u, 4u, 8u, 64u, 1024u}) {
    const int bits = static_cast<int>(std::log2(dim));
    const CVector in = sample(dim, dim);
    const kernels::BondCoefficients c{-0.3, 0.17, 0.4, -0.55};
    for (int i = 0; i < bits; ++i) {
      for (int j = i + 1; j < bits; ++j) {
        CVector a = sample(dim, 7), b = a;
        ref.bond_apply(in.data(), a.data(), dim, 1ull << i, 1ull << j, c);
        fast->bond_apply(in.data(), b.data(), dim, 1ull << i, 1ull << j, c);
        CHECK(max_abs_diff(a, b) < 1e-15);
      }
    }
    const CVector w = sample(dim, 11), cur = sample(dim, 12);
    CVector p1 = sample(dim, 13), p2 = p1;
    ref.cheb_step(w.data(), cur.data(), p1.data(), 2.1, -0.7, dim);
    fast->cheb_step(w.data(), cur.data(), p2.data(), 2.1, -0.7, dim);
    CHECK(max_abs_diff(p1, p2) < 1e-14);

    CVector y1 = sample(dim, 14), y2 = y1;
    ref.axpy({0.3, -1.2}, in.data(), y1.data(), dim);
    fast->axpy({0.3, -1.2}, in.data(), y2.data(), dim);
    CHECK(max_abs_diff(y1, y2) < 1e-14);

    CVector s1 = in, s2 = in;
    ref.scale({-0.8, 0.25}, s1.data(), dim);
    fast->scale({-0.8, 0.25}, s2.data(), dim);
    CHECK(max_abs_diff(s1, s2) < 1e-15);

    const cplx d1 = ref.dot(in.data(), w.data(), dim), d2 = fast->dot(in.data(), w.data(), dim);
    CHECK(std::abs(d1 - d2) < 1e-12 * std::sqrt(static_cast<double>(dim)));
    CHECK(ref.norm2(in.data(), dim) == doctest::Approx(fast->norm2(in.data(), dim)).epsilon(1e-14));
  }
}

TEST_CASE("bond_apply matches its defining formula") {
  const std::uint64_t dim = 16, mi = 2, mj = 8;
  const kernels::BondCoefficients c{1.0, 2.0, 3.0, 4.0};
  const CVector in = sample(dim, 3);
  CVector out(dim);
  kernels::scalar_table().bond_apply(in.data(), out.data(), dim, mi, mj, c);
  for (std::uint64_t k = 0; k < dim; ++k) {
    const bool equal = ((k & mi) != 0) == ((k & mj) != 0);
    const cplx expect = (equal ? c.equal_diag : c.differ_diag) * in[k] +
                        (equal ? c.equal_flip : c.differ_flip) * in[k ^ (mi | mj)];
    CHECK(std::abs(out[k] - expect) < 1e-15);
  }
}
