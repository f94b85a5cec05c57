#include "spinbath/common.hpp"

#include <bit>
#include <cmath>

#include "spinbath/kernels.hpp"

namespace spinbath {

int log2_dim(std::uint64_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) {
    throw DimensionError("vector dimension " + std::to_string(dim) +
                         " is not a power of two");
  }
  return std::countr_zero(dim);
}

StateVector::StateVector(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  n_spins_ = log2_dim(amplitudes_.size());
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite vector");
  }
  kernels::active().scale(cplx{1.0 / n, 0.0}, amplitudes_.data(), amplitudes_.size());
}

StateVector StateVector::basis_state(int n_spins, std::uint64_t index) {
  CVector v(std::uint64_t{1} << n_spins);
  if (index >= v.size()) throw DimensionError("basis index out of range");
  v[index] = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::adopt(CVector amplitudes) {
  StateVector s;
  s.n_spins_ = log2_dim(amplitudes.size());
  s.amplitudes_ = std::move(amplitudes);
  return s;
}

double StateVector::norm() const {
  return std::sqrt(kernels::active().norm2(amplitudes_.data(), amplitudes_.size()));
}

}  // namespace spinbath
