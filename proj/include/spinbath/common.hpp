#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinbath {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

// Largest entirety handled by default. One complex-double vector at 28 spins
// occupies 4 GiB.
inline constexpr int kDefaultMaxSpins = 28;

// Dense eigensolves (exact propagation, full spectra) are capped at this
// dimension unless the caller raises it.
inline constexpr std::uint64_t kDefaultMaxDenseDim = std::uint64_t{1} << 14;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a Chebyshev expansion would need more terms than allowed.
struct OrderOverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Normalized amplitude vector of an N-spin state. Bit b of a basis index is
/// spin b (0 = up, 1 = down); system spins occupy the low bits.
class StateVector {
 public:
  StateVector() = default;

  /// Takes ownership of `amplitudes` and rescales them to unit norm.
  /// Throws DimensionError unless the size is a power of two, and
  /// std::invalid_argument for a zero vector.
  explicit StateVector(CVector amplitudes);

  static StateVector basis_state(int n_spins, std::uint64_t index);

  /// Takes `amplitudes` as they are, without rescaling. For propagators
  /// whose output is unit norm by construction, so that any drift stays
  /// observable.
  static StateVector adopt(CVector amplitudes);

  std::uint64_t dim() const { return amplitudes_.size(); }
  int n_spins() const { return n_spins_; }

  std::span<const cplx> amplitudes() const { return amplitudes_; }
  const cplx* data() const { return amplitudes_.data(); }
  const cplx& operator[](std::uint64_t k) const { return amplitudes_[k]; }

  double norm() const;

  CVector release() && { return std::move(amplitudes_); }

 private:
  CVector amplitudes_;
  int n_spins_ = 0;
};

/// log2 of a power of two; throws DimensionError otherwise.
int log2_dim(std::uint64_t dim);

}  // namespace spinbath
