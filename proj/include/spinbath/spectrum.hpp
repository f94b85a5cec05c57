#pragma once

// Exact diagonalization of model parts and the thermodynamics derived from a
// spectrum. Boltzmann sums are accumulated with energies shifted by E_min so
// that low temperatures neither overflow nor underflow.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "spinbath/common.hpp"
#include "spinbath/hamiltonian.hpp"

namespace spinbath {

struct SpectrumSummary {
  Eigen::VectorXd eigenvalues;                 // ascending
  std::optional<Eigen::MatrixXd> eigenvectors;  // columns, real orthogonal
  double degeneracy_tolerance = 0.0;

  std::uint64_t dim() const { return static_cast<std::uint64_t>(eigenvalues.size()); }
  double width() const;
  int ground_degeneracy() const;
};

/// Default degeneracy tolerance relative to the spectral width.
inline constexpr double kRelativeDegeneracyTolerance = 1e-8;

/// Full spectrum of a real symmetric matrix. Eigenvectors inside each
/// degenerate block (and the sign of every eigenvector) are canonicalized:
/// the block is re-spanned by Gram-Schmidt over its projections of the
/// computational basis vectors taken in index order, so the result does not
/// depend on how the solver mixed the block.
SpectrumSummary diagonalize_matrix(Eigen::MatrixXd h, bool with_vectors,
                                   double relative_tolerance = kRelativeDegeneracyTolerance);

/// S and E are diagonalized on their own spins (D_S or D_E); SE and FULL on
/// the whole entirety. Throws SizeError above `max_dim`.
SpectrumSummary diagonalize(const SpinModel& model, Part part, bool with_vectors = false,
                            std::uint64_t max_dim = kDefaultMaxDenseDim);

/// Z, F, U and C as functions of x = n * beta.
class ThermoFunctions {
 public:
  ThermoFunctions() = default;
  ThermoFunctions(std::vector<double> energies, double degeneracy_tolerance);
  explicit ThermoFunctions(const SpectrumSummary& spectrum);

  double ground_energy() const { return energies_.front(); }
  int ground_degeneracy() const { return ground_degeneracy_; }
  std::uint64_t dimension() const { return energies_.size(); }
  const std::vector<double>& energies() const { return energies_; }

  /// sum_k exp(-x (E_k - E_min)); equals Z(x) exp(x E_min).
  double shifted_sum(double x) const;
  double log_z(double x) const;
  double z(double x) const;
  /// -ln Z(x) / x. At x = 0 returns -infinity for dimension > 1 and E_0
  /// for a single level.
  double free_energy(double x) const;
  double energy(double x) const;
  double energy_variance(double x) const;
  /// x^2 (<E^2> - <E>^2)
  double heat_capacity(double x) const;
  /// Z(n beta) / Z(beta)^n, evaluated without forming either factor.
  double z_ratio(int n, double beta) const;

 private:
  std::vector<double> energies_;
  int ground_degeneracy_ = 1;
};

ThermoFunctions thermo(const SpectrumSummary& spectrum);

/// Normalized eigenvector of the lowest eigenvalue of H. Inside a degenerate
/// ground multiplet this is the first canonicalized vector.
StateVector ground_state(const SpinModel& model, std::uint64_t max_dim = kDefaultMaxDenseDim);

/// "index,eigenvalue" rows behind a one-line header.
void write_spectrum_csv(std::ostream& out, const SpectrumSummary& spectrum);

}  // namespace spinbath
