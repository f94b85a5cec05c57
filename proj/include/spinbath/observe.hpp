#pragma once

// Reduced density matrix of the system in the eigenbasis of H_S, and the
// decoherence (sigma), thermalization (delta) and effective inverse
// temperature (b) read off from it.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "spinbath/common.hpp"
#include "spinbath/hamiltonian.hpp"
#include "spinbath/propagate.hpp"
#include "spinbath/spectrum.hpp"

namespace spinbath {

class ReducedDensityMatrix {
 public:
  ReducedDensityMatrix() = default;
  explicit ReducedDensityMatrix(Eigen::MatrixXcd entries);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  cplx trace() const { return entries_.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;

 private:
  Eigen::MatrixXcd entries_;
};

/// Traces out the environment (high bits), then rotates into the basis whose
/// columns are `hs_eigenvectors` (D_S x D_S, real orthogonal).
ReducedDensityMatrix reduce_to_system(std::span<const cplx> state, int n_system,
                                      const Eigen::MatrixXd& hs_eigenvectors);
ReducedDensityMatrix reduce_to_system(const StateVector& state, int n_system,
                                      const Eigen::MatrixXd& hs_eigenvectors);

/// Tr_E e^{-beta H} / Z in the same basis, from a full diagonalization of H.
ReducedDensityMatrix thermal_reduced_density_matrix(const SpinModel& model, double beta,
                                                    const Eigen::MatrixXd& hs_eigenvectors,
                                                    std::uint64_t max_dim = kDefaultMaxDenseDim);
/// Same from an existing full spectrum with eigenvectors.
ReducedDensityMatrix thermal_reduced_density_matrix(const SpectrumSummary& full, int n_system,
                                                    double beta,
                                                    const Eigen::MatrixXd& hs_eigenvectors);

/// sqrt(sum_{i<j} |rho_ij|^2)
double sigma(const ReducedDensityMatrix& rdm);

/// Diagonal entries below this are floored before taking logarithms.
inline constexpr double kDiagonalFloor = 1e-300;
/// E_i and E_j count as distinct when they differ by more than this times
/// the spectral width.
inline constexpr double kRelativeEnergyGap = 1e-9;

struct BFit {
  double b = 0.0;
  bool floored = false;  // some diagonal entry was below kDiagonalFloor
  int n_pairs = 0;
};

/// Average of (ln rho_ii - ln rho_jj) / (E_j - E_i) over all pairs i < j with
/// distinct energies. Throws FitError when every energy is the same.
BFit fit_b(const ReducedDensityMatrix& rdm, const SpectrumSummary& hs_spectrum);

/// sqrt(sum_i (rho_ii - e^{-b E_i} / Z_S(b))^2)
double delta(const ReducedDensityMatrix& rdm, const SpectrumSummary& hs_spectrum, double b);

struct MeasureReport {
  double sigma = 0.0;
  double delta = 0.0;       // against the fitted b
  double delta_beta = 0.0;  // against beta_ref
  double b = 0.0;
  double beta_ref = 0.0;
  bool b_floored = false;
};

MeasureReport measure(const ReducedDensityMatrix& rdm, const SpectrumSummary& hs_spectrum,
                      double beta_ref);

enum class InitialState { X, UDUDY };

/// System spins alternating up/down starting with site 0 up.
std::uint64_t ududy_system_index(int n_system);

/// X: canonical thermal state of the whole H. UDUDY: the alternating system
/// basis state times a canonical thermal state of H_E alone (environment
/// random state drawn from `seed`).
StateVector prepare_initial_state(const SpinModel& model, InitialState kind, double beta,
                                  std::uint64_t seed);

struct TracePoint {
  double t = 0.0;
  double sigma = 0.0;
  double delta = 0.0;
  double b = 0.0;
};

/// Steps e^{-i dt H} from t = 0 to t_max and measures after each step
/// (round(t_max/dt) + 1 entries including t = 0).
std::vector<TracePoint> trace_time_series(const SpinModel& model, const StateVector& initial,
                                          double t_max, double dt,
                                          const SpectrumSummary& hs_spectrum);

struct SeriesStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n = 0;
};

/// Mean and standard deviation of sigma over entries with t > t_burn.
SeriesStats time_average(const std::vector<TracePoint>& series, double t_burn = 300.0);

}  // namespace spinbath
