#pragma once

// Random and canonical thermal pure states, real- and imaginary-time
// propagation. The Chebyshev expansion maps the spectrum of H affinely onto [-1, 1]:
//   e^{-itH}     = e^{-itc} [J_0(ht) + 2 sum_k (-i)^k J_k(ht) T_k(H~)]
//   e^{-beta H/2} = e^{-beta e_min/2} [I~_0 + 2 sum_k (-1)^k I~_k T_k(H~)]
// with H~ = (H - c)/h, c the center and h the half width of the bounds,
// and I~_k = e^{-tau} I_k(tau), tau = beta h / 2.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "spinbath/common.hpp"
#include "spinbath/hamiltonian.hpp"

namespace spinbath {

inline constexpr double kDefaultChebyshevTolerance = 1e-15;
inline constexpr int kDefaultMaxOrder = 20000;

/// Haar-random state: d_k = (c'_k + i b'_k) / norm with Box-Muller normals.
StateVector random_state(std::uint64_t dim, std::uint64_t seed);

enum class PropagationMethod { Chebyshev, Exact };

struct ThermalStateRequest {
  double beta = 0.0;
  std::uint64_t seed = 0;
  PropagationMethod method = PropagationMethod::Chebyshev;
  double tolerance = kDefaultChebyshevTolerance;
  int max_order = kDefaultMaxOrder;
};

/// J_0(x) .. J_n(x) by Miller's downward recurrence.
std::vector<double> bessel_j_sequence(double x, int n);

/// e^{-x} I_0(x) .. e^{-x} I_n(x) for x >= 0, downward recurrence.
std::vector<double> scaled_bessel_i_sequence(double x, int n);

struct ChebyshevPlan {
  double e_min = -1.0;
  double e_max = 1.0;
  int order = 1;                  // number of retained terms
  std::vector<cplx> coefficients;  // phase and scaling folded in
  double tolerance = kDefaultChebyshevTolerance;
  double log_prefactor = 0.0;     // result is e^{log_prefactor} sum_k c_k T_k

  double center() const { return 0.5 * (e_max + e_min); }
  double half_width() const { return 0.5 * (e_max - e_min); }

  /// Plan for e^{-itH}. Throws OrderOverflowError past `max_order`.
  static ChebyshevPlan for_real_time(const EnergyBounds& bounds, double t,
                                     double tolerance = kDefaultChebyshevTolerance,
                                     int max_order = kDefaultMaxOrder);
  /// Plan for e^{-beta H / 2}.
  static ChebyshevPlan for_imaginary_time(const EnergyBounds& bounds, double beta,
                                          double tolerance = kDefaultChebyshevTolerance,
                                          int max_order = kDefaultMaxOrder);
};

/// sum_k c_k T_k(H~) in, without the exp(log_prefactor) factor.
CVector apply_chebyshev(const BondOperator& op, const ChebyshevPlan& plan,
                        std::span<const cplx> in);

struct ThermalState {
  StateVector state;
  // <Psi_0| e^{-beta H} |Psi_0>; may overflow, the log is always finite.
  double norm_factor = 1.0;
  double log_norm_factor = 0.0;
};

/// Normalized e^{-beta H/2} psi from an imaginary-time plan. Const and
/// reentrant, so one plan can serve many threads.
ThermalState project_thermal(const BondOperator& op, const ChebyshevPlan& plan,
                             const StateVector& psi);

/// Matrix-free propagation of one operator. Bounds for imaginary time are
/// the Lanczos-tightened ones; real time uses the Gershgorin enclosure.
/// Plans are cached per argument, so a propagator is not thread-safe; give
/// each worker its own copy.
class ChebyshevPropagator {
 public:
  explicit ChebyshevPropagator(BondOperator op, double tolerance = kDefaultChebyshevTolerance,
                               int max_order = kDefaultMaxOrder);

  const BondOperator& op() const { return op_; }
  const EnergyBounds& thermal_bounds();
  const EnergyBounds& real_time_bounds() const { return real_bounds_; }

  /// Normalized e^{-beta H/2} psi together with <psi|e^{-beta H}|psi>.
  ThermalState imaginary_time(const StateVector& psi, double beta);
  StateVector real_time(const StateVector& psi, double t);

 private:
  const ChebyshevPlan& plan(std::map<double, ChebyshevPlan>& cache, double arg, bool real);

  BondOperator op_;
  double tolerance_;
  int max_order_;
  EnergyBounds real_bounds_;
  std::unique_ptr<EnergyBounds> thermal_bounds_;
  std::map<double, ChebyshevPlan> real_plans_;
  std::map<double, ChebyshevPlan> imag_plans_;
};

/// Dense reference propagator through the full eigendecomposition.
class ExactPropagator {
 public:
  explicit ExactPropagator(const BondOperator& op, std::uint64_t max_dim = kDefaultMaxDenseDim);

  ThermalState imaginary_time(const StateVector& psi, double beta) const;
  StateVector real_time(const StateVector& psi, double t) const;

  const Eigen::VectorXd& eigenvalues() const { return energies_; }

 private:
  Eigen::VectorXd energies_;
  Eigen::MatrixXd vectors_;
};

/// e^{-beta H/2}|Psi_0> / <Psi_0|e^{-beta H}|Psi_0>^{1/2} with
/// |Psi_0> = random_state(D, seed). beta = 0 returns |Psi_0> unchanged.
ThermalState canonical_thermal_state(const SpinModel& model,
                                     const ThermalStateRequest& request);

/// e^{-itH}|psi> with a plan built for `t` from the Gershgorin bounds.
StateVector evolve_real_time(const SpinModel& model, const StateVector& state, double t);

/// e^{-itH}|psi> with a caller-supplied plan whose bounds enclose the spectrum of H.
StateVector evolve_real_time(const SpinModel& model, const StateVector& state,
                             const ChebyshevPlan& plan);

/// Per realization, |sum_k |d_k|^2 p_k - 1/D| where p_k is the product of
/// the system and environment Boltzmann weights and d is a random state in
/// the product eigenbasis. Requires lambda = 0 (ConfigError otherwise) and
/// D <= 2^14 (SizeError).
std::vector<double> normalization_diagnostic(const SpinModel& model, double beta,
                                             int n_realizations, std::uint64_t seed);

}  // namespace spinbath
