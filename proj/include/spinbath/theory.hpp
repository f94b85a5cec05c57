#pragma once

// Closed-form ensemble predictions for E(sigma^2) and E(delta^2) of an
// uncoupled entirety, built from partition-function ratios
//   X_n(beta) = Z(n beta) / Z(beta)^n = e^{-n beta (F(n beta) - F(beta))},
// plus their low-temperature and infinite-temperature limits and the
// first-order-in-lambda symmetry traces.

#include <cstdint>
#include <ostream>
#include <vector>

#include "spinbath/hamiltonian.hpp"
#include "spinbath/spectrum.hpp"

namespace spinbath {

struct PredictionInputs {
  ThermoFunctions thermo_s;
  ThermoFunctions thermo_e;
  std::uint64_t d_s = 1;
  std::uint64_t d_e = 1;
  double beta = 0.0;

  double d() const { return static_cast<double>(d_s) * static_cast<double>(d_e); }
  /// Throws std::invalid_argument if the dimensions disagree with the
  /// spectra or beta is negative or not finite.
  void validate() const;
};

/// Diagonalizes H_S and H_E of `model` and packages them.
PredictionInputs prediction_inputs(const SpinModel& model, double beta);

/// Leading term: D/(2(D+1)) (1 - X^S_2) X^E_2.
double sigma2_leading(const PredictionInputs& in);

/// Complete second-order expansion in |d|^2:
///   X^E_2 (1 - X^S_2) / 2 - 2D/(D+1) X^E_3 (X^S_2 - X^S_3)
///   + 3D/(2(D+1)) (X^E_2)^2 X^S_2 (1 - X^S_2).
double sigma2_full(const PredictionInputs& in);

/// Leading term: D/(D+1) X^S_2 (X^E_2 - 1/D).
double delta2_leading(const PredictionInputs& in);

/// D/(D+1) X^E_2 (X^S_2 - 2 X^S_3 + (X^S_2)^2)
///   + X^S_2 [C_S(2 beta)/(4 beta^2) + (U_S(2 beta) - U_S(beta))^2] delta_b^2.
/// C_S(2 beta)/(4 beta^2) is the energy variance at 2 beta, which stays
/// finite at beta = 0.
double delta2_full(const PredictionInputs& in, double delta_b = 0.0);

struct LimitPair {
  double sigma2 = 0.0;
  double delta2 = 0.0;
};

/// beta -> infinity:
///   sigma^2 -> (g_S - 1)/(2 g_S g_E) (1 - D/((D+1) g_S g_E))
///   delta^2 -> (g_S - 1)/(g_S^2 g_E) D/(D+1)
LimitPair low_temperature_limits(int g_s, int g_e, std::uint64_t d_s, std::uint64_t d_e);

/// beta = 0: sigma^2 = (D_S - 1)/(2(D+1)), delta^2 = (D_S - 1)/(D_S (D+1)).
LimitPair infinite_temperature_scaling(std::uint64_t d_s, std::uint64_t d_e);

struct SymmetryTraces {
  double trace_a = 0.0;  // Tr(H_SE e^{-beta H_E} e^{-beta H_S})
  double trace_b = 0.0;  // Z_S Tr(e^{-beta H_S} e^{-2 beta H_E} H_SE) - Tr(e^{-2 beta H} H_SE)
  // Each trace divided by ||H_SE|| times the matching sum of Boltzmann
  // weights. These are computed with shifted energies and never overflow.
  double relative_a = 0.0;
  double relative_b = 0.0;
};

/// Both traces in the product eigenbasis of H_S and H_E, using only the
/// diagonal thermal expectations of the coupled spin components.
/// Throws SizeError when D exceeds `max_dim`.
SymmetryTraces first_order_symmetry_trace(const SpinModel& model, double beta,
                                          std::uint64_t max_dim = kDefaultMaxDenseDim);

struct PredictionRow {
  double beta = 0.0;
  double sigma2_leading = 0.0;
  double sigma2_full = 0.0;
  double delta2_leading = 0.0;
  double delta2_full = 0.0;
};

std::vector<PredictionRow> prediction_curve(const SpinModel& model,
                                            const std::vector<double>& betas);

void write_prediction_csv(std::ostream& out, const std::vector<PredictionRow>& rows);

}  // namespace spinbath
