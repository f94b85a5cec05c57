#pragma once

// Spin-1/2 Hamiltonians H = H_S + H_E + lambda * H_SE with
//   H_S  = -sum J^a_ij  S^a_i S^a_j
//   H_E  = -sum W^a_ij  I^a_i I^a_j
//   H_SE = -sum D^a_ij  S^a_i I^a_j
// where S^a = sigma^a / 2, applied to state vectors without building the
// 2^N x 2^N matrix.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spinbath/common.hpp"
#include "spinbath/kernels.hpp"

namespace spinbath {

/// Two-spin anisotropic Heisenberg bond. Site indices are 0-based and local
/// to their list: system bonds index system sites, environment bonds index
/// environment sites, coupling bonds are (system site, environment site).
struct Bond {
  int i = 0;
  int j = 0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool is_zero() const { return x == 0.0 && y == 0.0 && z == 0.0; }
  bool operator==(const Bond&) const = default;
};

struct SpinModel {
  int n_system = 1;
  int n_env = 0;
  std::vector<Bond> system_bonds;
  std::vector<Bond> env_bonds;
  std::vector<Bond> coupling_bonds;
  double lambda = 0.0;
  // Constant added to H_SE. Zero for every physical model; a nonzero value
  // breaks the spin-reversal symmetry and exists for diagnostics.
  double coupling_offset = 0.0;

  int n_total() const { return n_system + n_env; }
  std::uint64_t dim() const { return std::uint64_t{1} << n_total(); }
  std::uint64_t system_dim() const { return std::uint64_t{1} << n_system; }
  std::uint64_t env_dim() const { return std::uint64_t{1} << n_env; }

  /// Throws ConfigError on bad indices or duplicate pairs and SizeError when
  /// n_total() exceeds `max_spins`.
  void validate(int max_spins = kDefaultMaxSpins) const;
};

enum class Part { System, Environment, Coupling, Full };

/// System, Environment or Coupling as a string ("S", "E", "SE", "FULL").
std::string to_string(Part part);
Part parse_part(const std::string& text);

/// Ring geometry: an isotropic system chain with coupling j_system, a fully
/// connected environment with every component uniform in [-4/3, 4/3], and
/// two random coupling bonds joining the chain ends to the environment.
SpinModel build_ring_model(int n_system, int n_env, double j_system,
                           std::uint64_t coupling_seed, std::uint64_t env_seed,
                           double lambda);

/// Two isotropic nearest-neighbour chains joined by one bond between the
/// last system site and the first environment site.
SpinModel build_chain_model(int n_system, int n_env, double j_iso, double omega_iso,
                            double delta_iso, double lambda);

/// Whether an operator acts on the whole entirety or only on the spins of
/// its own subsystem (N_S bits for System, N_E bits for Environment).
enum class Space { Entirety, Local };

struct EnergyBounds {
  double lower = 0.0;
  double upper = 0.0;

  double width() const { return upper - lower; }
  double center() const { return 0.5 * (upper + lower); }
  double half_width() const { return 0.5 * (upper - lower); }
};

/// A model part flattened into bit-mask terms, ready to apply.
class BondOperator {
 public:
  struct Term {
    std::uint64_t mask_i;
    std::uint64_t mask_j;
    kernels::BondCoefficients coefficients;
    double norm_bound;  // (|x| + |y| + |z|) / 4
  };

  static BondOperator compile(const SpinModel& model, Part part,
                              Space space = Space::Entirety);

  int n_bits() const { return n_bits_; }
  std::uint64_t dim() const { return std::uint64_t{1} << n_bits_; }
  const std::vector<Term>& terms() const { return terms_; }
  double offset() const { return offset_; }

  /// out = H in. Throws DimensionError on size mismatch.
  void apply(std::span<const cplx> in, std::span<cplx> out) const;

  /// Spectrum enclosure from the triangle inequality, |S^a S^a| = 1/4.
  EnergyBounds gershgorin_bounds() const;

  /// Dense real-symmetric matrix (every term is real in the up/down basis).
  Eigen::MatrixXd to_dense() const;

 private:
  int n_bits_ = 0;
  double offset_ = 0.0;
  std::vector<Term> terms_;
};

/// H_part |psi> for a vector over the whole entirety. Linear; not normalized.
CVector apply_hamiltonian(const SpinModel& model, Part part, std::span<const cplx> state);

/// Rigorous enclosure of the spectrum of H_part from coupling magnitudes. Empty bond
/// lists give (0, 0).
EnergyBounds energy_bounds(const SpinModel& model, Part part = Part::Full);

/// Lanczos estimate of the extreme eigenvalues, widened by the final Ritz
/// residual plus `margin` times the width and clipped to the Gershgorin
/// enclosure. Much tighter than energy_bounds; used to scale Chebyshev
/// expansions.
EnergyBounds tightened_energy_bounds(const BondOperator& op, std::uint64_t seed = 0x5eed,
                                     int max_iterations = 400, double margin = 1e-7);

}  // namespace spinbath
