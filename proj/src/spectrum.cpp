#include "spinbath/spectrum.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spinbath {
namespace {

// Re-span the columns [first, last) of `v` from the computational basis.
void canonicalize_block(Eigen::MatrixXd& v, Eigen::Index first, Eigen::Index last) {
  const Eigen::Index m = last - first;
  const Eigen::Index n = v.rows();
  const auto block = v.middleCols(first, m);
  // Work with coefficients c = V_b^T e_k in the m-dimensional block space.
  Eigen::MatrixXd accepted(m, m);
  Eigen::Index count = 0;
  constexpr double kAccept = 1e-4;
  for (Eigen::Index k = 0; k < n && count < m; ++k) {
    Eigen::VectorXd c = block.row(k).transpose();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index a = 0; a < count; ++a) {
        c -= accepted.col(a).dot(c) * accepted.col(a);
      }
    }
    const double len = c.norm();
    if (len > kAccept) accepted.col(count++) = c / len;
  }
  v.middleCols(first, m) = (block * accepted.leftCols(count)).eval();
}

}  // namespace

double SpectrumSummary::width() const {
  if (eigenvalues.size() == 0) return 0.0;
  return eigenvalues(eigenvalues.size() - 1) - eigenvalues(0);
}

int SpectrumSummary::ground_degeneracy() const {
  int g = 0;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    if (eigenvalues(k) - eigenvalues(0) <= degeneracy_tolerance) ++g;
  }
  return g;
}

SpectrumSummary diagonalize_matrix(Eigen::MatrixXd h, bool with_vectors,
                                   double relative_tolerance) {
  const auto n = static_cast<lapack_int>(h.rows());
  if (h.rows() != h.cols()) throw DimensionError("matrix is not square");
  SpectrumSummary s;
  s.eigenvalues.resize(n);
  if (n > 0) {
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'L',
                                           n, h.data(), n, s.eigenvalues.data());
    if (info != 0) {
      throw std::runtime_error("dsyevd failed with info " + std::to_string(info));
    }
  }
  s.degeneracy_tolerance = relative_tolerance * s.width();
  if (with_vectors) {
    Eigen::Index first = 0;
    for (Eigen::Index k = 1; k <= n; ++k) {
      if (k == n || s.eigenvalues(k) - s.eigenvalues(k - 1) > s.degeneracy_tolerance) {
        canonicalize_block(h, first, k);
        first = k;
      }
    }
    s.eigenvectors = std::move(h);
  }
  return s;
}

SpectrumSummary diagonalize(const SpinModel& model, Part part, bool with_vectors,
                            std::uint64_t max_dim) {
  const bool local = part == Part::System || part == Part::Environment;
  const BondOperator op =
      BondOperator::compile(model, part, local ? Space::Local : Space::Entirety);
  if (op.dim() > max_dim) {
    throw SizeError("dense diagonalization of dimension " + std::to_string(op.dim()) +
                    " exceeds the cap " + std::to_string(max_dim));
  }
  return diagonalize_matrix(op.to_dense(), with_vectors);
}

ThermoFunctions::ThermoFunctions(std::vector<double> energies, double degeneracy_tolerance)
    : energies_(std::move(energies)) {
  if (energies_.empty()) throw std::invalid_argument("empty spectrum");
  std::sort(energies_.begin(), energies_.end());
  ground_degeneracy_ = static_cast<int>(std::count_if(
      energies_.begin(), energies_.end(),
      [&](double e) { return e - energies_.front() <= degeneracy_tolerance; }));
}

ThermoFunctions::ThermoFunctions(const SpectrumSummary& spectrum)
    : ThermoFunctions(std::vector<double>(spectrum.eigenvalues.begin(),
                                          spectrum.eigenvalues.end()),
                      spectrum.degeneracy_tolerance) {}

double ThermoFunctions::shifted_sum(double x) const {
  const double e0 = energies_.front();
  double sum = 0.0;
  for (double e : energies_) sum += std::exp(-x * (e - e0));
  return sum;
}

double ThermoFunctions::log_z(double x) const {
  return std::log(shifted_sum(x)) - x * energies_.front();
}

double ThermoFunctions::z(double x) const { return std::exp(log_z(x)); }

double ThermoFunctions::free_energy(double x) const {
  if (x == 0.0) {
    return energies_.size() == 1 ? energies_.front()
                                 : -std::numeric_limits<double>::infinity();
  }
  return -log_z(x) / x;
}

double ThermoFunctions::energy(double x) const {
  const double e0 = energies_.front();
  double sum = 0.0, weighted = 0.0;
  for (double e : energies_) {
    const double w = std::exp(-x * (e - e0));
    sum += w;
    weighted += w * (e - e0);
  }
  return e0 + weighted / sum;
}

double ThermoFunctions::energy_variance(double x) const {
  const double u = energy(x);
  const double e0 = energies_.front();
  double sum = 0.0, weighted = 0.0;
  for (double e : energies_) {
    const double w = std::exp(-x * (e - e0));
    sum += w;
    weighted += w * (e - u) * (e - u);
  }
  return weighted / sum;
}

double ThermoFunctions::heat_capacity(double x) const { return x * x * energy_variance(x); }

double ThermoFunctions::z_ratio(int n, double beta) const {
  return std::exp(std::log(shifted_sum(n * beta)) - n * std::log(shifted_sum(beta)));
}

ThermoFunctions thermo(const SpectrumSummary& spectrum) { return ThermoFunctions(spectrum); }

StateVector ground_state(const SpinModel& model, std::uint64_t max_dim) {
  const SpectrumSummary s = diagonalize(model, Part::Full, true, max_dim);
  const Eigen::VectorXd v = s.eigenvectors->col(0);
  CVector amps(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) amps[k] = v(k);
  return StateVector(std::move(amps));
}

void write_spectrum_csv(std::ostream& out, const SpectrumSummary& spectrum) {
  const auto old_precision = out.precision(17);
  out << "index,eigenvalue\n";
  for (Eigen::Index k = 0; k < spectrum.eigenvalues.size(); ++k) {
    out << k << ',' << spectrum.eigenvalues(k) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace spinbath
