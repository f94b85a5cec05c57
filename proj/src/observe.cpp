#include "spinbath/observe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinbath/rng.hpp"

namespace spinbath {

ReducedDensityMatrix::ReducedDensityMatrix(Eigen::MatrixXcd entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw DimensionError("density matrix is not square");
}

double ReducedDensityMatrix::hermiticity_error() const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double ReducedDensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (entries_ + entries_.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

ReducedDensityMatrix reduce_to_system(std::span<const cplx> state, int n_system,
                                      const Eigen::MatrixXd& hs_eigenvectors) {
  const int n = log2_dim(state.size());
  if (n_system < 0 || n_system > n) throw DimensionError("n_system exceeds the state size");
  const Eigen::Index ds = Eigen::Index{1} << n_system;
  if (hs_eigenvectors.rows() != ds || hs_eigenvectors.cols() != ds) {
    throw DimensionError("H_S eigenbasis has the wrong dimension");
  }
  const Eigen::Index de = static_cast<Eigen::Index>(state.size()) / ds;
  // Column p of M holds c(., p); system bits are the fast index.
  const Eigen::Map<const Eigen::MatrixXcd> m(state.data(), ds, de);
  // rho_ij = sum_p c(i,p) c*(j,p)
  const Eigen::MatrixXcd rho = m * m.adjoint();
  const Eigen::MatrixXcd v = hs_eigenvectors.cast<cplx>();
  return ReducedDensityMatrix(v.transpose() * rho * v);
}

ReducedDensityMatrix reduce_to_system(const StateVector& state, int n_system,
                                      const Eigen::MatrixXd& hs_eigenvectors) {
  return reduce_to_system(state.amplitudes(), n_system, hs_eigenvectors);
}

ReducedDensityMatrix thermal_reduced_density_matrix(const SpinModel& model, double beta,
                                                    const Eigen::MatrixXd& hs_eigenvectors,
                                                    std::uint64_t max_dim) {
  return thermal_reduced_density_matrix(diagonalize(model, Part::Full, true, max_dim),
                                        model.n_system, beta, hs_eigenvectors);
}

ReducedDensityMatrix thermal_reduced_density_matrix(const SpectrumSummary& full, int n_system,
                                                    double beta,
                                                    const Eigen::MatrixXd& hs_eigenvectors) {
  if (!full.eigenvectors) throw std::invalid_argument("full spectrum needs eigenvectors");
  const int n = log2_dim(full.dim());
  if (n_system > n) throw DimensionError("n_system exceeds the spectrum size");
  const Eigen::MatrixXd& v = *full.eigenvectors;
  const double e0 = full.eigenvalues(0);
  Eigen::VectorXd w(full.eigenvalues.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) w(k) = std::exp(-beta * (full.eigenvalues(k) - e0));
  w /= w.sum();
  // X = V diag(sqrt w); rho = sum_p X_p X_p^T over environment rows p.
  const Eigen::MatrixXd x = v * w.cwiseSqrt().asDiagonal();
  const Eigen::Index ds = Eigen::Index{1} << n_system;
  const Eigen::Index de = Eigen::Index{1} << (n - n_system);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(ds, ds);
  for (Eigen::Index p = 0; p < de; ++p) {
    const auto rows = x.middleRows(p * ds, ds);
    rho.noalias() += rows * rows.transpose();
  }
  const Eigen::MatrixXd rotated = hs_eigenvectors.transpose() * rho * hs_eigenvectors;
  return ReducedDensityMatrix(rotated.cast<cplx>());
}

double sigma(const ReducedDensityMatrix& rdm) {
  double sum = 0.0;
  for (Eigen::Index j = 1; j < rdm.dim(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) sum += std::norm(rdm(i, j));
  }
  return std::sqrt(sum);
}

BFit fit_b(const ReducedDensityMatrix& rdm, const SpectrumSummary& hs_spectrum) {
  const Eigen::VectorXd& e = hs_spectrum.eigenvalues;
  if (e.size() != rdm.dim()) throw DimensionError("spectrum does not match the density matrix");
  const double gap = kRelativeEnergyGap * hs_spectrum.width();
  BFit fit;
  std::vector<double> logs(static_cast<std::size_t>(rdm.dim()));
  for (Eigen::Index i = 0; i < rdm.dim(); ++i) {
    double d = rdm(i, i).real();
    if (!(d >= kDiagonalFloor)) {
      d = kDiagonalFloor;
      fit.floored = true;
    }
    logs[static_cast<std::size_t>(i)] = std::log(d);
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rdm.dim(); ++i) {
    for (Eigen::Index j = i + 1; j < rdm.dim(); ++j) {
      if (std::abs(e(j) - e(i)) <= gap) continue;
      sum += (logs[static_cast<std::size_t>(i)] - logs[static_cast<std::size_t>(j)]) /
             (e(j) - e(i));
      ++fit.n_pairs;
    }
  }
  if (fit.n_pairs == 0) throw FitError("b is undefined: all system energies are equal");
  fit.b = sum / fit.n_pairs;
  return fit;
}

double delta(const ReducedDensityMatrix& rdm, const SpectrumSummary& hs_spectrum, double b) {
  const Eigen::VectorXd& e = hs_spectrum.eigenvalues;
  if (e.size() != rdm.dim()) throw DimensionError("spectrum does not match the density matrix");
  // Shift by the energy that keeps every exponent non-positive.
  const double shift = b >= 0.0 ? e.minCoeff() : e.maxCoeff();
  Eigen::VectorXd p(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) p(i) = std::exp(-b * (e(i) - shift));
  p /= p.sum();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const double d = rdm(i, i).real() - p(i);
    sum += d * d;
  }
  return std::sqrt(sum);
}

MeasureReport measure(const ReducedDensityMatrix& rdm, const SpectrumSummary& hs_spectrum,
                      double beta_ref) {
  MeasureReport r;
  r.beta_ref = beta_ref;
  r.sigma = sigma(rdm);
  const BFit fit = fit_b(rdm, hs_spectrum);
  r.b = fit.b;
  r.b_floored = fit.floored;
  r.delta = delta(rdm, hs_spectrum, fit.b);
  r.delta_beta = delta(rdm, hs_spectrum, beta_ref);
  return r;
}

std::uint64_t ududy_system_index(int n_system) {
  std::uint64_t index = 0;
  for (int s = 1; s < n_system; s += 2) index |= std::uint64_t{1} << s;
  return index;
}

StateVector prepare_initial_state(const SpinModel& model, InitialState kind, double beta,
                                  std::uint64_t seed) {
  if (kind == InitialState::X) {
    return canonical_thermal_state(model, {.beta = beta, .seed = seed}).state;
  }
  model.validate();
  const StateVector env0 = random_state(model.env_dim(), seed);
  ChebyshevPropagator env(BondOperator::compile(model, Part::Environment, Space::Local));
  const StateVector e = env.imaginary_time(env0, beta).state;
  const std::uint64_t ds = model.system_dim();
  const std::uint64_t s = ududy_system_index(model.n_system);
  CVector amps(model.dim());
  for (std::uint64_t p = 0; p < e.dim(); ++p) amps[s + ds * p] = e[p];
  return StateVector(std::move(amps));
}

std::vector<TracePoint> trace_time_series(const SpinModel& model, const StateVector& initial,
                                          double t_max, double dt,
                                          const SpectrumSummary& hs_spectrum) {
  if (!hs_spectrum.eigenvectors) throw std::invalid_argument("H_S eigenvectors are required");
  if (!(dt > 0.0) || !(t_max >= 0.0)) throw std::invalid_argument("need dt > 0 and t_max >= 0");
  const auto steps = static_cast<long>(std::llround(t_max / dt));
  ChebyshevPropagator prop(BondOperator::compile(model, Part::Full));
  std::vector<TracePoint> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  StateVector psi = initial;
  for (long k = 0; k <= steps; ++k) {
    if (k > 0) psi = prop.real_time(psi, dt);
    const ReducedDensityMatrix rdm = reduce_to_system(psi, model.n_system, *hs_spectrum.eigenvectors);
    TracePoint p;
    p.t = static_cast<double>(k) * dt;
    p.sigma = sigma(rdm);
    const BFit fit = fit_b(rdm, hs_spectrum);
    p.b = fit.b;
    p.delta = delta(rdm, hs_spectrum, fit.b);
    out.push_back(p);
  }
  return out;
}

SeriesStats time_average(const std::vector<TracePoint>& series, double t_burn) {
  SeriesStats s;
  double sum = 0.0, sum2 = 0.0;
  for (const TracePoint& p : series) {
    if (p.t <= t_burn) continue;
    ++s.n;
    sum += p.sigma;
  }
  if (s.n == 0) return s;
  s.mean = sum / static_cast<double>(s.n);
  for (const TracePoint& p : series) {
    if (p.t > t_burn) sum2 += (p.sigma - s.mean) * (p.sigma - s.mean);
  }
  s.stddev = s.n > 1 ? std::sqrt(sum2 / static_cast<double>(s.n - 1)) : 0.0;
  return s;
}

}  // namespace spinbath
