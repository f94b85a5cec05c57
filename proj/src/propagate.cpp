#include "spinbath/propagate.hpp"

#include <algorithm>
#include <cmath>

#include "spinbath/kernels.hpp"
#include "spinbath/rng.hpp"
#include "spinbath/spectrum.hpp"

namespace spinbath {
namespace {

constexpr double kRescaleAbove = 1e250;

// Starting index for Miller's algorithm: far enough above both n and x that
// the neglected dominant solution has died out by the time we reach n.
int miller_start(double ax, int n) {
  const int top = std::max(n, static_cast<int>(std::ceil(ax)));
  return 2 * ((top + static_cast<int>(std::sqrt(40.0 * top)) + 20) / 2);
}

// Downward recurrence v_{k-1} = (2k/x) v_k + sign * v_{k+1}, rescaled as it
// grows. Returns v_0 .. v_m up to a common factor.
std::vector<double> downward(double ax, int m, double sign) {
  std::vector<double> v(static_cast<std::size_t>(m) + 2, 0.0);
  v[static_cast<std::size_t>(m)] = 1.0;
  for (int k = m; k > 0; --k) {
    const auto uk = static_cast<std::size_t>(k);
    v[uk - 1] = (2.0 * k / ax) * v[uk] + sign * v[uk + 1];
    if (std::abs(v[uk - 1]) > kRescaleAbove) {
      for (std::size_t i = uk - 1; i < v.size(); ++i) v[i] /= kRescaleAbove;
    }
  }
  return v;
}

EnergyBounds usable(EnergyBounds b) {
  const double floor = 1e-12 * std::max(1.0, std::abs(b.center()));
  if (b.half_width() < floor) {
    const double c = b.center();
    b = {c - floor, c + floor};
  }
  return b;
}

ChebyshevPlan build_plan(const EnergyBounds& raw, double arg, bool real, double tolerance,
                         int max_order) {
  if (!std::isfinite(arg)) throw std::invalid_argument("propagation argument is not finite");
  if (!real && arg < 0.0) throw std::invalid_argument("beta must be non-negative");
  if (max_order < 1) throw std::invalid_argument("max_order must be at least 1");
  const EnergyBounds bounds = usable(raw);
  ChebyshevPlan plan;
  plan.e_min = bounds.lower;
  plan.e_max = bounds.upper;
  plan.tolerance = tolerance;
  const double h = bounds.half_width();
  const double c = bounds.center();
  const double a = real ? arg * h : 0.5 * arg * h;
  const cplx phase = real ? std::exp(cplx{0.0, -arg * c}) : cplx{1.0, 0.0};
  plan.log_prefactor = real ? 0.0 : -0.5 * arg * plan.e_min;

  int length = static_cast<int>(std::abs(a) + 10.0 * std::cbrt(std::abs(a)) + 40.0);
  for (;;) {
    length = std::min(length, max_order + 1);
    const std::vector<double> seq =
        real ? bessel_j_sequence(a, length) : scaled_bessel_i_sequence(a, length);
    std::vector<cplx> coeffs(seq.size());
    // (-i)^k for real time, (-1)^k for imaginary time
    const cplx step = real ? cplx{0.0, -1.0} : cplx{-1.0, 0.0};
    cplx unit{1.0, 0.0};
    double largest = 0.0;
    for (std::size_t k = 0; k < seq.size(); ++k) {
      coeffs[k] = (k == 0 ? 1.0 : 2.0) * seq[k] * unit * phase;
      unit *= step;
      largest = std::max(largest, std::abs(coeffs[k]));
    }
    const double cut = tolerance * largest;
    for (std::size_t k = 1; k + 1 < coeffs.size(); ++k) {
      if (std::abs(coeffs[k]) < cut && std::abs(coeffs[k + 1]) < cut) {
        coeffs.resize(k + 2);
        plan.order = static_cast<int>(coeffs.size());
        plan.coefficients = std::move(coeffs);
        return plan;
      }
    }
    if (length > max_order) {
      throw OrderOverflowError("Chebyshev expansion needs more than " +
                               std::to_string(max_order) +
                               " terms; raise max_order or reduce the time step");
    }
    length *= 2;
  }
}

}  // namespace

std::vector<double> bessel_j_sequence(double x, int n) {
  if (n < 0) throw std::invalid_argument("negative Bessel order");
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const double ax = std::abs(x);
  const int m = miller_start(ax, n);
  const std::vector<double> v = downward(ax, m, -1.0);
  // J_0 + 2 sum J_{2k} = 1
  double norm = v[0];
  for (int k = 2; k <= m; k += 2) norm += 2.0 * v[static_cast<std::size_t>(k)];
  for (int k = 0; k <= n; ++k) {
    double jk = v[static_cast<std::size_t>(k)] / norm;
    if (x < 0.0 && (k & 1)) jk = -jk;
    out[static_cast<std::size_t>(k)] = jk;
  }
  return out;
}

std::vector<double> scaled_bessel_i_sequence(double x, int n) {
  if (n < 0) throw std::invalid_argument("negative Bessel order");
  if (x < 0.0) throw std::invalid_argument("scaled_bessel_i_sequence needs x >= 0");
  std::vector<double> out(static_cast<std::size_t>(n) + 1, 0.0);
  if (x == 0.0) {
    out[0] = 1.0;
    return out;
  }
  const int m = miller_start(x, n);
  const std::vector<double> v = downward(x, m, 1.0);
  // e^{-x} (I_0 + 2 sum_k I_k) = 1
  double norm = v[0];
  for (int k = 1; k <= m; ++k) norm += 2.0 * v[static_cast<std::size_t>(k)];
  for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = v[static_cast<std::size_t>(k)] / norm;
  return out;
}

ChebyshevPlan ChebyshevPlan::for_real_time(const EnergyBounds& bounds, double t,
                                           double tolerance, int max_order) {
  return build_plan(bounds, t, true, tolerance, max_order);
}

ChebyshevPlan ChebyshevPlan::for_imaginary_time(const EnergyBounds& bounds, double beta,
                                                double tolerance, int max_order) {
  return build_plan(bounds, beta, false, tolerance, max_order);
}

CVector apply_chebyshev(const BondOperator& op, const ChebyshevPlan& plan,
                        std::span<const cplx> in) {
  const std::uint64_t n = op.dim();
  if (in.size() != n) throw DimensionError("state does not match the operator dimension");
  const auto& k = kernels::active();
  const double c = plan.center();
  const double h = plan.half_width();

  CVector out(in.begin(), in.end());
  k.scale(plan.coefficients[0], out.data(), n);
  if (plan.order < 2) return out;

  CVector cur(in.begin(), in.end()), prev(n), w(n);
  for (int order = 1; order < plan.order; ++order) {
    op.apply(cur, w);
    if (order == 1) {
      k.cheb_step(w.data(), cur.data(), prev.data(), 1.0 / h, -c / h, n);
    } else {
      k.cheb_step(w.data(), cur.data(), prev.data(), 2.0 / h, -2.0 * c / h, n);
    }
    std::swap(cur, prev);
    k.axpy(plan.coefficients[static_cast<std::size_t>(order)], cur.data(), out.data(), n);
  }
  return out;
}

StateVector random_state(std::uint64_t dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("random_state needs dim >= 1");
  CounterRng rng(seed);
  CVector amps(dim);
  for (auto& a : amps) {
    const auto [re, im] = rng.gaussian_pair();
    a = {re, im};
  }
  return StateVector(std::move(amps));
}

ChebyshevPropagator::ChebyshevPropagator(BondOperator op, double tolerance, int max_order)
    : op_(std::move(op)),
      tolerance_(tolerance),
      max_order_(max_order),
      real_bounds_(op_.gershgorin_bounds()) {}

const EnergyBounds& ChebyshevPropagator::thermal_bounds() {
  if (!thermal_bounds_) {
    thermal_bounds_ = std::make_unique<EnergyBounds>(tightened_energy_bounds(op_));
  }
  return *thermal_bounds_;
}

const ChebyshevPlan& ChebyshevPropagator::plan(std::map<double, ChebyshevPlan>& cache,
                                               double arg, bool real) {
  auto it = cache.find(arg);
  if (it == cache.end()) {
    ChebyshevPlan p = real ? ChebyshevPlan::for_real_time(real_bounds_, arg, tolerance_,
                                                          max_order_)
                           : ChebyshevPlan::for_imaginary_time(thermal_bounds(), arg,
                                                               tolerance_, max_order_);
    it = cache.emplace(arg, std::move(p)).first;
  }
  return it->second;
}

ThermalState project_thermal(const BondOperator& op, const ChebyshevPlan& plan,
                             const StateVector& psi) {
  CVector v = apply_chebyshev(op, plan, psi.amplitudes());
  const double n2 = kernels::active().norm2(v.data(), v.size());
  ThermalState out;
  out.log_norm_factor = 2.0 * plan.log_prefactor + std::log(n2);
  out.norm_factor = std::exp(out.log_norm_factor);
  out.state = StateVector(std::move(v));
  return out;
}

ThermalState ChebyshevPropagator::imaginary_time(const StateVector& psi, double beta) {
  if (beta == 0.0) return {psi, 1.0, 0.0};
  return project_thermal(op_, plan(imag_plans_, beta, false), psi);
}

StateVector ChebyshevPropagator::real_time(const StateVector& psi, double t) {
  if (t == 0.0) return psi;
  return StateVector::adopt(apply_chebyshev(op_, plan(real_plans_, t, true), psi.amplitudes()));
}

ExactPropagator::ExactPropagator(const BondOperator& op, std::uint64_t max_dim) {
  if (op.dim() > max_dim) {
    throw SizeError("exact propagation of dimension " + std::to_string(op.dim()) +
                    " exceeds the cap " + std::to_string(max_dim));
  }
  SpectrumSummary s = diagonalize_matrix(op.to_dense(), true);
  energies_ = std::move(s.eigenvalues);
  vectors_ = std::move(*s.eigenvectors);
}

namespace {

// V diag(f) V^T psi, done on the real and imaginary parts separately.
CVector spectral_apply(const Eigen::MatrixXd& v, const Eigen::VectorXcd& f,
                       std::span<const cplx> psi) {
  const auto n = static_cast<Eigen::Index>(psi.size());
  Eigen::VectorXd re(n), im(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    re(i) = psi[static_cast<std::size_t>(i)].real();
    im(i) = psi[static_cast<std::size_t>(i)].imag();
  }
  const Eigen::VectorXd cre = v.transpose() * re;
  const Eigen::VectorXd cim = v.transpose() * im;
  Eigen::VectorXd yre(n), yim(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx c = f(i) * cplx{cre(i), cim(i)};
    yre(i) = c.real();
    yim(i) = c.imag();
  }
  const Eigen::VectorXd ore = v * yre;
  const Eigen::VectorXd oim = v * yim;
  CVector out(psi.size());
  for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = {ore(i), oim(i)};
  return out;
}

}  // namespace

ThermalState ExactPropagator::imaginary_time(const StateVector& psi, double beta) const {
  if (psi.dim() != static_cast<std::uint64_t>(energies_.size())) {
    throw DimensionError("state does not match the operator dimension");
  }
  if (beta == 0.0) return {psi, 1.0, 0.0};
  const double e0 = energies_(0);
  Eigen::VectorXcd f(energies_.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = std::exp(-0.5 * beta * (energies_(i) - e0));
  CVector v = spectral_apply(vectors_, f, psi.amplitudes());
  const double n2 = kernels::active().norm2(v.data(), v.size());
  ThermalState out;
  out.log_norm_factor = -beta * e0 + std::log(n2);
  out.norm_factor = std::exp(out.log_norm_factor);
  out.state = StateVector(std::move(v));
  return out;
}

StateVector ExactPropagator::real_time(const StateVector& psi, double t) const {
  if (psi.dim() != static_cast<std::uint64_t>(energies_.size())) {
    throw DimensionError("state does not match the operator dimension");
  }
  Eigen::VectorXcd f(energies_.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = std::exp(cplx{0.0, -t * energies_(i)});
  return StateVector::adopt(spectral_apply(vectors_, f, psi.amplitudes()));
}

ThermalState canonical_thermal_state(const SpinModel& model,
                                     const ThermalStateRequest& request) {
  if (!std::isfinite(request.beta) || request.beta < 0.0) {
    throw std::invalid_argument("beta must be finite and non-negative");
  }
  model.validate();
  StateVector psi0 = random_state(model.dim(), request.seed);
  if (request.beta == 0.0) return {std::move(psi0), 1.0, 0.0};
  BondOperator op = BondOperator::compile(model, Part::Full);
  if (request.method == PropagationMethod::Exact) {
    return ExactPropagator(op).imaginary_time(psi0, request.beta);
  }
  ChebyshevPropagator prop(std::move(op), request.tolerance, request.max_order);
  return prop.imaginary_time(psi0, request.beta);
}

StateVector evolve_real_time(const SpinModel& model, const StateVector& state, double t) {
  const BondOperator op = BondOperator::compile(model, Part::Full);
  return evolve_real_time(model, state,
                          ChebyshevPlan::for_real_time(op.gershgorin_bounds(), t));
}

StateVector evolve_real_time(const SpinModel& model, const StateVector& state,
                             const ChebyshevPlan& plan) {
  const BondOperator op = BondOperator::compile(model, Part::Full);
  return StateVector::adopt(apply_chebyshev(op, plan, state.amplitudes()));
}

std::vector<double> normalization_diagnostic(const SpinModel& model, double beta,
                                             int n_realizations, std::uint64_t seed) {
  model.validate();
  if (model.lambda != 0.0) {
    throw ConfigError("normalization_diagnostic needs an uncoupled model (lambda = 0)");
  }
  if (model.dim() > kDefaultMaxDenseDim) {
    throw SizeError("normalization_diagnostic is limited to D <= " +
                    std::to_string(kDefaultMaxDenseDim));
  }
  auto weights = [beta](const SpectrumSummary& s) {
    const ThermoFunctions t(s);
    const double total = t.shifted_sum(beta);
    std::vector<double> p(s.dim());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = std::exp(-beta * (s.eigenvalues(static_cast<Eigen::Index>(i)) - t.ground_energy())) / total;
    }
    return p;
  };
  const std::vector<double> ps = weights(diagonalize(model, Part::System));
  const std::vector<double> pe = weights(diagonalize(model, Part::Environment));
  const std::uint64_t d = model.dim();
  const std::uint64_t ds = model.system_dim();

  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(std::max(n_realizations, 0)));
  for (int r = 0; r < n_realizations; ++r) {
    const StateVector psi = random_state(d, derive_seed(seed, 0, static_cast<std::uint64_t>(r)));
    double sum = 0.0;
    for (std::uint64_t k = 0; k < d; ++k) {
      sum += std::norm(psi[k]) * ps[k % ds] * pe[k / ds];
    }
    diffs.push_back(std::abs(sum - 1.0 / static_cast<double>(d)));
  }
  return diffs;
}

}  // namespace spinbath
