#include "spinbath/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace spinbath {
namespace {

struct Ratios {
  double s2, s3, e2, e3;
};

Ratios ratios(const PredictionInputs& in) {
  in.validate();
  return {in.thermo_s.z_ratio(2, in.beta), in.thermo_s.z_ratio(3, in.beta),
          in.thermo_e.z_ratio(2, in.beta), in.thermo_e.z_ratio(3, in.beta)};
}

// Weighted single-spin expectations Tr(W S^x_a) and Tr(W S^z_a) for
// W = V diag(w) V^T over n_bits spins. S^y gives zero for real symmetric W.
struct SpinTraces {
  std::vector<double> x, z;
};

SpinTraces spin_traces(const Eigen::MatrixXd& w, int n_bits) {
  SpinTraces t;
  t.x.assign(static_cast<std::size_t>(n_bits), 0.0);
  t.z.assign(static_cast<std::size_t>(n_bits), 0.0);
  for (int a = 0; a < n_bits; ++a) {
    const Eigen::Index bit = Eigen::Index{1} << a;
    double x = 0.0, z = 0.0;
    for (Eigen::Index k = 0; k < w.rows(); ++k) {
      z += (k & bit ? -0.5 : 0.5) * w(k, k);
      x += 0.5 * w(k, k ^ bit);
    }
    t.x[static_cast<std::size_t>(a)] = x;
    t.z[static_cast<std::size_t>(a)] = z;
  }
  return t;
}

Eigen::MatrixXd boltzmann(const SpectrumSummary& s, double beta) {
  const Eigen::MatrixXd& v = *s.eigenvectors;
  Eigen::VectorXd w(s.eigenvalues.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    w(k) = std::exp(-beta * (s.eigenvalues(k) - s.eigenvalues(0)));
  }
  return v * w.asDiagonal() * v.transpose();
}

// Tr(W_S W_E H_SE) for shifted weight matrices on each side.
double coupling_trace(const SpinModel& model, const Eigen::MatrixXd& ws,
                      const Eigen::MatrixXd& we) {
  const SpinTraces s = spin_traces(ws, model.n_system);
  const SpinTraces e = spin_traces(we, model.n_env);
  double sum = model.coupling_offset * ws.trace() * we.trace();
  for (const Bond& b : model.coupling_bonds) {
    const auto i = static_cast<std::size_t>(b.i);
    const auto j = static_cast<std::size_t>(b.j);
    sum -= b.x * s.x[i] * e.x[j] + b.z * s.z[i] * e.z[j];
  }
  return sum;
}

}  // namespace

void PredictionInputs::validate() const {
  if (thermo_s.dimension() != d_s || thermo_e.dimension() != d_e) {
    throw std::invalid_argument("spectrum sizes do not match D_S and D_E");
  }
  if (!std::isfinite(beta) || beta < 0.0) {
    throw std::invalid_argument("beta must be finite and non-negative");
  }
}

PredictionInputs prediction_inputs(const SpinModel& model, double beta) {
  PredictionInputs in;
  in.thermo_s = thermo(diagonalize(model, Part::System));
  in.thermo_e = thermo(diagonalize(model, Part::Environment));
  in.d_s = model.system_dim();
  in.d_e = model.env_dim();
  in.beta = beta;
  in.validate();
  return in;
}

double sigma2_leading(const PredictionInputs& in) {
  const Ratios x = ratios(in);
  const double d = in.d();
  return d / (2.0 * (d + 1.0)) * (1.0 - x.s2) * x.e2;
}

double sigma2_full(const PredictionInputs& in) {
  const Ratios x = ratios(in);
  const double d = in.d();
  const double f = d / (d + 1.0);
  return 0.5 * x.e2 * (1.0 - x.s2) - 2.0 * f * x.e3 * (x.s2 - x.s3) +
         1.5 * f * x.e2 * x.e2 * x.s2 * (1.0 - x.s2);
}

double delta2_leading(const PredictionInputs& in) {
  const Ratios x = ratios(in);
  const double d = in.d();
  return d / (d + 1.0) * x.s2 * (x.e2 - 1.0 / d);
}

double delta2_full(const PredictionInputs& in, double delta_b) {
  const Ratios x = ratios(in);
  const double d = in.d();
  double value = d / (d + 1.0) * x.e2 * (x.s2 - 2.0 * x.s3 + x.s2 * x.s2);
  if (delta_b != 0.0) {
    const double shift = in.thermo_s.energy(2.0 * in.beta) - in.thermo_s.energy(in.beta);
    value += x.s2 * (in.thermo_s.energy_variance(2.0 * in.beta) + shift * shift) *
             delta_b * delta_b;
  }
  return value;
}

LimitPair low_temperature_limits(int g_s, int g_e, std::uint64_t d_s, std::uint64_t d_e) {
  if (g_s < 1 || g_e < 1 || d_s < 1 || d_e < 1) {
    throw std::invalid_argument("degeneracies and dimensions must be at least 1");
  }
  const double gs = g_s, ge = g_e;
  const double d = static_cast<double>(d_s) * static_cast<double>(d_e);
  LimitPair l;
  l.sigma2 = (gs - 1.0) / (2.0 * gs * ge) * (1.0 - d / ((d + 1.0) * gs * ge));
  l.delta2 = (gs - 1.0) / (gs * gs * ge) * d / (d + 1.0);
  return l;
}

LimitPair infinite_temperature_scaling(std::uint64_t d_s, std::uint64_t d_e) {
  if (d_s < 1 || d_e < 1) throw std::invalid_argument("dimensions must be at least 1");
  const double ds = static_cast<double>(d_s);
  const double d = ds * static_cast<double>(d_e);
  return {(ds - 1.0) / (2.0 * (d + 1.0)), (ds - 1.0) / (ds * (d + 1.0))};
}

SymmetryTraces first_order_symmetry_trace(const SpinModel& model, double beta,
                                          std::uint64_t max_dim) {
  model.validate();
  if (model.dim() > max_dim) {
    throw SizeError("symmetry trace of dimension " + std::to_string(model.dim()) +
                    " exceeds the cap " + std::to_string(max_dim));
  }
  const SpectrumSummary hs = diagonalize(model, Part::System, true);
  const SpectrumSummary he = diagonalize(model, Part::Environment, true);
  const Eigen::MatrixXd s1 = boltzmann(hs, beta), s2 = boltzmann(hs, 2.0 * beta);
  const Eigen::MatrixXd e1 = boltzmann(he, beta), e2 = boltzmann(he, 2.0 * beta);
  const double zs = s1.trace();

  const BondOperator coupling = BondOperator::compile(model, Part::Coupling);
  const EnergyBounds gb = coupling.gershgorin_bounds();
  const double norm = std::max(std::abs(gb.lower), std::abs(gb.upper));

  // Shifted traces; the true values carry e^{-beta (E0_S + E0_E)} and
  // e^{-2 beta (E0_S + E0_E)} respectively.
  const double a = coupling_trace(model, s1, e1);
  const double b = zs * coupling_trace(model, s1, e2) - coupling_trace(model, s2, e2);
  const double e0 = hs.eigenvalues(0) + he.eigenvalues(0);

  SymmetryTraces t;
  t.trace_a = a * std::exp(-beta * e0);
  t.trace_b = b * std::exp(-2.0 * beta * e0);
  const double scale_a = norm * zs * e1.trace();
  const double scale_b = norm * (zs * zs * e2.trace() + s2.trace() * e2.trace());
  t.relative_a = scale_a > 0.0 ? std::abs(a) / scale_a : 0.0;
  t.relative_b = scale_b > 0.0 ? std::abs(b) / scale_b : 0.0;
  return t;
}

std::vector<PredictionRow> prediction_curve(const SpinModel& model,
                                            const std::vector<double>& betas) {
  PredictionInputs in = prediction_inputs(model, 0.0);
  std::vector<PredictionRow> rows;
  rows.reserve(betas.size());
  for (double beta : betas) {
    in.beta = beta;
    rows.push_back({beta, sigma2_leading(in), sigma2_full(in), delta2_leading(in),
                    delta2_full(in)});
  }
  return rows;
}

void write_prediction_csv(std::ostream& out, const std::vector<PredictionRow>& rows) {
  const auto old_precision = out.precision(17);
  out << "beta,sigma2_leading,sigma2_full,delta2_leading,delta2_full\n";
  for (const PredictionRow& r : rows) {
    out << r.beta << ',' << r.sigma2_leading << ',' << r.sigma2_full << ','
        << r.delta2_leading << ',' << r.delta2_full << '\n';
  }
  out.precision(old_precision);
}

}  // namespace spinbath
