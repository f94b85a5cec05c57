#include "spinbath/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "spinbath/bench.hpp"
#include "spinbath/observe.hpp"
#include "spinbath/propagate.hpp"
#include "spinbath/rng.hpp"
#include "spinbath/spectrum.hpp"
#include "spinbath/theory.hpp"

namespace spinbath {
namespace {

using bench::ExperimentConfig;
using bench::Mode;
using bench::ResultTable;
using bench::Row;

std::string fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

// point -> row, for one row kind
std::map<int, const Row*> rows_of(const ResultTable& t, const std::string& kind) {
  std::map<int, const Row*> out;
  for (const Row& r : t.rows) {
    if (r.kind == kind) out[r.point] = &r;
  }
  return out;
}

// |mean - target| / stderr
double z_score(double mean, double stderr_, double target) {
  return std::abs(mean - target) / stderr_;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Context {
  int workers = 0;
  std::optional<ResultTable> chain_ensemble;  // shared by criteria 2 and 3
};

std::vector<double> criterion_temperatures() {
  std::vector<double> t;
  const double lo = std::log(0.02), hi = std::log(10.0);
  for (int i = 0; i < 12; ++i) t.push_back(std::exp(lo + (hi - lo) * i / 11.0));
  return t;
}

const ResultTable& chain_ensemble(Context& ctx) {
  if (!ctx.chain_ensemble) {
    ExperimentConfig c;
    c.mode = Mode::TheoryOverlay;
    c.model = "chain";
    c.n_sys_list = {4};
    c.n_env_list = {8};
    c.lambda_list = {0.0};
    for (double t : criterion_temperatures()) c.beta_list.push_back(1.0 / t);
    c.realizations = 1000;
    c.seed = 0xf18;
    ctx.chain_ensemble = bench::run(c, ctx.workers);
  }
  return *ctx.chain_ensemble;
}

CriterionResult infinite_temperature(Context& ctx) {
  CriterionResult r{1, "infinite-temperature ensemble values", true, "", 0.0};
  ExperimentConfig c;
  c.mode = Mode::StaticMeasure;
  c.model = "chain";
  c.n_sys_list = {2, 3};
  c.n_env_list = {6, 8};
  c.lambda_list = {0.0};
  c.beta_list = {0.0};
  c.realizations = 2000;
  c.seed = 0xb0;
  const ResultTable t = bench::run(c, ctx.workers);
  const auto mean = rows_of(t, "mean");
  const auto err = rows_of(t, "stderr");
  double worst = 0.0;
  for (const auto& [p, m] : mean) {
    const LimitPair ref = infinite_temperature_scaling(std::uint64_t{1} << m->n_sys,
                                                       std::uint64_t{1} << m->n_env);
    const double zs = z_score(m->values[1], err.at(p)->values[1], ref.sigma2);
    const double zd = z_score(m->values[4], err.at(p)->values[4], ref.delta2);
    worst = std::max({worst, zs, zd});
  }
  r.passed = t.all_ok() && mean.size() == 4 && worst < 3.0;
  r.detail = "4 sizes x 2000 states, max |z| = " + fmt("%.2f", worst);
  return r;
}

CriterionResult sigma_theory(Context& ctx) {
  CriterionResult r{2, "sigma^2 ensemble vs full second-order prediction", true, "", 0.0};
  const ResultTable& t = chain_ensemble(ctx);
  const auto mean = rows_of(t, "mean");
  const auto err = rows_of(t, "stderr");
  const auto theory = rows_of(t, "theory");
  double worst = 0.0;
  double plateau = 0.0, lowest_t_beta = 0.0;
  for (const auto& [p, m] : mean) {
    worst = std::max(worst, z_score(m->values[1], err.at(p)->values[1], theory.at(p)->values[1]));
    if (m->beta > lowest_t_beta) {
      lowest_t_beta = m->beta;
      plateau = std::sqrt(m->values[1]);
    }
  }
  r.passed = t.all_ok() && mean.size() == 12 && worst < 3.0 && std::abs(plateau - 0.21) <= 0.01;
  r.detail = "12 temperatures x 1000 states, max |z| = " + fmt("%.2f", worst) +
             ", sqrt E(sigma^2) at T=0.02 is " + fmt("%.4f", plateau);
  return r;
}

CriterionResult delta_theory(Context& ctx) {
  CriterionResult r{3, "delta^2 ensemble vs full second-order prediction", true, "", 0.0};
  const ResultTable& t = chain_ensemble(ctx);
  const auto mean = rows_of(t, "mean");
  const auto err = rows_of(t, "stderr");
  const auto theory = rows_of(t, "theory");
  double worst = 0.0;
  for (const auto& [p, m] : mean) {
    worst = std::max(worst, z_score(m->values[4], err.at(p)->values[4], theory.at(p)->values[4]));
  }
  const SpinModel model = build_chain_model(4, 8, 1.0, 1.0, 1.0, 0.0);
  // Deep enough that the first excited level of either part carries weight e^-40.
  double gap = std::numeric_limits<double>::infinity();
  for (Part part : {Part::System, Part::Environment}) {
    const SpectrumSummary s = diagonalize(model, part);
    gap = std::min(gap, s.eigenvalues[s.ground_degeneracy()] - s.eigenvalues[0]);
  }
  const double beta = 40.0 / gap;
  const PredictionInputs in = prediction_inputs(model, beta);
  const int gs = in.thermo_s.ground_degeneracy(), ge = in.thermo_e.ground_degeneracy();
  const LimitPair lim = low_temperature_limits(gs, ge, in.d_s, in.d_e);
  const double rel = std::abs(delta2_full(in) - lim.delta2) / lim.delta2;
  r.passed = t.all_ok() && mean.size() == 12 && worst < 3.0 && gs == 5 && ge == 9 && rel < 0.01;
  r.detail = "max |z| = " + fmt("%.2f", worst) + ", g_S=" + std::to_string(gs) +
             " g_E=" + std::to_string(ge) + ", beta=" + fmt("%.0f", beta) +
             " vs limit rel. diff " + fmt("%.1e", rel);
  return r;
}

CriterionResult nondegenerate_contrast(Context& ctx) {
  CriterionResult r{4, "non-degenerate system ground state suppresses sigma", true, "", 0.0};
  ExperimentConfig c;
  c.mode = Mode::StaticMeasure;
  c.model = "chain";
  c.j = -1.0;
  c.omega = 1.0;
  c.n_sys_list = {4};
  c.n_env_list = {8};
  c.lambda_list = {0.0};
  c.beta_list = {50.0};
  c.realizations = 100;
  c.seed = 0xaf;
  const ResultTable t = bench::run(c, ctx.workers);
  const auto mean = rows_of(t, "mean");
  const double sigma = mean.empty() ? NAN : mean.begin()->second->values[0];
  const int gs = diagonalize(build_chain_model(4, 8, -1.0, 1.0, 1.0, 0.0), Part::System)
                     .ground_degeneracy();
  r.passed = t.all_ok() && gs == 1 && sigma < 1e-3;
  r.detail = "g_S=" + std::to_string(gs) + ", mean sigma at beta=50 over 100 states = " +
             fmt("%.2e", sigma);
  return r;
}

CriterionResult symmetry(Context&) {
  CriterionResult r{5, "first-order symmetry traces vanish", true, "", 0.0};
  CounterRng rng(0x5e);
  double worst = 0.0;
  int count = 0;
  for (int m = 0; m < 10; ++m) {
    const int ns = 2 + m % 3, ne = 4 + m % 5;
    const double beta = rng.uniform(0.1, 3.0);
    const SpinModel ring = build_ring_model(ns, ne, rng.uniform(-1.5, 1.5), rng.next_u64(),
                                            rng.next_u64(), 1.0);
    const SpinModel chain = build_chain_model(ns, ne, rng.uniform(-4.0 / 3, 4.0 / 3),
                                              rng.uniform(-4.0 / 3, 4.0 / 3),
                                              rng.uniform(-4.0 / 3, 4.0 / 3), 1.0);
    for (const SpinModel* model : {&ring, &chain}) {
      const SymmetryTraces s = first_order_symmetry_trace(*model, beta);
      worst = std::max({worst, s.relative_a, s.relative_b});
      ++count;
    }
  }
  SpinModel broken = build_ring_model(3, 6, -1.0, 7, 8, 1.0);
  broken.coupling_offset = 0.25;
  const SymmetryTraces b = first_order_symmetry_trace(broken, 1.0);
  r.passed = count == 20 && worst < 1e-10 && b.relative_a > 1e-3 && b.relative_b > 1e-3;
  r.detail = std::to_string(count) + " models, max relative trace " + fmt("%.1e", worst) +
             "; broken model " + fmt("%.3f", std::min(b.relative_a, b.relative_b));
  return r;
}

CriterionResult propagators(Context&) {
  CriterionResult r{6, "Chebyshev propagators match dense exponentials", true, "", 0.0};
  double worst_diff = 0.0, worst_norm = 0.0;
  const SpinModel models[] = {build_ring_model(4, 6, -1.0, 5, 6, 1.0),
                              build_chain_model(4, 6, 1.0, 1.0, 1.0, 1.0)};
  std::uint64_t seed = 60;
  for (const SpinModel& model : models) {
    const BondOperator op = BondOperator::compile(model, Part::Full);
    const ExactPropagator exact(op);
    ChebyshevPropagator cheb(op);
    const double width = exact.eigenvalues().maxCoeff() - exact.eigenvalues().minCoeff();
    for (double scaled : {1.0, 10.0, 100.0}) {
      const StateVector psi = random_state(op.dim(), ++seed);
      const StateVector a = cheb.real_time(psi, scaled / width);
      const StateVector b = exact.real_time(psi, scaled / width);
      const ThermalState ta = cheb.imaginary_time(psi, scaled / width);
      const ThermalState tb = exact.imaginary_time(psi, scaled / width);
      for (std::uint64_t k = 0; k < op.dim(); ++k) {
        worst_diff = std::max({worst_diff, std::abs(a[k] - b[k]), std::abs(ta.state[k] - tb.state[k])});
      }
      worst_diff = std::max(worst_diff, std::abs(ta.log_norm_factor - tb.log_norm_factor));
      worst_norm = std::max(worst_norm, std::abs(a.norm() - 1.0));
    }
  }
  r.passed = worst_diff < 1e-10 && worst_norm < 1e-12;
  r.detail = "N=10, scaled times 1..100: max elementwise diff " + fmt("%.1e", worst_diff) +
             ", norm drift " + fmt("%.1e", worst_norm);
  return r;
}

CriterionResult stationarity(Context& ctx) {
  CriterionResult r{7, "canonical thermal states are stationary", true, "", 0.0};
  const SpinModel model = build_ring_model(4, 8, -1.0, 21, 22, 1.0);
  const SpectrumSummary hs = diagonalize(model, Part::System, true);
  const StateVector psi = prepare_initial_state(model, InitialState::X, 0.9, 0x77);
  const auto series = trace_time_series(model, psi, 300.0, 0.5, hs);
  const SeriesStats all = time_average(series, -1.0);
  double max_dev = 0.0;
  for (const TracePoint& p : series) max_dev = std::max(max_dev, std::abs(p.sigma - all.mean));
  const bool flat = max_dev < 5.0 * all.stddev;

  ExperimentConfig c;
  c.mode = Mode::StaticMeasure;
  c.model = "ring";
  c.j = -1.0;
  c.coupling_seed = 21;
  c.env_seed = 22;
  c.n_sys_list = {4};
  c.n_env_list = {8};
  c.lambda_list = {0.0};
  c.beta_list = {0.9};
  c.realizations = 100;
  c.seed = 0x7b;
  const ResultTable t = bench::run(c, ctx.workers);
  const auto mean = rows_of(t, "mean");
  const auto err = rows_of(t, "stderr");
  const double b = mean.empty() ? NAN : mean.begin()->second->values[5];
  const double zb = mean.empty() ? NAN : z_score(b, err.begin()->second->values[5], 0.9);
  r.passed = flat && t.all_ok() && zb < 3.0;
  r.detail = std::to_string(series.size()) + " samples, max deviation / std = " +
             fmt("%.2f", max_dev / all.stddev) + "; lambda=0 mean b = " + fmt("%.4f", b) +
             " (|z| = " + fmt("%.2f", zb) + ")";
  return r;
}

CriterionResult exponents(Context&) {
  CriterionResult r{8, "coupled-regime scaling exponents", true, "", 0.0};
  const int ns = 2, ne = 10;
  const SpinModel base = build_ring_model(ns, ne, -1.0, 31, 32, 1.0);
  const SpectrumSummary hs = diagonalize(base, Part::System, true);
  const std::vector<double> lambdas = {0.2, 0.4, 0.6, 0.8, 1.0};
  const std::vector<double> betas = {0.15, 0.3, 0.45, 0.6, 0.75, 0.9};
  std::vector<double> sig_l, sig_b;
  for (double lambda : lambdas) {
    SpinModel m = base;
    m.lambda = lambda;
    const SpectrumSummary full = diagonalize(m, Part::Full, true);
    sig_l.push_back(sigma(thermal_reduced_density_matrix(full, ns, 0.9, *hs.eigenvectors)));
    if (lambda == 1.0) {
      for (double beta : betas) {
        sig_b.push_back(sigma(thermal_reduced_density_matrix(full, ns, beta, *hs.eigenvectors)));
      }
    }
  }
  const double el = slope(lambdas, sig_l);
  const double eb = slope(betas, sig_b);
  r.passed = std::abs(el - 2.0) <= 0.5 && std::abs(eb - 3.0) <= 0.8;
  r.detail = "exponent in lambda " + fmt("%.2f", el) + ", in beta " + fmt("%.2f", eb);
  return r;
}

CriterionResult diagnostics(Context& ctx) {
  CriterionResult r{9, "random-state moments and normalization diagnostic", true, "", 0.0};
  ExperimentConfig m;
  m.mode = Mode::MomentCheck;
  m.n_sys_list = {2};
  m.n_env_list = {2};
  m.lambda_list = {0.0};
  m.beta_list = {0.0};
  m.realizations = 10000;
  m.seed = 0x90;
  const ResultTable mt = bench::run(m, ctx.workers);
  const auto mean = rows_of(mt, "mean");
  const auto err = rows_of(mt, "stderr");
  const auto theory = rows_of(mt, "theory");
  double worst = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    worst = std::max(worst, z_score(mean.at(0)->values[c], err.at(0)->values[c],
                                    theory.at(0)->values[c]));
  }

  ExperimentConfig n;
  n.mode = Mode::NormalizationDiag;
  n.model = "chain";
  n.n_sys_list = {2};
  n.n_env_list = {4, 5, 6, 7, 8, 9, 10, 11, 12};
  n.lambda_list = {0.0};
  n.beta_list = {1.0};
  n.realizations = 200;
  n.seed = 0x91;
  const ResultTable nt = bench::run(n, ctx.workers);
  std::vector<double> medians;
  for (const auto& [p, row] : rows_of(nt, "median")) medians.push_back(row->values[0]);
  bool monotone = medians.size() == 9;
  for (std::size_t i = 1; i < medians.size(); ++i) monotone = monotone && medians[i] < medians[i - 1];
  r.passed = mt.all_ok() && nt.all_ok() && worst < 3.0 && monotone;
  r.detail = "moments max |z| = " + fmt("%.2f", worst) + "; median diff D=2^6 " +
             fmt("%.2e", medians.empty() ? NAN : medians.front()) + " -> D=2^14 " +
             fmt("%.2e", medians.empty() ? NAN : medians.back()) +
             (monotone ? ", decreasing" : ", NOT monotone");
  return r;
}

}  // namespace

std::string format_criterion(const CriterionResult& result) {
  std::ostringstream out;
  out << (result.passed ? "PASS" : "FAIL") << ' ' << result.id << ' ' << result.name << " ("
      << fmt("%.1f", result.seconds) << " s): " << result.detail;
  return out.str();
}

std::vector<CriterionResult> run_acceptance(
    const std::vector<int>& only, const std::function<void(const CriterionResult&)>& report,
    int workers) {
  using Fn = CriterionResult (*)(Context&);
  const Fn criteria[] = {infinite_temperature, sigma_theory, delta_theory,
                         nondegenerate_contrast, symmetry, propagators,
                         stationarity, exponents, diagnostics};
  Context ctx;
  ctx.workers = workers;
  std::vector<CriterionResult> results;
  for (int id = 1; id <= 9; ++id) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = criteria[id - 1](ctx);
    } catch (const std::exception& e) {
      res = {id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), 0.0};
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (report) report(res);
    results.push_back(res);
  }
  return results;
}

}  // namespace spinbath
