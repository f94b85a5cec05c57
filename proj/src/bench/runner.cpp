#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "spinbath/bench.hpp"
#include "spinbath/rng.hpp"
#include "spinbath/spectrum.hpp"
#include "spinbath/theory.hpp"

namespace spinbath::bench {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Everything a realization needs that is shared, read-only, across workers.
struct PointContext {
  SweepPoint point;
  SpinModel model;
  int realizations = 0;
  std::string error;

  SpectrumSummary hs;  // H_S with eigenvectors
  std::unique_ptr<BondOperator> op;
  std::unique_ptr<ChebyshevPlan> thermal_plan;
  std::unique_ptr<ChebyshevPlan> measure_plan;
  std::unique_ptr<ExactPropagator> exact;
  std::vector<double> p_system, p_env;  // normalization_diag weights
};

std::string clean_status(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return "error: " + s;
}

Row base_row(const std::string& kind, const SweepPoint& p, long realization) {
  Row r;
  r.kind = kind;
  r.point = p.index;
  r.realization = realization;
  r.n_sys = p.n_sys;
  r.n_env = p.n_env;
  r.lambda = p.lambda;
  r.beta = p.beta;
  r.t = kNaN;
  return r;
}

std::vector<double> boltzmann_weights(const SpectrumSummary& s, double beta) {
  const ThermoFunctions t(s);
  const double total = t.shifted_sum(beta);
  std::vector<double> p(s.dim());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(-beta * (s.eigenvalues(static_cast<Eigen::Index>(i)) - t.ground_energy())) /
           total;
  }
  return p;
}

void prepare(const ExperimentConfig& config, PointContext& ctx) {
  const SweepPoint& p = ctx.point;
  ctx.model = make_model(config, p);
  ctx.realizations = config.realizations > 0 ? config.realizations
                                             : default_realizations(ctx.model.n_total());
  switch (config.mode) {
    case Mode::StaticMeasure:
    case Mode::TheoryOverlay:
    case Mode::TimeTrace: {
      ctx.hs = diagonalize(ctx.model, Part::System, true);
      ctx.op = std::make_unique<BondOperator>(BondOperator::compile(ctx.model, Part::Full));
      if (config.method == PropagationMethod::Exact) {
        ctx.exact = std::make_unique<ExactPropagator>(*ctx.op);
      } else if (config.mode != Mode::TimeTrace || config.initial_state == InitialState::X) {
        ctx.thermal_plan = std::make_unique<ChebyshevPlan>(ChebyshevPlan::for_imaginary_time(
            tightened_energy_bounds(*ctx.op), p.beta));
      }
      if (config.mode != Mode::TimeTrace && config.t_measure > 0.0 && !ctx.exact) {
        ctx.measure_plan = std::make_unique<ChebyshevPlan>(
            ChebyshevPlan::for_real_time(ctx.op->gershgorin_bounds(), config.t_measure));
      }
      break;
    }
    case Mode::NormalizationDiag: {
      if (ctx.model.lambda != 0.0) {
        throw ConfigError("normalization_diag needs lambda = 0");
      }
      if (ctx.model.dim() > kDefaultMaxDenseDim) {
        throw SizeError("normalization_diag is limited to D <= 2^14");
      }
      ctx.p_system = boltzmann_weights(diagonalize(ctx.model, Part::System), p.beta);
      ctx.p_env = boltzmann_weights(diagonalize(ctx.model, Part::Environment), p.beta);
      break;
    }
    case Mode::SymmetryCheck:
    case Mode::MomentCheck:
      break;
  }
}

StateVector initial_state(const ExperimentConfig& config, const PointContext& ctx,
                          std::uint64_t seed) {
  if (config.initial_state == InitialState::UDUDY) {
    return prepare_initial_state(ctx.model, InitialState::UDUDY, ctx.point.beta, seed);
  }
  const StateVector psi0 = random_state(ctx.model.dim(), seed);
  if (ctx.point.beta == 0.0) return psi0;
  if (ctx.exact) return ctx.exact->imaginary_time(psi0, ctx.point.beta).state;
  return project_thermal(*ctx.op, *ctx.thermal_plan, psi0).state;
}

std::vector<Row> run_realization(const ExperimentConfig& config, const PointContext& ctx,
                                 long r) {
  const SweepPoint& p = ctx.point;
  const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(p.index),
                                         static_cast<std::uint64_t>(r));
  std::vector<Row> rows;
  Row row = base_row("sample", p, r);
  row.n = 1;
  switch (config.mode) {
    case Mode::StaticMeasure:
    case Mode::TheoryOverlay: {
      StateVector psi = initial_state(config, ctx, seed);
      if (config.t_measure > 0.0) {
        psi = ctx.exact ? ctx.exact->real_time(psi, config.t_measure)
                        : StateVector::adopt(
                              apply_chebyshev(*ctx.op, *ctx.measure_plan, psi.amplitudes()));
      }
      row.t = config.t_measure;
      const ReducedDensityMatrix rdm = reduce_to_system(psi, ctx.model.n_system, *ctx.hs.eigenvectors);
      const MeasureReport m = measure(rdm, ctx.hs, p.beta);
      row.values = {m.sigma, m.sigma * m.sigma, m.delta, m.delta_beta,
                    m.delta_beta * m.delta_beta, m.b, m.b_floored ? 1.0 : 0.0};
      rows.push_back(row);
      break;
    }
    case Mode::TimeTrace: {
      const StateVector psi = initial_state(config, ctx, seed);
      for (const TracePoint& tp : trace_time_series(ctx.model, psi, config.t_max, config.dt, ctx.hs)) {
        Row tr = row;
        tr.t = tp.t;
        tr.values = {tp.sigma, tp.delta, tp.b};
        rows.push_back(tr);
      }
      break;
    }
    case Mode::SymmetryCheck: {
      const SpinModel model = make_model(config, p, static_cast<std::uint64_t>(r));
      const SymmetryTraces t = first_order_symmetry_trace(model, p.beta);
      row.values = {t.trace_a, t.trace_b, t.relative_a, t.relative_b};
      rows.push_back(row);
      break;
    }
    case Mode::NormalizationDiag: {
      const StateVector psi = random_state(ctx.model.dim(), seed);
      const std::uint64_t ds = ctx.model.system_dim();
      double sum = 0.0;
      for (std::uint64_t k = 0; k < psi.dim(); ++k) {
        sum += std::norm(psi[k]) * ctx.p_system[k % ds] * ctx.p_env[k / ds];
      }
      row.values = {std::abs(sum - 1.0 / static_cast<double>(psi.dim()))};
      rows.push_back(row);
      break;
    }
    case Mode::MomentCheck: {
      const StateVector psi = random_state(ctx.model.dim(), seed);
      const double a0 = std::norm(psi[0]);
      const double a1 = psi.dim() > 1 ? std::norm(psi[1]) : kNaN;
      row.values = {a0, a0 * a0, a0 * a1};
      rows.push_back(row);
      break;
    }
  }
  return rows;
}

struct Moments {
  double mean = kNaN, stderr_ = kNaN, median = kNaN;
  long n = 0;
};

Moments moments(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return std::isnan(x); }), v.end());
  Moments m;
  m.n = static_cast<long>(v.size());
  if (v.empty()) return m;
  double sum = 0.0;
  for (double x : v) sum += x;
  m.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.stderr_ = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) /
                                 std::sqrt(static_cast<double>(v.size()))
                           : kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  m.median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  return m;
}

// mean / stderr (and median) rows over samples sharing a time stamp.
void aggregate(const ExperimentConfig& config, const SweepPoint& p,
               const std::vector<Row>& samples, std::size_t n_columns, std::vector<Row>& out) {
  std::vector<double> times;
  for (const Row& s : samples) {
    if (s.status == "ok" && std::find(times.begin(), times.end(), s.t) == times.end() &&
        !std::isnan(s.t)) {
      times.push_back(s.t);
    }
  }
  if (times.empty()) times.push_back(kNaN);
  for (double t : times) {
    std::vector<std::vector<double>> cols(n_columns);
    for (const Row& s : samples) {
      if (s.status != "ok") continue;
      if (!(std::isnan(t) ? std::isnan(s.t) : s.t == t)) continue;
      for (std::size_t c = 0; c < n_columns; ++c) cols[c].push_back(s.values[c]);
    }
    Row mean = base_row("mean", p, -1), err = base_row("stderr", p, -1),
        med = base_row("median", p, -1);
    mean.t = err.t = med.t = t;
    for (std::size_t c = 0; c < n_columns; ++c) {
      const Moments m = moments(cols[c]);
      mean.values.push_back(m.mean);
      err.values.push_back(m.stderr_);
      med.values.push_back(m.median);
      mean.n = err.n = med.n = std::max(mean.n, m.n);
    }
    out.push_back(mean);
    out.push_back(err);
    if (config.mode == Mode::NormalizationDiag) out.push_back(med);
  }
}

void theory_rows(const ExperimentConfig& config, const PointContext& ctx, std::vector<Row>& out) {
  const SweepPoint& p = ctx.point;
  Row row = base_row("theory", p, -1);
  if (config.mode == Mode::TheoryOverlay) {
    SpinModel uncoupled = ctx.model;
    uncoupled.lambda = 0.0;
    const PredictionInputs in = prediction_inputs(uncoupled, p.beta);
    const double s2 = sigma2_full(in);
    const double d2 = delta2_full(in);
    row.values = {std::sqrt(std::max(s2, 0.0)), s2, kNaN, std::sqrt(std::max(d2, 0.0)), d2,
                  p.beta, kNaN};
    out.push_back(row);
  } else if (config.mode == Mode::MomentCheck) {
    const double d = static_cast<double>(ctx.model.dim());
    row.values = {1.0 / d, 2.0 / (d * (d + 1.0)), 1.0 / (d * (d + 1.0))};
    out.push_back(row);
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> value_columns(Mode mode) {
  switch (mode) {
    case Mode::StaticMeasure:
    case Mode::TheoryOverlay:
      return {"sigma", "sigma2", "delta", "delta_beta", "delta2_beta", "b", "b_floored"};
    case Mode::TimeTrace: return {"sigma", "delta", "b"};
    case Mode::SymmetryCheck: return {"trace_a", "trace_b", "relative_a", "relative_b"};
    case Mode::NormalizationDiag: return {"diff"};
    case Mode::MomentCheck: return {"m2", "m4", "m22"};
  }
  return {};
}

bool ResultTable::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.status == "ok"; });
}

int worker_count_from_env() {
  if (const char* env = std::getenv("SPINBATH_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ResultTable run(const ExperimentConfig& config, int workers) {
  config.validate();
  if (workers <= 0) workers = worker_count_from_env();
  ResultTable table;
  table.mode = config.mode;
  table.value_columns = value_columns(config.mode);
  const std::size_t n_columns = table.value_columns.size();

  std::vector<PointContext> contexts;
  for (const SweepPoint& p : sweep_points(config)) {
    PointContext ctx;
    ctx.point = p;
    try {
      prepare(config, ctx);
    } catch (const std::exception& e) {
      ctx.error = clean_status(e.what());
    }
    contexts.push_back(std::move(ctx));
  }

  struct Task {
    std::size_t context;
    long realization;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < contexts.size(); ++c) {
    if (!contexts[c].error.empty()) continue;
    for (long r = 0; r < contexts[c].realizations; ++r) tasks.push_back({c, r});
  }

  std::vector<std::vector<Row>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const PointContext& ctx = contexts[tasks[i].context];
      try {
        results[i] = run_realization(config, ctx, tasks[i].realization);
      } catch (const std::exception& e) {
        Row row = base_row("sample", ctx.point, tasks[i].realization);
        row.values.assign(n_columns, kNaN);
        row.status = clean_status(e.what());
        results[i] = {row};
      }
    }
  };
  const int n_threads = std::min<int>(workers, static_cast<int>(std::max<std::size_t>(tasks.size(), 1)));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::size_t task = 0;
  for (const PointContext& ctx : contexts) {
    if (!ctx.error.empty()) {
      Row row = base_row("error", ctx.point, -1);
      row.values.assign(n_columns, kNaN);
      row.status = ctx.error;
      table.rows.push_back(row);
      continue;
    }
    std::vector<Row> samples;
    for (long r = 0; r < ctx.realizations; ++r, ++task) {
      for (Row& row : results[task]) samples.push_back(std::move(row));
    }
    table.rows.insert(table.rows.end(), samples.begin(), samples.end());
    aggregate(config, ctx.point, samples, n_columns, table.rows);
    try {
      theory_rows(config, ctx, table.rows);
    } catch (const std::exception& e) {
      Row row = base_row("theory", ctx.point, -1);
      row.values.assign(n_columns, kNaN);
      row.status = clean_status(e.what());
      table.rows.push_back(row);
    }
  }
  return table;
}

void write_csv(std::ostream& out, const ResultTable& table) {
  out << "# spinbath-csv v1 mode=" << to_string(table.mode) << '\n';
  out << "kind,point,realization,n,n_sys,n_env,lambda,beta,t";
  for (const auto& c : table.value_columns) out << ',' << c;
  out << ",status\n";
  for (const Row& r : table.rows) {
    out << r.kind << ',' << r.point << ',' << r.realization << ',' << r.n << ',' << r.n_sys
        << ',' << r.n_env << ',' << format_number(r.lambda) << ',' << format_number(r.beta)
        << ',' << format_number(r.t);
    for (double v : r.values) out << ',' << format_number(v);
    out << ',' << r.status << '\n';
  }
}

ResultTable read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# spinbath-csv v1 mode=", 0) != 0) {
    throw ConfigError("not a spinbath-csv v1 table");
  }
  ResultTable table;
  table.mode = parse_mode(line.substr(std::string("# spinbath-csv v1 mode=").size()));
  table.value_columns = value_columns(table.mode);
  if (!std::getline(in, line)) throw ConfigError("table has no column header");
  const std::size_t expected = 9 + table.value_columns.size() + 1;
  int number = 2;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != expected) {
      throw ConfigError("table line " + std::to_string(number) + ": expected " +
                        std::to_string(expected) + " fields");
    }
    Row r;
    r.kind = f[0];
    r.point = std::stoi(f[1]);
    r.realization = std::stol(f[2]);
    r.n = std::stol(f[3]);
    r.n_sys = std::stoi(f[4]);
    r.n_env = std::stoi(f[5]);
    r.lambda = std::strtod(f[6].c_str(), nullptr);
    r.beta = std::strtod(f[7].c_str(), nullptr);
    r.t = std::strtod(f[8].c_str(), nullptr);
    for (std::size_t c = 0; c < table.value_columns.size(); ++c) {
      r.values.push_back(std::strtod(f[9 + c].c_str(), nullptr));
    }
    r.status = f.back();
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace spinbath::bench
