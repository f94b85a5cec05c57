#pragma once

// Declarative sweeps over (n_sys, n_env, lambda, beta) with seeded ensembles,
// a versioned CSV result table and gnuplot export.
//
// Config files are "key = value" lines, lists comma separated, '#' starts a
// comment. Bond tables follow a [system_bonds], [env_bonds] or
// [coupling_bonds] header, one "i j x y z" row per line with 1-based sites:
//
//   mode = theory_overlay
//   model = chain
//   n_sys = 4
//   n_env = 8
//   j = 1
//   omega = 1
//   delta = 1
//   lambda = 0, 0.1
//   temperature = 0.02, 0.1, 1, 10
//   realizations = 1000
//   seed = 2024
//   output = fig8.csv

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spinbath/hamiltonian.hpp"
#include "spinbath/observe.hpp"
#include "spinbath/propagate.hpp"

namespace spinbath::bench {

enum class Mode {
  StaticMeasure,
  TimeTrace,
  TheoryOverlay,
  SymmetryCheck,
  NormalizationDiag,
  MomentCheck,
};

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct ExperimentConfig {
  Mode mode = Mode::StaticMeasure;
  std::string model = "chain";  // chain | ring | custom
  std::vector<int> n_sys_list;
  std::vector<int> n_env_list;
  std::vector<double> lambda_list;
  std::vector<double> beta_list;
  // chain: j, omega, delta; ring: j plus the two coupling seeds
  double j = 1.0;
  double omega = 1.0;
  double delta = 1.0;
  std::uint64_t coupling_seed = 1;
  std::uint64_t env_seed = 2;
  std::vector<Bond> system_bonds;  // custom model, 0-based after parsing
  std::vector<Bond> env_bonds;
  std::vector<Bond> coupling_bonds;

  int realizations = 0;  // 0: size-dependent default
  std::uint64_t seed = 1;
  InitialState initial_state = InitialState::X;
  PropagationMethod method = PropagationMethod::Chebyshev;
  double t_max = 300.0;
  double dt = 0.5;
  double t_burn = 300.0;
  double t_measure = 0.0;  // static modes evolve to this time before measuring
  int max_spins = kDefaultMaxSpins;
  std::string output;

  /// Throws ConfigError on empty sweep axes or inconsistent settings.
  void validate() const;
};

/// 1000 realizations up to 12 spins, 10 up to 20, 1 above.
int default_realizations(int n_spins);

/// Throws ConfigError with "<source>:<line>: message" diagnostics.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

struct SweepPoint {
  int index = 0;
  int n_sys = 0;
  int n_env = 0;
  double lambda = 0.0;
  double beta = 0.0;
};

/// Cartesian product, n_sys outermost and beta innermost.
std::vector<SweepPoint> sweep_points(const ExperimentConfig& config);

/// Model for one point (ring seeds may be offset per realization).
SpinModel make_model(const ExperimentConfig& config, const SweepPoint& point,
                     std::uint64_t seed_offset = 0);

struct Row {
  std::string kind;  // sample | mean | stderr | median | theory
  int point = 0;
  long realization = -1;
  long n = 0;
  int n_sys = 0;
  int n_env = 0;
  double lambda = 0.0;
  double beta = 0.0;
  double t = 0.0;
  std::vector<double> values;
  std::string status = "ok";
};

struct ResultTable {
  Mode mode = Mode::StaticMeasure;
  std::vector<std::string> value_columns;
  std::vector<Row> rows;

  bool all_ok() const;
};

/// Value columns written for each mode.
std::vector<std::string> value_columns(Mode mode);

/// Worker count from SPINBATH_WORKERS, else the hardware concurrency.
int worker_count_from_env();

/// Runs the sweep on `workers` threads. Row order and values do not depend
/// on the worker count. Per-point failures become rows with a non-"ok"
/// status; they never abort the sweep.
ResultTable run(const ExperimentConfig& config, int workers = 0);

void write_csv(std::ostream& out, const ResultTable& table);
ResultTable read_csv(std::istream& in);

struct PlotFiles {
  std::string data;    // gnuplot data, one index block per curve
  std::string script;  // gnuplot script reading `data_name`
};

PlotFiles plot_export(const ResultTable& table, const std::string& data_name);

}  // namespace spinbath::bench
