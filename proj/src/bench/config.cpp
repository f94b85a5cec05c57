#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "spinbath/bench.hpp"

namespace spinbath::bench {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class LineError {
 public:
  LineError(std::string source, int line) : source_(std::move(source)), line_(line) {}
  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(source_ + ":" + std::to_string(line_) + ": " + message);
  }

 private:
  std::string source_;
  int line_;
};

double to_double(const std::string& text, const LineError& where) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    where.fail("'" + t + "' is not a number");
  }
  if (used != t.size() || !std::isfinite(v)) where.fail("'" + t + "' is not a finite number");
  return v;
}

long long to_integer(const std::string& text, const LineError& where) {
  const std::string t = trim(text);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used, 0);
  } catch (const std::exception&) {
    where.fail("'" + t + "' is not an integer");
  }
  if (used != t.size()) where.fail("'" + t + "' is not an integer");
  return v;
}

std::uint64_t to_seed(const std::string& text, const LineError& where) {
  const std::string t = trim(text);
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(t, &used, 0);
  } catch (const std::exception&) {
    where.fail("'" + t + "' is not an unsigned integer");
  }
  if (used != t.size() || t.front() == '-') where.fail("'" + t + "' is not an unsigned integer");
  return v;
}

std::vector<std::string> split_list(const std::string& text, const LineError& where) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) where.fail("empty list item");
    items.push_back(item);
  }
  return items;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::StaticMeasure: return "static_measure";
    case Mode::TimeTrace: return "time_trace";
    case Mode::TheoryOverlay: return "theory_overlay";
    case Mode::SymmetryCheck: return "symmetry_check";
    case Mode::NormalizationDiag: return "normalization_diag";
    case Mode::MomentCheck: return "moment_check";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  for (Mode m : {Mode::StaticMeasure, Mode::TimeTrace, Mode::TheoryOverlay, Mode::SymmetryCheck,
                 Mode::NormalizationDiag, Mode::MomentCheck}) {
    if (to_string(m) == text) return m;
  }
  throw ConfigError("unknown mode '" + text + "'");
}

int default_realizations(int n_spins) {
  if (n_spins <= 12) return 1000;
  if (n_spins <= 20) return 10;
  return 1;
}

void ExperimentConfig::validate() const {
  if (n_sys_list.empty()) throw ConfigError("n_sys list is empty");
  if (n_env_list.empty()) throw ConfigError("n_env list is empty");
  if (lambda_list.empty()) throw ConfigError("lambda list is empty");
  if (beta_list.empty()) throw ConfigError("beta list is empty");
  if (model != "chain" && model != "ring" && model != "custom") {
    throw ConfigError("unknown model '" + model + "' (chain, ring or custom)");
  }
  if (model == "custom" && (n_sys_list.size() != 1 || n_env_list.size() != 1)) {
    throw ConfigError("a custom model takes exactly one n_sys and one n_env");
  }
  if (model != "custom" &&
      (!system_bonds.empty() || !env_bonds.empty() || !coupling_bonds.empty())) {
    throw ConfigError("bond tables need model = custom");
  }
  for (double b : beta_list) {
    if (!(b >= 0.0)) throw ConfigError("beta values must be non-negative");
  }
  if (realizations < 0) throw ConfigError("realizations must be non-negative");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(t_max >= 0.0) || !(t_measure >= 0.0)) throw ConfigError("times must be non-negative");
  if (max_spins < 1 || max_spins > kDefaultMaxSpins) {
    throw ConfigError("max_spins must be in [1, " + std::to_string(kDefaultMaxSpins) + "]");
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::vector<Bond>* table = nullptr;
  bool have_beta = false, have_temperature = false;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const LineError where(source, number);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') where.fail("unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name == "system_bonds") {
        table = &c.system_bonds;
      } else if (name == "env_bonds") {
        table = &c.env_bonds;
      } else if (name == "coupling_bonds") {
        table = &c.coupling_bonds;
      } else {
        where.fail("unknown section [" + name + "]");
      }
      if (!seen.insert("[" + name + "]").second) where.fail("section [" + name + "] repeated");
      continue;
    }

    if (table != nullptr) {
      if (line.find('=') != std::string::npos) {
        where.fail("settings must come before the bond tables");
      }
      std::stringstream ss(line);
      std::vector<std::string> fields;
      std::string f;
      while (ss >> f) fields.push_back(f);
      if (fields.size() != 5) where.fail("bond rows need 5 fields: i j x y z");
      const long long i = to_integer(fields[0], where);
      const long long j = to_integer(fields[1], where);
      if (i < 1 || j < 1) where.fail("site indices are 1-based");
      table->push_back({static_cast<int>(i - 1), static_cast<int>(j - 1),
                        to_double(fields[2], where), to_double(fields[3], where),
                        to_double(fields[4], where)});
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) where.fail("expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) where.fail("missing value for '" + key + "'");
    if (!seen.insert(key).second) where.fail("'" + key + "' given twice");

    auto ints = [&](std::vector<int>& out) {
      for (const auto& item : split_list(value, where)) {
        const long long v = to_integer(item, where);
        if (v < 0 || v > 64) where.fail("spin count " + item + " out of range");
        out.push_back(static_cast<int>(v));
      }
    };
    auto doubles = [&](std::vector<double>& out) {
      for (const auto& item : split_list(value, where)) out.push_back(to_double(item, where));
    };

    if (key == "mode") {
      try {
        c.mode = parse_mode(lower(value));
      } catch (const ConfigError& e) {
        where.fail(e.what());
      }
    } else if (key == "model") {
      c.model = lower(value);
    } else if (key == "n_sys") {
      ints(c.n_sys_list);
    } else if (key == "n_env") {
      ints(c.n_env_list);
    } else if (key == "lambda") {
      doubles(c.lambda_list);
    } else if (key == "beta") {
      have_beta = true;
      doubles(c.beta_list);
    } else if (key == "temperature") {
      have_temperature = true;
      std::vector<double> ts;
      doubles(ts);
      for (double t : ts) {
        if (!(t > 0.0)) where.fail("temperatures must be positive");
        c.beta_list.push_back(1.0 / t);
      }
    } else if (key == "j") {
      c.j = to_double(value, where);
    } else if (key == "omega") {
      c.omega = to_double(value, where);
    } else if (key == "delta") {
      c.delta = to_double(value, where);
    } else if (key == "coupling_seed") {
      c.coupling_seed = to_seed(value, where);
    } else if (key == "env_seed") {
      c.env_seed = to_seed(value, where);
    } else if (key == "realizations") {
      c.realizations = static_cast<int>(to_integer(value, where));
    } else if (key == "seed") {
      c.seed = to_seed(value, where);
    } else if (key == "initial_state") {
      const std::string v = lower(value);
      if (v == "x") {
        c.initial_state = InitialState::X;
      } else if (v == "ududy") {
        c.initial_state = InitialState::UDUDY;
      } else {
        where.fail("initial_state must be X or UDUDY");
      }
    } else if (key == "method") {
      const std::string v = lower(value);
      if (v == "chebyshev") {
        c.method = PropagationMethod::Chebyshev;
      } else if (v == "exact") {
        c.method = PropagationMethod::Exact;
      } else {
        where.fail("method must be chebyshev or exact");
      }
    } else if (key == "t_max") {
      c.t_max = to_double(value, where);
    } else if (key == "dt") {
      c.dt = to_double(value, where);
    } else if (key == "t_burn") {
      c.t_burn = to_double(value, where);
    } else if (key == "t_measure") {
      c.t_measure = to_double(value, where);
    } else if (key == "max_spins") {
      c.max_spins = static_cast<int>(to_integer(value, where));
    } else if (key == "output") {
      c.output = value;
    } else {
      where.fail("unknown key '" + key + "'");
    }
    if (have_beta && have_temperature) where.fail("give either beta or temperature, not both");
  }
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in, path);
}

std::vector<SweepPoint> sweep_points(const ExperimentConfig& config) {
  std::vector<SweepPoint> points;
  for (int ns : config.n_sys_list) {
    for (int ne : config.n_env_list) {
      for (double lambda : config.lambda_list) {
        for (double beta : config.beta_list) {
          points.push_back({static_cast<int>(points.size()), ns, ne, lambda, beta});
        }
      }
    }
  }
  return points;
}

SpinModel make_model(const ExperimentConfig& config, const SweepPoint& point,
                     std::uint64_t seed_offset) {
  SpinModel m;
  if (config.model == "chain") {
    m = build_chain_model(point.n_sys, point.n_env, config.j, config.omega, config.delta,
                          point.lambda);
  } else if (config.model == "ring") {
    m = build_ring_model(point.n_sys, point.n_env, config.j, config.coupling_seed + seed_offset,
                         config.env_seed + seed_offset, point.lambda);
  } else {
    m.n_system = point.n_sys;
    m.n_env = point.n_env;
    m.system_bonds = config.system_bonds;
    m.env_bonds = config.env_bonds;
    m.coupling_bonds = config.coupling_bonds;
    m.lambda = point.lambda;
  }
  m.validate(config.max_spins);
  return m;
}

}  // namespace spinbath::bench
