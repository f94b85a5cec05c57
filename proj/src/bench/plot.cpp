#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "spinbath/bench.hpp"

namespace spinbath::bench {
namespace {

std::string num(double v) {
  if (std::isnan(v)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

PlotFiles plot_export(const ResultTable& table, const std::string& data_name) {
  const bool over_time = table.mode == Mode::TimeTrace;
  const std::vector<std::string> kinds = {"mean", "stderr", "median", "theory"};
  std::map<std::string, bool> present;
  for (const Row& r : table.rows) present[r.kind] = true;

  // Curve key: (n_sys, n_env, lambda), plus beta when the x axis is time.
  using Key = std::tuple<int, int, double, double>;
  std::map<Key, std::map<std::pair<double, int>, std::map<std::string, const Row*>>> curves;
  for (const Row& r : table.rows) {
    if (r.status != "ok") continue;
    bool wanted = false;
    for (const auto& k : kinds) wanted = wanted || r.kind == k;
    if (!wanted) continue;
    const Key key{r.n_sys, r.n_env, r.lambda, over_time ? r.beta : 0.0};
    const double x = over_time ? r.t : r.beta;
    curves[key][{x, r.point}][r.kind] = &r;
  }

  std::ostringstream data;
  data << "# spinbath plot data, mode=" << to_string(table.mode) << '\n';
  data << "# column 1: " << (over_time ? "t" : "beta") << '\n';
  std::map<std::string, int> first_column;
  int column = 2;
  for (const auto& kind : kinds) {
    if (!present[kind]) continue;
    first_column[kind] = column;
    for (const auto& name : table.value_columns) {
      data << "# column " << column++ << ": " << kind << ' ' << name << '\n';
    }
  }

  std::vector<std::string> titles;
  for (const auto& [key, points] : curves) {
    const auto& [ns, ne, lambda, beta] = key;
    std::string title = "n_sys=" + std::to_string(ns) + " n_env=" + std::to_string(ne) +
                        " lambda=" + num(lambda);
    if (over_time) title += " beta=" + num(beta);
    titles.push_back(title);
    if (titles.size() > 1) data << "\n\n";
    data << "# block " << titles.size() - 1 << ": " << title << '\n';
    for (const auto& [xp, by_kind] : points) {
      data << num(xp.first);
      for (const auto& kind : kinds) {
        if (!present[kind]) continue;
        const auto it = by_kind.find(kind);
        for (std::size_t c = 0; c < table.value_columns.size(); ++c) {
          data << ' ' << (it == by_kind.end() ? "NaN" : num(it->second->values[c]));
        }
      }
      data << '\n';
    }
  }

  std::ostringstream script;
  // The prediction is for E(sigma^2), so overlays compare that column.
  std::size_t y_index = 0;
  if (table.mode == Mode::TheoryOverlay) {
    for (std::size_t c = 0; c < table.value_columns.size(); ++c) {
      if (table.value_columns[c] == "sigma2") y_index = c;
    }
  }
  const std::string& y = table.value_columns[y_index];
  const int y_offset = static_cast<int>(y_index);
  script << "# gnuplot script for " << data_name << '\n';
  script << "set xlabel '" << (over_time ? "t" : "beta") << "'\n";
  script << "set ylabel '" << y << "'\n";
  if (!over_time) script << "set logscale x\n";
  script << "set key outside\n";
  script << "plot \\\n";
  const int mean_col = present["mean"] ? first_column["mean"] + y_offset : 0;
  const int err_col = present["stderr"] ? first_column["stderr"] + y_offset : 0;
  const int theory_col = present["theory"] ? first_column["theory"] + y_offset : 0;
  bool first = true;
  for (std::size_t i = 0; i < titles.size(); ++i) {
    if (mean_col > 0) {
      script << (first ? "  " : ", \\\n  ") << "'" << data_name << "' index " << i
             << " using 1:" << mean_col;
      if (err_col > 0) script << ':' << err_col << " with yerrorbars";
      else script << " with linespoints";
      script << " title '" << titles[i] << "'";
      first = false;
    }
    if (theory_col > 0) {
      script << (first ? "  " : ", \\\n  ") << "'" << data_name << "' index " << i
             << " using 1:" << theory_col << " with lines title 'theory " << titles[i] << "'";
      first = false;
    }
  }
  if (first) script << "  NaN notitle";
  script << '\n';
  return {data.str(), script.str()};
}

}  // namespace spinbath::bench
