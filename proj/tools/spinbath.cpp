#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "spinbath/acceptance.hpp"
#include "spinbath/bench.hpp"

namespace {

namespace fs = std::filesystem;
using namespace spinbath;

int run_command(const std::string& config_path, std::string output, int workers) {
  const bench::ExperimentConfig config = bench::load_config(config_path);
  if (output.empty()) output = config.output;
  if (output.empty()) output = fs::path(config_path).replace_extension(".csv").string();
  const bench::ResultTable table = bench::run(config, workers);
  std::ofstream out(output);
  if (!out) throw std::runtime_error("cannot write '" + output + "'");
  bench::write_csv(out, table);
  std::size_t failed = 0;
  for (const auto& row : table.rows) failed += row.status != "ok";
  std::cerr << "wrote " << table.rows.size() << " rows to " << output;
  if (failed > 0) std::cerr << " (" << failed << " failed)";
  std::cerr << '\n';
  return table.all_ok() ? 0 : 1;
}

int plot_command(const std::string& table_path, std::string prefix) {
  std::ifstream in(table_path);
  if (!in) throw std::runtime_error("cannot open '" + table_path + "'");
  const bench::ResultTable table = bench::read_csv(in);
  if (prefix.empty()) prefix = fs::path(table_path).replace_extension().string();
  const std::string data_path = prefix + ".dat";
  const std::string script_path = prefix + ".gp";
  const bench::PlotFiles files =
      bench::plot_export(table, fs::path(data_path).filename().string());
  std::ofstream(data_path) << files.data;
  std::ofstream(script_path) << files.script;
  std::cerr << "wrote " << data_path << " and " << script_path << '\n';
  return 0;
}

int check_command(const std::vector<int>& only, int workers) {
  const auto results = run_acceptance(only, [](const CriterionResult& r) {
    std::cout << format_criterion(r) << std::endl;
  }, workers);
  int passed = 0;
  for (const auto& r : results) passed += r.passed;
  std::cout << passed << "/" << results.size() << " criteria passed\n";
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-bath ensemble simulator"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("-j,--workers", workers, "worker threads (0: SPINBATH_WORKERS or hardware)");

  std::string config_path, output;
  auto* run = app.add_subcommand("run", "run an experiment config and write a CSV table");
  run->add_option("config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "output CSV (default: config 'output' key)");

  std::string table_path, prefix;
  auto* plot = app.add_subcommand("plot", "export a result table as gnuplot data and script");
  plot->add_option("table", table_path, "CSV table from 'run'")->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--prefix", prefix, "output prefix for .dat and .gp");

  std::vector<int> only;
  auto* check = app.add_subcommand("check", "run the acceptance criteria");
  check->add_option("--only", only, "criterion ids to run")->check(CLI::Range(1, 9));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return run_command(config_path, output, workers);
    if (*plot) return plot_command(table_path, prefix);
    return check_command(only, workers);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
