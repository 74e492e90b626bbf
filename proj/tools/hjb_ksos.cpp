// hjb-ksos: runs LP / guided / kernel sweeps from a TOML config.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "hjb/errors.hpp"
#include "hjb/experiment.hpp"

namespace {

std::vector<hjb::Method> split_methods(const std::string& list) {
  std::vector<hjb::Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(hjb::parse_method(item));
  return out;
}

void print_summary(const std::vector<hjb::ResultRow>& rows) {
  std::cout << "method      n_x      n  value_error  policy_cost  status\n";
  for (const auto& r : rows) {
    std::ostringstream line;
    line.setf(std::ios::left);
    line.width(10);
    line << r.method << "  ";
    line.setf(std::ios::right, std::ios::adjustfield);
    line.width(3);
    line << r.n_x << "  ";
    line.width(5);
    line << r.n << "  ";
    line.width(11);
    line << r.value_error << "  ";
    line.width(11);
    line << r.policy_cost << "  " << r.status;
    std::cout << line.str() << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Value-function approximation by HJB subsolutions (LP, "
               "guided SoS, kernel SoS)"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a hyperparameter sweep");
  std::string config_path, out_dir, methods;
  int workers = 0;
  bool no_timing = false;
  run->add_option("--config", config_path, "TOML experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "Directory for CSV outputs")
      ->required();
  run->add_option("--workers", workers,
                  "Concurrent solves (default: [output] workers)")
      ->check(CLI::PositiveNumber);
  run->add_option("--methods", methods,
                  "Comma-separated subset of lp,guided,kernel");
  run->add_flag("--no-timing", no_timing,
                "Write solve_seconds = 0 so reruns are byte-identical");

  CLI11_PARSE(app, argc, argv);

  try {
    hjb::ExperimentConfig cfg = hjb::ExperimentConfig::load(config_path);
    if (workers > 0) cfg.workers = workers;
    if (!methods.empty()) cfg.methods = split_methods(methods);
    if (no_timing) cfg.record_timing = false;
    cfg.validate();
    const hjb::ExperimentResult res = hjb::run_experiment(cfg, out_dir);
    print_summary(res.best);
    std::cout << "wrote " << out_dir << "/results.csv and results_raw.csv\n";
  } catch (const hjb::Error& e) {
    std::cerr << "hjb-ksos: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hjb-ksos: unexpected failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
