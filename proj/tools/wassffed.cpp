#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wassffed/config.hpp"
#include "wassffed/runner.hpp"

namespace {

using wassffed::cli::ExperimentConfig;
using wassffed::cli::RunResult;

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

void apply_overrides(ExperimentConfig& config, const std::string& out_dir,
                     long long seed) {
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
}

void print_summary(const char* tag, const RunResult& result) {
  std::cout << tag << ": acc " << result.acc.mean << " +- " << result.acc.sd
            << ", m_dp " << result.m_dp.mean << " +- " << result.m_dp.sd
            << ", m_eop " << result.m_eop.mean << " +- " << result.m_eop.sd
            << " (" << result.repeats.size() << " repeats, "
            << result.wall_seconds << "s)\n";
}

int finish(const RunResult& result) {
  if (!result.monitor_violations.empty()) {
    for (const std::string& v : result.monitor_violations) {
      std::cerr << "monitor violation: " << v << "\n";
    }
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WassFFed federated fairness experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  std::string param;
  std::string values_csv;

  CLI::App* run_cmd = app.add_subcommand("run", "Run the configured experiment");
  run_cmd->add_option("config", config_path, "Config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory override");
  run_cmd->add_option("--seed", seed, "Master seed override");

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Run a grid over one hyperparameter");
  sweep_cmd->add_option("config", config_path, "Config file")->required();
  sweep_cmd->add_option("--param", param,
                        "One of beta, k, n_bins, xi, alpha, clients")
      ->required();
  sweep_cmd->add_option("--values", values_csv, "Comma-separated values")
      ->required();
  sweep_cmd->add_option("--out", out_dir, "Output directory override");
  sweep_cmd->add_option("--seed", seed, "Master seed override");

  CLI::App* baseline_cmd =
      app.add_subcommand("baseline", "FedAvg comparison run (beta = 1)");
  baseline_cmd->add_option("config", config_path, "Config file")->required();
  baseline_cmd->add_option("--out", out_dir, "Output directory override");
  baseline_cmd->add_option("--seed", seed, "Master seed override");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig config = wassffed::cli::parse_config(config_path);
    apply_overrides(config, out_dir, seed);

    if (run_cmd->parsed()) {
      RunResult result = wassffed::cli::run_experiment(config);
      wassffed::cli::write_run_result(result, config.out_dir);
      print_summary("run", result);
      return finish(result);
    }
    if (baseline_cmd->parsed()) {
      RunResult result = wassffed::cli::run_baseline(config);
      wassffed::cli::write_run_result(result, config.out_dir);
      print_summary("baseline", result);
      return finish(result);
    }

    std::vector<std::string> values = split_csv(values_csv);
    if (values.empty()) {
      std::cerr << "error: --values is empty\n";
      return 1;
    }
    std::vector<RunResult> results =
        wassffed::cli::run_sweep(config, param, values);
    for (std::size_t i = 0; i < results.size(); ++i) {
      wassffed::cli::write_run_result(results[i], results[i].config.out_dir);
      print_summary((param + "=" + values[i]).c_str(), results[i]);
    }
    wassffed::cli::write_sweep_table(results, param, values, config.out_dir);
    int code = 0;
    for (const RunResult& r : results) code |= finish(r);
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
