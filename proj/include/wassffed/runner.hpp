#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wassffed/config.hpp"
#include "wassffed/dataset.hpp"
#include "wassffed/protocol.hpp"

namespace wassffed::cli {

inline constexpr const char* kDataDirEnv = "WASSFFED_DATA_DIR";

struct RepeatOutcome {
  std::uint64_t seed = 0;
  std::vector<fl::RoundRecord> records;
  double final_acc = 0.0;
  double final_m_dp = 0.0;
  double final_m_eop = 0.0;
  double wall_seconds = 0.0;
};

struct Aggregate {
  double mean = 0.0;
  double sd = 0.0;  // population sd; 0 when repeats == 1
};

struct RunResult {
  ExperimentConfig config;
  std::vector<RepeatOutcome> repeats;
  Aggregate acc;
  Aggregate m_dp;
  Aggregate m_eop;
  double wall_seconds = 0.0;
  // Post-run invariant monitor findings; empty on a clean run.
  std::vector<std::string> monitor_violations;
};

// Loads the configured dataset (or uses `preloaded` when given, e.g. to run
// against an in-memory synthetic set), then executes `repeats` seeded runs
// with seeds master_seed + i.
RunResult run_experiment(const ExperimentConfig& config,
                         const data::TabularDataset* preloaded = nullptr);

// FedAvg comparison row: forces beta = 1, which skips the OT pipeline.
RunResult run_baseline(ExperimentConfig config,
                       const data::TabularDataset* preloaded = nullptr);

// Runs the grid over one parameter; values are parsed per parameter type.
// Supported parameters: beta, k, n_bins, xi, alpha, clients.
std::vector<RunResult> run_sweep(const ExperimentConfig& base,
                                 const std::string& parameter,
                                 const std::vector<std::string>& values,
                                 const data::TabularDataset* preloaded =
                                     nullptr);

// Writes summary.csv, rounds.csv and config.snapshot into out_dir
// (atomically: temp file + rename). Every file embeds the config snapshot
// and the build's version string as '#' comments.
void write_run_result(const RunResult& result,
                      const std::filesystem::path& out_dir);

// Long-format table across a sweep, one block per parameter value.
void write_sweep_table(const std::vector<RunResult>& results,
                       const std::string& parameter,
                       const std::vector<std::string>& values,
                       const std::filesystem::path& out_dir);

std::string version_string();

// Loads the dataset a config points at, honoring $WASSFFED_DATA_DIR for
// relative paths; "synthetic" builds the deterministic in-memory set.
data::TabularDataset load_configured_dataset(const ExperimentConfig& config);

}  // namespace wassffed::cli
