#include "wassffed/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "wassffed/errors.hpp"

#ifndef WASSFFED_VERSION
#define WASSFFED_VERSION "unknown"
#endif

namespace wassffed::cli {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  out.sd = std::sqrt(var / static_cast<double>(values.size()));
  return out;
}

fl::ProtocolOptions protocol_options(const ExperimentConfig& config) {
  fl::ProtocolOptions opts;
  opts.rounds = config.rounds;
  opts.local_epochs = config.local_epochs;
  opts.bin_count = config.bins;
  opts.beta = config.beta;
  opts.xi = config.xi;
  opts.epsilon = config.epsilon;
  opts.lr = config.lr;
  opts.batch_size = config.batch_size;
  opts.adam = config.optimizer == "adam";
  return opts;
}

void check_record_ranges(const fl::RoundRecord& record, std::size_t repeat,
                         std::vector<std::string>* violations) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(record.acc) || !in_unit(record.m_dp) || !in_unit(record.m_eop)) {
    violations->push_back("repeat " + std::to_string(repeat) + " round " +
                          std::to_string(record.round) +
                          ": metric outside [0, 1]");
  }
  for (const auto& [group_id, w1] : record.group_w1) {
    if (!(w1 >= 0.0) || w1 > 1.0) {
      violations->push_back("repeat " + std::to_string(repeat) + " round " +
                            std::to_string(record.round) + ": group " +
                            std::to_string(group_id) +
                            " W1 outside [0, 1]");
    }
  }
}

// Atomic-ish write: temp file in the same directory, then rename.
void write_file(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) {
      throw ConfigError("cannot write " + tmp.string());
    }
    out << body;
  }
  std::filesystem::rename(tmp, path);
}

std::string comment_block(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "# version = " << version_string() << "\n";
  std::istringstream cfg(serialize_config(config));
  std::string line;
  while (std::getline(cfg, line)) out << "# " << line << "\n";
  return out.str();
}

}  // namespace

std::string version_string() { return WASSFFED_VERSION; }

data::TabularDataset load_configured_dataset(const ExperimentConfig& config) {
  data::GroupMode mode = config.mode == "two-group"
                             ? data::GroupMode::kTwoGroup
                             : data::GroupMode::kMultiGroup;
  if (config.dataset == "synthetic") {
    data::SyntheticSpec spec;
    spec.group_count = mode == data::GroupMode::kTwoGroup ? 2 : 4;
    spec.seed = config.seed;
    return data::make_synthetic(spec);
  }
  std::filesystem::path path = config.data_path;
  if (path.is_relative()) {
    if (const char* root = std::getenv(kDataDirEnv)) {
      path = std::filesystem::path(root) / path;
    }
  }
  if (config.dataset == "adult") return data::load_adult(path, mode);
  return data::load_compas(path, mode);
}

RunResult run_experiment(const ExperimentConfig& config,
                         const data::TabularDataset* preloaded) {
  validate(config);
  data::TabularDataset loaded;
  const data::TabularDataset* dataset = preloaded;
  if (dataset == nullptr) {
    loaded = load_configured_dataset(config);
    dataset = &loaded;
  }

  RunResult result;
  result.config = config;
  auto t_start = std::chrono::steady_clock::now();

  std::vector<double> accs, dps, eops;
  for (std::size_t i = 0; i < config.repeats; ++i) {
    std::uint64_t repeat_seed = config.seed + i;
    auto r_start = std::chrono::steady_clock::now();

    auto [train, test] = data::train_test_split(
        *dataset, 0.3, derive_seed(repeat_seed, {kSeedSplit}));
    data::PartitionSpec part_spec{config.clients, config.alpha,
                                  derive_seed(repeat_seed, {kSeedPartition})};
    auto partition = data::dirichlet_partition(train, part_spec);

    std::vector<Samples> shards;
    shards.reserve(partition.size());
    for (const auto& idx : partition) {
      shards.push_back(train.samples.subset(idx));
    }

    fl::ProtocolResult proto =
        fl::run_wassffed(protocol_options(config), shards, test.samples,
                         dataset->group_labels, repeat_seed);

    RepeatOutcome outcome;
    outcome.seed = repeat_seed;
    outcome.records = std::move(proto.records);
    const fl::RoundRecord& last = outcome.records.back();
    outcome.final_acc = last.acc;
    outcome.final_m_dp = last.m_dp;
    outcome.final_m_eop = last.m_eop;
    outcome.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      r_start)
            .count();

    if (outcome.records.size() != config.rounds + 1) {
      result.monitor_violations.push_back(
          "repeat " + std::to_string(i) + ": expected " +
          std::to_string(config.rounds + 1) + " records, got " +
          std::to_string(outcome.records.size()));
    }
    for (const fl::RoundRecord& record : outcome.records) {
      check_record_ranges(record, i, &result.monitor_violations);
    }

    accs.push_back(outcome.final_acc);
    dps.push_back(outcome.final_m_dp);
    eops.push_back(outcome.final_m_eop);
    result.repeats.push_back(std::move(outcome));
  }

  result.acc = aggregate(accs);
  result.m_dp = aggregate(dps);
  result.m_eop = aggregate(eops);
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

RunResult run_baseline(ExperimentConfig config,
                       const data::TabularDataset* preloaded) {
  config.beta = 1.0;
  return run_experiment(config, preloaded);
}

std::vector<RunResult> run_sweep(const ExperimentConfig& base,
                                 const std::string& parameter,
                                 const std::vector<std::string>& values,
                                 const data::TabularDataset* preloaded) {
  std::vector<RunResult> results;
  for (const std::string& value : values) {
    ExperimentConfig config = base;
    try {
      if (parameter == "beta") {
        config.beta = std::stod(value);
      } else if (parameter == "k") {
        config.local_epochs = std::stoul(value);
      } else if (parameter == "n_bins") {
        config.bins = std::stoul(value);
      } else if (parameter == "xi") {
        config.xi = std::stod(value);
      } else if (parameter == "alpha") {
        config.alpha = std::stod(value);
      } else if (parameter == "clients") {
        config.clients = std::stoul(value);
      } else {
        throw ConfigError(
            "unknown sweep parameter '" + parameter +
            "'; expected one of beta, k, n_bins, xi, alpha, clients");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      throw ConfigError("cannot parse sweep value '" + value +
                        "' for parameter '" + parameter + "'");
    }
    config.out_dir = (std::filesystem::path(base.out_dir) /
                      (parameter + "_" + value))
                         .string();
    results.push_back(run_experiment(config, preloaded));
  }
  return results;
}

void write_run_result(const RunResult& result,
                      const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string header = comment_block(result.config);

  {
    std::ostringstream out;
    out << header;
    out << "repeat,seed,acc,m_dp,m_eop\n";
    for (std::size_t i = 0; i < result.repeats.size(); ++i) {
      const RepeatOutcome& r = result.repeats[i];
      out << i << "," << r.seed << "," << format_double(r.final_acc) << ","
          << format_double(r.final_m_dp) << ","
          << format_double(r.final_m_eop) << "\n";
    }
    out << "mean,," << format_double(result.acc.mean) << ","
        << format_double(result.m_dp.mean) << ","
        << format_double(result.m_eop.mean) << "\n";
    out << "sd,," << format_double(result.acc.sd) << ","
        << format_double(result.m_dp.sd) << ","
        << format_double(result.m_eop.sd) << "\n";
    write_file(out_dir / "summary.csv", out.str());
  }

  {
    std::ostringstream out;
    out << header;
    out << "repeat,seed,round,acc,m_dp,m_eop,mean_utility_loss,"
           "mean_fairness_loss,mean_w1_to_barycenter\n";
    for (std::size_t i = 0; i < result.repeats.size(); ++i) {
      const RepeatOutcome& r = result.repeats[i];
      for (const fl::RoundRecord& record : r.records) {
        double w1_mean = std::numeric_limits<double>::quiet_NaN();
        if (!record.group_w1.empty()) {
          w1_mean = 0.0;
          for (const auto& [gid, v] : record.group_w1) w1_mean += v;
          w1_mean /= static_cast<double>(record.group_w1.size());
        }
        out << i << "," << r.seed << "," << record.round << ","
            << format_double(record.acc) << "," << format_double(record.m_dp)
            << "," << format_double(record.m_eop) << ","
            << format_double(record.mean_utility_loss) << ","
            << format_double(record.mean_fairness_loss) << ","
            << format_double(w1_mean) << "\n";
      }
    }
    write_file(out_dir / "rounds.csv", out.str());
  }

  write_file(out_dir / "config.snapshot",
             "# version = " + version_string() + "\n" +
                 serialize_config(result.config));
}

void write_sweep_table(const std::vector<RunResult>& results,
                       const std::string& parameter,
                       const std::vector<std::string>& values,
                       const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ostringstream out;
  out << "# version = " << version_string() << "\n";
  out << "parameter,value,repeat,seed,acc,m_dp,m_eop\n";
  for (std::size_t v = 0; v < results.size(); ++v) {
    const RunResult& result = results[v];
    for (std::size_t i = 0; i < result.repeats.size(); ++i) {
      const RepeatOutcome& r = result.repeats[i];
      out << parameter << "," << values[v] << "," << i << "," << r.seed << ","
          << format_double(r.final_acc) << "," << format_double(r.final_m_dp)
          << "," << format_double(r.final_m_eop) << "\n";
    }
    out << parameter << "," << values[v] << ",mean,,"
        << format_double(result.acc.mean) << ","
        << format_double(result.m_dp.mean) << ","
        << format_double(result.m_eop.mean) << "\n";
  }
  write_file(out_dir / "sweep.csv", out.str());
}

}  // namespace wassffed::cli
