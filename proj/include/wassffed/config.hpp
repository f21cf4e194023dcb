#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace wassffed::cli {

// All protocol hyperparameters, parsed from a flat "key = value" text file.
// Defaults follow the reference hyperparameters for the tabular datasets.
struct ExperimentConfig {
  std::string dataset;            // "adult" | "compas" | "synthetic"
  std::string data_path;          // CSV path; resolved against
                                  // $WASSFFED_DATA_DIR when relative
  std::string mode = "multi-group";  // or "two-group"
  std::size_t clients = 4;        // P
  double alpha = 0.5;             // Dirichlet concentration
  std::size_t rounds = 50;        // tau
  std::size_t local_epochs = 15;  // k
  double beta = 0.4;
  std::size_t bins = 100;         // N_B
  double xi = 0.15;
  double epsilon = 1.0;
  double lr = 0.005;
  std::size_t batch_size = 64;
  std::string optimizer = "sgd";  // or "adam"
  std::uint64_t seed = 42;
  std::size_t repeats = 5;
  std::string out_dir = "results";
};

// Parses a config file. Unknown keys and malformed values raise ConfigError
// naming the key. Lines starting with '#' and blank lines are ignored.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& origin = "<string>");

// Serializes every key in a fixed order; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

// Range checks; throws ConfigError naming the field and its constraint.
void validate(const ExperimentConfig& config);

}  // namespace wassffed::cli
