#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "wassffed/fairness.hpp"
#include "wassffed/rng.hpp"
#include "wassffed/samples.hpp"

namespace wassffed::data {

// Which sensitive grouping to build. Multi-group crosses race and gender
// into four groups; two-group keeps the single conventional attribute
// (gender on Adult, race on Compas).
enum class GroupMode { kMultiGroup, kTwoGroup };

struct TabularDataset {
  Samples samples;
  std::vector<std::string> feature_names;
  std::vector<fair::GroupLabel> group_labels;
  std::string provenance;
  std::size_t dropped_rows = 0;

  std::size_t size() const { return samples.size(); }
};

// Loaders for the two public CSV schemas (see README for the expected
// column names). Numeric columns are standardized to mean 0, sd 1
// (population sd); categorical columns are one-hot encoded with categories
// in sorted order; rows with missing values in any used column are dropped
// and counted. Sensitive attributes define the groups and are excluded from
// the feature matrix.
TabularDataset load_adult(const std::filesystem::path& csv_path,
                          GroupMode mode);
TabularDataset load_compas(const std::filesystem::path& csv_path,
                           GroupMode mode);

// Cached columnar text format: '#' metadata lines, a header line, then one
// row per sample of features..., label, group id.
void save_cached(const TabularDataset& dataset,
                 const std::filesystem::path& path);
TabularDataset load_cached(const std::filesystem::path& path);

// Deterministic synthetic binary-classification dataset with group-dependent
// score shifts, used by tests and the "synthetic" CLI dataset. When
// separable is true labels are noiseless threshold decisions with a margin.
struct SyntheticSpec {
  std::size_t sample_count = 2000;
  std::size_t dim = 5;
  int group_count = 4;
  std::uint64_t seed = 7;
  bool separable = false;
};
TabularDataset make_synthetic(const SyntheticSpec& spec);

struct PartitionSpec {
  std::size_t client_count = 4;
  double alpha = 0.5;
  std::uint64_t seed = 0;
};

// Group-wise Dirichlet partition: for each sensitive group draws client
// proportions from Dir(alpha) and assigns that group's samples
// multinomially. Redraws (up to 100 times) whenever some client ends up
// with no samples at all.
std::vector<std::vector<std::size_t>> dirichlet_partition(
    const TabularDataset& dataset, const PartitionSpec& spec);

// Stratified 70/30-style split by (label, group) cell; falls back to a
// global shuffle with a warning when some cell is too small to stratify.
std::pair<TabularDataset, TabularDataset> train_test_split(
    const TabularDataset& dataset, double test_fraction, std::uint64_t seed);

// Keeps the input bin with probability 1 - xi; otherwise remaps to a
// uniformly random bin (possibly the same one).
std::size_t randomized_response(std::size_t bin_index, std::size_t bin_count,
                                double xi, Rng& rng);

}  // namespace wassffed::data
