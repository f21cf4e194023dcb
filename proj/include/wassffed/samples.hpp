#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wassffed {

// Row-major feature matrix with per-sample binary labels and sensitive-group
// ids. Group ids are contiguous from 0 across the whole experiment even when
// a subset (a client shard) lacks some groups.
struct Samples {
  std::vector<double> features;
  std::size_t dim = 0;
  std::vector<int> labels;
  std::vector<int> groups;

  std::size_t size() const { return labels.size(); }

  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dim, dim};
  }

  Samples subset(std::span<const std::size_t> indices) const {
    Samples out;
    out.dim = dim;
    out.features.reserve(indices.size() * dim);
    out.labels.reserve(indices.size());
    out.groups.reserve(indices.size());
    for (std::size_t idx : indices) {
      auto r = row(idx);
      out.features.insert(out.features.end(), r.begin(), r.end());
      out.labels.push_back(labels[idx]);
      out.groups.push_back(groups[idx]);
    }
    return out;
  }
};

}  // namespace wassffed
