#include "wassffed/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wassffed/errors.hpp"

namespace wassffed::fl {

namespace {

// Keep scores strictly inside (0, 1) so logs and the bin domain stay finite;
// the bounds sit at the representable edges so clamping never reorders
// non-saturated scores.
constexpr double kScoreFloor = 1e-300;
const double kScoreCeil = 1.0 - std::numeric_limits<double>::epsilon() / 2;

double sigmoid(double z) {
  if (z >= 0.0) {
    double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

double clamp_score(double s) {
  if (s < kScoreFloor) return kScoreFloor;
  if (s > kScoreCeil) return kScoreCeil;
  return s;
}

double raw_score(const ModelParams& params, std::span<const double> x) {
  double z = params.bias;
  for (std::size_t k = 0; k < x.size(); ++k) z += params.weights[k] * x[k];
  return sigmoid(z);
}

// Maps group id -> index into terms, or -1 when the group has no term.
std::vector<int> term_lookup(std::span<const fair::FairnessLossTerm> terms) {
  int max_id = -1;
  for (const auto& t : terms) max_id = std::max(max_id, t.group().id);
  std::vector<int> lookup(static_cast<std::size_t>(max_id + 1), -1);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    lookup[static_cast<std::size_t>(terms[k].group().id)] = static_cast<int>(k);
  }
  return lookup;
}

}  // namespace

double forward(const ModelParams& params, std::span<const double> features) {
  if (features.size() != params.weights.size()) {
    throw ShapeError("feature dimension " + std::to_string(features.size()) +
                     " does not match weight dimension " +
                     std::to_string(params.weights.size()));
  }
  return clamp_score(raw_score(params, features));
}

double utility_loss(const ModelParams& params, const Samples& data,
                    std::span<const std::size_t> idx) {
  double acc = 0.0;
  for (std::size_t i : idx) {
    double s = forward(params, data.row(i));
    acc -= data.labels[i] == 1 ? std::log(s) : std::log(1.0 - s);
  }
  return acc / static_cast<double>(idx.size());
}

double combined_loss(const ModelParams& params, const Samples& data,
                     std::span<const std::size_t> idx,
                     std::span<const fair::FairnessLossTerm> terms,
                     double beta) {
  if (beta == 1.0 || terms.empty()) {
    return beta * utility_loss(params, data, idx);
  }
  std::map<int, std::vector<double>> scores_by_group;
  double bce = 0.0;
  for (std::size_t i : idx) {
    double s = forward(params, data.row(i));
    bce -= data.labels[i] == 1 ? std::log(s) : std::log(1.0 - s);
    scores_by_group[data.groups[i]].push_back(s);
  }
  bce /= static_cast<double>(idx.size());
  return beta * bce + (1.0 - beta) * fairness_loss(scores_by_group, terms);
}

ModelParams combined_gradient(const ModelParams& params, const Samples& data,
                              std::span<const std::size_t> idx,
                              std::span<const fair::FairnessLossTerm> terms,
                              double beta) {
  const std::size_t d = params.weights.size();
  ModelParams grad = ModelParams::zeros(d);
  const double inv_batch = 1.0 / static_cast<double>(idx.size());

  const bool fairness_active = beta != 1.0 && !terms.empty();
  std::vector<int> lookup;
  std::vector<std::size_t> group_counts;
  if (fairness_active) {
    lookup = term_lookup(terms);
    group_counts.assign(lookup.size(), 0);
    for (std::size_t i : idx) {
      auto g = static_cast<std::size_t>(data.groups[i]);
      if (g < lookup.size() && lookup[g] >= 0) ++group_counts[g];
    }
  }

  for (std::size_t i : idx) {
    auto x = data.row(i);
    double s = raw_score(params, x);
    double coef = beta * (s - data.labels[i]) * inv_batch;
    if (fairness_active) {
      auto g = static_cast<std::size_t>(data.groups[i]);
      if (g < lookup.size() && lookup[g] >= 0) {
        double dloss_dscore = fair::fairness_loss_gradient(
            clamp_score(s), terms[static_cast<std::size_t>(lookup[g])],
            group_counts[g]);
        coef += (1.0 - beta) * dloss_dscore * s * (1.0 - s);
      }
    }
    for (std::size_t k = 0; k < d; ++k) grad.weights[k] += coef * x[k];
    grad.bias += coef;
  }
  return grad;
}

}  // namespace wassffed::fl
