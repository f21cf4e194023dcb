#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wassffed/fairness.hpp"
#include "wassffed/samples.hpp"

namespace wassffed::fl {

// Logistic-regression parameters, the FedAvg payload.
struct ModelParams {
  std::vector<double> weights;
  double bias = 0.0;

  static ModelParams zeros(std::size_t dim) {
    return ModelParams{std::vector<double>(dim, 0.0), 0.0};
  }
};

// sigmoid(w . x + b), clamped away from {0, 1} so downstream logs and the
// histogram domain stay well defined.
double forward(const ModelParams& params, std::span<const double> features);

// Mean binary cross-entropy over the index subset.
double utility_loss(const ModelParams& params, const Samples& data,
                    std::span<const std::size_t> idx);

// beta * L_utility + (1 - beta) * L_fairness evaluated on the index subset;
// the fairness part averages per group over the subset's group counts.
double combined_loss(const ModelParams& params, const Samples& data,
                     std::span<const std::size_t> idx,
                     std::span<const fair::FairnessLossTerm> terms,
                     double beta);

// Gradient of combined_loss with respect to the parameters. With beta == 1
// the fairness machinery is skipped entirely, so the result is bit-identical
// to the pure utility gradient.
ModelParams combined_gradient(const ModelParams& params, const Samples& data,
                              std::span<const std::size_t> idx,
                              std::span<const fair::FairnessLossTerm> terms,
                              double beta);

}  // namespace wassffed::fl
