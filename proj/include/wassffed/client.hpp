#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "wassffed/fairness.hpp"
#include "wassffed/histogram.hpp"
#include "wassffed/model.hpp"
#include "wassffed/rng.hpp"
#include "wassffed/samples.hpp"

namespace wassffed::fl {

struct TrainOptions {
  std::size_t epochs = 1;
  double lr = 0.005;
  std::size_t batch_size = 64;
  bool adam = false;
};

// Per-round mean training losses, averaged over all batches of all epochs.
struct TrainStats {
  double mean_utility_loss = 0.0;
  double mean_fairness_loss = 0.0;
};

struct ClientState {
  int client_id = 0;
  Samples data;
  ModelParams params;
  // Frozen fairness terms from the latest communication round; empty during
  // warm-up and in pure-FedAvg runs.
  std::vector<fair::FairnessLossTerm> terms;
};

// Minibatch gradient descent on the mean binary cross-entropy.
ModelParams local_train_utility(const ClientState& client,
                                const TrainOptions& opts, Rng& rng,
                                TrainStats* stats = nullptr);

// Minibatch descent on beta * L_utility + (1 - beta) * L_fairness with the
// client's frozen terms. beta == 1 skips the fairness machinery and matches
// local_train_utility bit for bit given the same rng stream.
ModelParams local_train_combined(const ClientState& client, double beta,
                                 const TrainOptions& opts, Rng& rng,
                                 TrainStats* stats = nullptr);

// Scores every local sample, bins the scores, applies randomized response to
// each bin index, and returns raw per-group counts. Groups absent from the
// client are omitted.
std::map<int, ot::CountHistogram> client_report(const ClientState& client,
                                                std::size_t bin_count,
                                                double xi, Rng& rng);

}  // namespace wassffed::fl
