#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "wassffed/client.hpp"
#include "wassffed/server.hpp"

namespace wassffed::fl {

struct ProtocolOptions {
  std::size_t rounds = 50;        // communication rounds (tau)
  std::size_t local_epochs = 15;  // k, also the warm-up epoch count
  std::size_t bin_count = 100;    // N_B
  double beta = 0.4;
  double xi = 0.15;
  // Regularization strength stated against the discrete bin support, where
  // neighboring bins are unit distance apart. The OT layer measures cost on
  // [0, 1] bin centers, so the protocol passes epsilon / bin_count down;
  // the default pair (1, 100 bins) is an effective 0.01.
  double epsilon = 1.0;
  double lr = 0.005;
  std::size_t batch_size = 64;
  bool adam = false;
  std::size_t sinkhorn_max_iters = 200000;
  double marginal_tol = ot::kDefaultMarginalTol;
};

// Evaluation of the aggregated model after each server step. Record 0 is the
// warm-up evaluation; record t (t >= 1) follows communication round t. The
// loss fields average the local training that produced the records' reports;
// fairness fields are NaN and group_w1 empty on the pure-FedAvg path.
struct RoundRecord {
  int round = 0;
  double acc = 0.0;
  double m_dp = 0.0;
  double m_eop = 0.0;
  double mean_utility_loss = 0.0;
  double mean_fairness_loss = 0.0;
  // Per group: W1 between the reporting clients' histograms and the round's
  // barycenter, averaged over the clients holding the group.
  std::map<int, double> group_w1;
};

struct ProtocolResult {
  std::vector<RoundRecord> records;
  ModelParams final_params;
  // Aggregated parameters per record, same indexing as records.
  std::vector<ModelParams> round_params;
};

// Scores the evaluation set with the given parameters and computes accuracy
// at the 0.5 threshold plus both fairness metrics.
struct EvalMetrics {
  double acc = 0.0;
  double m_dp = 0.0;
  double m_eop = 0.0;
};
EvalMetrics evaluate_model(const ModelParams& params, const Samples& eval_set);

// The full federated protocol: zero-initialized global model, k utility-only
// warm-up epochs per client, then `rounds` communication rounds of
// report -> server OT + FedAvg -> broadcast -> k combined-loss epochs.
// With beta == 1 the OT pipeline is skipped entirely and the run reduces to
// plain FedAvg. Deterministic given the seed.
ProtocolResult run_wassffed(const ProtocolOptions& options,
                            std::span<const Samples> client_data,
                            const Samples& test_set,
                            std::span<const fair::GroupLabel> groups,
                            std::uint64_t seed);

}  // namespace wassffed::fl
