#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "wassffed/barycenter.hpp"
#include "wassffed/fairness.hpp"
#include "wassffed/histogram.hpp"
#include "wassffed/model.hpp"
#include "wassffed/transport.hpp"

namespace wassffed::fl {

struct OtOptions {
  double epsilon = 1.0;
  std::size_t max_iters = ot::kDefaultSinkhornIters;
  double tol = ot::kDefaultMarginalTol;
};

// Sums raw counts per group across clients, then normalizes (the multiset
// union of client outputs). Throws MissingGroup when a group in
// expected_groups was reported by nobody.
std::map<int, ot::Histogram> server_aggregate_distributions(
    std::span<const std::map<int, ot::CountHistogram>> reports,
    std::span<const fair::GroupLabel> expected_groups);

// Sample-count-weighted parameter mean: lambda_p = N_p / sum_q N_q.
ModelParams fedavg_aggregate(std::span<const ModelParams> params_list,
                             std::span<const std::size_t> sample_counts);

struct ServerRoundOutput {
  std::map<int, ot::Histogram> global_hists;
  ot::BarycenterResult barycenter;
  // Per client, per group the client actually reported.
  std::vector<std::map<int, ot::TransportPlan>> client_plans;
  ModelParams aggregated;
  // Aggregation weights lambda_p; nonnegative, sum to 1.
  std::vector<double> lambdas;
};

// One full server step: aggregate group distributions, compute the
// barycenter with uniform group weights, couple every reported client-group
// histogram to it, and FedAvg the parameters.
ServerRoundOutput server_round(
    std::span<const std::map<int, ot::CountHistogram>> reports,
    std::span<const ModelParams> client_params,
    std::span<const std::size_t> sample_counts,
    std::span<const fair::GroupLabel> groups, const OtOptions& options);

}  // namespace wassffed::fl
