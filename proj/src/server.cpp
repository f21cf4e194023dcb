#include "wassffed/server.hpp"

#include <string>

#include "wassffed/errors.hpp"

namespace wassffed::fl {

std::map<int, ot::Histogram> server_aggregate_distributions(
    std::span<const std::map<int, ot::CountHistogram>> reports,
    std::span<const fair::GroupLabel> expected_groups) {
  std::map<int, ot::CountHistogram> totals;
  for (const auto& report : reports) {
    for (const auto& [group_id, hist] : report) {
      totals[group_id] += hist;
    }
  }
  std::map<int, ot::Histogram> global;
  for (const fair::GroupLabel& group : expected_groups) {
    auto it = totals.find(group.id);
    if (it == totals.end() || it->second.total() <= 0.0) {
      throw MissingGroup("group " + group.name + " (id " +
                         std::to_string(group.id) +
                         ") was reported by no client");
    }
    global.emplace(group.id, it->second.normalized());
  }
  return global;
}

ModelParams fedavg_aggregate(std::span<const ModelParams> params_list,
                             std::span<const std::size_t> sample_counts) {
  if (params_list.empty()) {
    throw ConfigError("fedavg_aggregate needs at least one client");
  }
  if (params_list.size() != sample_counts.size()) {
    throw ShapeError("got " + std::to_string(params_list.size()) +
                     " parameter sets for " +
                     std::to_string(sample_counts.size()) + " sample counts");
  }
  double total = 0.0;
  for (std::size_t c : sample_counts) {
    if (c == 0) throw ConfigError("client sample counts must be positive");
    total += static_cast<double>(c);
  }
  const std::size_t dim = params_list[0].weights.size();
  ModelParams out = ModelParams::zeros(dim);
  for (std::size_t p = 0; p < params_list.size(); ++p) {
    if (params_list[p].weights.size() != dim) {
      throw ShapeError("client parameter dimensions differ");
    }
    double lambda = static_cast<double>(sample_counts[p]) / total;
    for (std::size_t k = 0; k < dim; ++k) {
      out.weights[k] += lambda * params_list[p].weights[k];
    }
    out.bias += lambda * params_list[p].bias;
  }
  return out;
}

ServerRoundOutput server_round(
    std::span<const std::map<int, ot::CountHistogram>> reports,
    std::span<const ModelParams> client_params,
    std::span<const std::size_t> sample_counts,
    std::span<const fair::GroupLabel> groups, const OtOptions& options) {
  ServerRoundOutput out{
      server_aggregate_distributions(reports, groups),
      ot::BarycenterResult{ot::Histogram({0.5, 0.5}), 0.0, {}},
      {},
      ModelParams{},
      {}};

  std::vector<ot::Histogram> hists;
  hists.reserve(out.global_hists.size());
  for (const auto& [id, hist] : out.global_hists) hists.push_back(hist);
  std::vector<double> weights(hists.size(),
                              1.0 / static_cast<double>(hists.size()));
  out.barycenter = ot::barycenter(hists, weights, options.epsilon,
                                  options.max_iters, options.tol);

  out.client_plans.resize(reports.size());
  for (std::size_t p = 0; p < reports.size(); ++p) {
    for (const auto& [group_id, counts] : reports[p]) {
      out.client_plans[p].emplace(
          group_id,
          ot::sinkhorn_plan(counts.normalized(), out.barycenter.barycenter,
                            options.epsilon, options.max_iters, options.tol));
    }
  }

  out.aggregated = fedavg_aggregate(client_params, sample_counts);
  double total = 0.0;
  for (std::size_t c : sample_counts) total += static_cast<double>(c);
  for (std::size_t c : sample_counts) {
    out.lambdas.push_back(static_cast<double>(c) / total);
  }
  return out;
}

}  // namespace wassffed::fl
