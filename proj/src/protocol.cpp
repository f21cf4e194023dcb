#include "wassffed/protocol.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wassffed/errors.hpp"

namespace wassffed::fl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

TrainOptions train_options(const ProtocolOptions& options) {
  return TrainOptions{options.local_epochs, options.lr, options.batch_size,
                      options.adam};
}

double mean(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

}  // namespace

EvalMetrics evaluate_model(const ModelParams& params,
                           const Samples& eval_set) {
  fair::GroupedPredictions preds;
  double correct = 0.0;
  for (std::size_t i = 0; i < eval_set.size(); ++i) {
    double s = forward(params, eval_set.row(i));
    int hard = s >= fair::kDecisionThreshold ? 1 : 0;
    if (hard == eval_set.labels[i]) correct += 1.0;
    auto& group = preds[eval_set.groups[i]];
    group.scores.push_back(s);
    group.predicted.push_back(hard);
    group.actual.push_back(eval_set.labels[i]);
  }
  EvalMetrics metrics;
  metrics.acc = correct / static_cast<double>(eval_set.size());
  metrics.m_dp = fair::metric_dp(preds);
  metrics.m_eop = fair::metric_eop(preds);
  return metrics;
}

ProtocolResult run_wassffed(const ProtocolOptions& options,
                            std::span<const Samples> client_data,
                            const Samples& test_set,
                            std::span<const fair::GroupLabel> groups,
                            std::uint64_t seed) {
  if (client_data.empty()) {
    throw ConfigError("run_wassffed needs at least one client");
  }
  if (!(options.beta >= 0.0 && options.beta <= 1.0)) {
    throw ConfigError("beta must be in [0, 1], got " +
                      std::to_string(options.beta));
  }
  const std::size_t dim = client_data[0].dim;
  for (const Samples& shard : client_data) {
    if (shard.dim != dim) {
      throw ShapeError("client feature dimensions differ");
    }
    if (shard.size() == 0) {
      throw ConfigError("every client needs at least one sample");
    }
  }
  if (test_set.dim != dim) {
    throw ShapeError("test set feature dimension differs from clients");
  }

  const std::size_t client_count = client_data.size();
  const bool fedavg_only = options.beta == 1.0;
  const TrainOptions train_opts = train_options(options);

  std::vector<ClientState> clients(client_count);
  std::vector<std::size_t> sample_counts(client_count);
  for (std::size_t p = 0; p < client_count; ++p) {
    clients[p].client_id = static_cast<int>(p);
    clients[p].data = client_data[p];
    clients[p].params = ModelParams::zeros(dim);
    sample_counts[p] = client_data[p].size();
  }

  ProtocolResult result;

  // Warm-up: k utility-only epochs per client from the shared zero init.
  {
    std::vector<double> utils(client_count);
    for (std::size_t p = 0; p < client_count; ++p) {
      Rng rng(derive_seed(seed, {kSeedTrain, p, 0}));
      TrainStats stats;
      clients[p].params =
          local_train_utility(clients[p], train_opts, rng, &stats);
      utils[p] = stats.mean_utility_loss;
    }
    std::vector<ModelParams> params_list;
    params_list.reserve(client_count);
    for (const ClientState& c : clients) params_list.push_back(c.params);
    ModelParams warm = fedavg_aggregate(params_list, sample_counts);

    EvalMetrics metrics = evaluate_model(warm, test_set);
    RoundRecord record;
    record.round = 0;
    record.acc = metrics.acc;
    record.m_dp = metrics.m_dp;
    record.m_eop = metrics.m_eop;
    record.mean_utility_loss = mean(utils);
    record.mean_fairness_loss = kNaN;
    result.records.push_back(std::move(record));
    result.round_params.push_back(std::move(warm));
  }

  for (std::size_t t = 0; t < options.rounds; ++t) {
    try {
      std::vector<std::map<int, ot::CountHistogram>> reports;
      std::vector<ModelParams> params_list;
      params_list.reserve(client_count);
      for (const ClientState& c : clients) params_list.push_back(c.params);

      ModelParams next_params;
      RoundRecord record;
      record.round = static_cast<int>(t) + 1;

      if (fedavg_only) {
        next_params = fedavg_aggregate(params_list, sample_counts);
      } else {
        reports.reserve(client_count);
        for (std::size_t p = 0; p < client_count; ++p) {
          Rng rng(derive_seed(seed, {kSeedReport, p, t}));
          reports.push_back(
              client_report(clients[p], options.bin_count, options.xi, rng));
        }
        OtOptions ot_opts{
            options.epsilon / static_cast<double>(options.bin_count),
            options.sinkhorn_max_iters, options.marginal_tol};
        ServerRoundOutput server = server_round(
            reports, params_list, sample_counts, groups, ot_opts);
        next_params = std::move(server.aggregated);

        // Diagnostics: mean over reporting clients of W1 to the barycenter.
        std::map<int, double> w1_sum;
        std::map<int, std::size_t> w1_cnt;
        for (const auto& report : reports) {
          for (const auto& [group_id, counts] : report) {
            w1_sum[group_id] += ot::wasserstein_1d(
                counts.normalized(), server.barycenter.barycenter);
            w1_cnt[group_id] += 1;
          }
        }
        for (const auto& [group_id, sum] : w1_sum) {
          record.group_w1[group_id] =
              sum / static_cast<double>(w1_cnt[group_id]);
        }

        // Broadcast: frozen plans and barycenter for the local epochs.
        for (std::size_t p = 0; p < client_count; ++p) {
          clients[p].terms.clear();
          for (const auto& [group_id, plan] : server.client_plans[p]) {
            clients[p].terms.emplace_back(groups[group_id], plan,
                                          server.barycenter.barycenter);
          }
        }
      }

      EvalMetrics metrics = evaluate_model(next_params, test_set);
      record.acc = metrics.acc;
      record.m_dp = metrics.m_dp;
      record.m_eop = metrics.m_eop;

      std::vector<double> utils(client_count);
      std::vector<double> fairs(client_count);
      for (std::size_t p = 0; p < client_count; ++p) {
        clients[p].params = next_params;
        Rng rng(derive_seed(seed, {kSeedTrain, p, t + 1}));
        TrainStats stats;
        clients[p].params = local_train_combined(clients[p], options.beta,
                                                 train_opts, rng, &stats);
        utils[p] = stats.mean_utility_loss;
        fairs[p] = stats.mean_fairness_loss;
      }
      record.mean_utility_loss = mean(utils);
      record.mean_fairness_loss = fedavg_only ? kNaN : mean(fairs);

      result.records.push_back(std::move(record));
      result.round_params.push_back(std::move(next_params));
    } catch (const std::exception& e) {
      throw std::runtime_error("round " + std::to_string(t + 1) +
                               " failed: " + e.what());
    }
  }

  result.final_params = result.round_params.back();
  return result;
}

}  // namespace wassffed::fl
