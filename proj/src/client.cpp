#include "wassffed/client.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "wassffed/dataset.hpp"
#include "wassffed/errors.hpp"

namespace wassffed::fl {

namespace {

// Adam moment buffers; reset at the start of every local-training call so a
// round's descent depends only on the broadcast parameters and the rng.
struct AdamState {
  std::vector<double> m_w, v_w;
  double m_b = 0.0, v_b = 0.0;
  std::size_t step = 0;

  explicit AdamState(std::size_t dim) : m_w(dim, 0.0), v_w(dim, 0.0) {}

  void apply(ModelParams& params, const ModelParams& grad, double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    ++step;
    double corr1 = 1.0 - std::pow(b1, static_cast<double>(step));
    double corr2 = 1.0 - std::pow(b2, static_cast<double>(step));
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
      m_w[k] = b1 * m_w[k] + (1.0 - b1) * grad.weights[k];
      v_w[k] = b2 * v_w[k] + (1.0 - b2) * grad.weights[k] * grad.weights[k];
      params.weights[k] -=
          lr * (m_w[k] / corr1) / (std::sqrt(v_w[k] / corr2) + eps);
    }
    m_b = b1 * m_b + (1.0 - b1) * grad.bias;
    v_b = b2 * v_b + (1.0 - b2) * grad.bias * grad.bias;
    params.bias -= lr * (m_b / corr1) / (std::sqrt(v_b / corr2) + eps);
  }
};

ModelParams train_impl(const ClientState& client, double beta,
                       const TrainOptions& opts, Rng& rng, TrainStats* stats) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw ConfigError("beta must be in [0, 1], got " + std::to_string(beta));
  }
  if (client.data.size() == 0) {
    throw EmptyDistribution("client " + std::to_string(client.client_id) +
                            " has no training samples");
  }
  const std::size_t n = client.data.size();
  const std::size_t batch =
      opts.batch_size == 0 ? n : std::min(opts.batch_size, n);

  ModelParams params = client.params;
  AdamState adam(params.weights.size());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  double util_acc = 0.0;
  double fair_acc = 0.0;
  std::size_t batches = 0;
  const bool fairness_active = beta != 1.0 && !client.terms.empty();

  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      std::span<const std::size_t> idx(order.data() + start,
                                       std::min(batch, n - start));
      if (stats != nullptr) {
        util_acc += utility_loss(params, client.data, idx);
        if (fairness_active) {
          std::map<int, std::vector<double>> scores;
          for (std::size_t i : idx) {
            scores[client.data.groups[i]].push_back(
                forward(params, client.data.row(i)));
          }
          fair_acc += fair::fairness_loss(scores, client.terms);
        }
        ++batches;
      }
      ModelParams grad =
          combined_gradient(params, client.data, idx, client.terms, beta);
      if (opts.adam) {
        adam.apply(params, grad, opts.lr);
      } else {
        for (std::size_t k = 0; k < params.weights.size(); ++k) {
          params.weights[k] -= opts.lr * grad.weights[k];
        }
        params.bias -= opts.lr * grad.bias;
      }
    }
  }

  if (stats != nullptr && batches > 0) {
    stats->mean_utility_loss = util_acc / static_cast<double>(batches);
    stats->mean_fairness_loss =
        fairness_active ? fair_acc / static_cast<double>(batches) : 0.0;
  }
  return params;
}

}  // namespace

ModelParams local_train_utility(const ClientState& client,
                                const TrainOptions& opts, Rng& rng,
                                TrainStats* stats) {
  return train_impl(client, 1.0, opts, rng, stats);
}

ModelParams local_train_combined(const ClientState& client, double beta,
                                 const TrainOptions& opts, Rng& rng,
                                 TrainStats* stats) {
  return train_impl(client, beta, opts, rng, stats);
}

std::map<int, ot::CountHistogram> client_report(const ClientState& client,
                                                std::size_t bin_count,
                                                double xi, Rng& rng) {
  std::map<int, ot::CountHistogram> report;
  for (std::size_t i = 0; i < client.data.size(); ++i) {
    double s = forward(client.params, client.data.row(i));
    std::size_t bin = ot::bin_index(s, bin_count);
    bin = data::randomized_response(bin, bin_count, xi, rng);
    auto& hist = report[client.data.groups[i]];
    if (hist.counts.empty()) hist.counts.assign(bin_count, 0.0);
    hist.counts[bin] += 1.0;
  }
  return report;
}

}  // namespace wassffed::fl
