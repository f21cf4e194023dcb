#include <doctest.h>

#include <cmath>
#include <vector>

#include "wassffed/client.hpp"
#include "wassffed/dataset.hpp"
#include "wassffed/errors.hpp"
#include "wassffed/histogram.hpp"
#include "wassffed/transport.hpp"

using namespace wassffed;
using namespace wassffed::fl;

namespace {

ClientState separable_client() {
  // Two points on one feature, cleanly separable.
  ClientState client;
  client.client_id = 0;
  client.data.dim = 1;
  client.data.features = {-2.0, 2.0};
  client.data.labels = {0, 1};
  client.data.groups = {0, 0};
  client.params = ModelParams::zeros(1);
  return client;
}

ClientState random_client(Rng& rng, std::size_t n, int group_count) {
  ClientState client;
  client.client_id = 1;
  client.data.dim = 3;
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k < 3; ++k) client.data.features.push_back(rng.normal());
    client.data.labels.push_back(rng.uniform01() < 0.5 ? 1 : 0);
    client.data.groups.push_back(
        static_cast<int>(rng.uniform_index(group_count)));
  }
  client.params = ModelParams::zeros(3);
  return client;
}

}  // namespace

TEST_CASE("zero learning rate leaves parameters unchanged") {
  ClientState client = separable_client();
  client.params.weights[0] = 0.7;
  client.params.bias = -0.3;
  Rng rng(1);
  TrainOptions opts{5, 0.0, 2, false};
  ModelParams after = local_train_utility(client, opts, rng);
  CHECK(after.weights[0] == 0.7);
  CHECK(after.bias == -0.3);
}

TEST_CASE("separable two-point dataset reaches training accuracy 1.0") {
  ClientState client = separable_client();
  Rng rng(2);
  TrainOptions opts{200, 0.5, 2, false};
  ModelParams after = local_train_utility(client, opts, rng);
  CHECK(forward(after, client.data.row(0)) < 0.5);
  CHECK(forward(after, client.data.row(1)) > 0.5);
}

TEST_CASE("beta one follows the utility-only trajectory bit for bit") {
  Rng data_rng(3);
  ClientState client = random_client(data_rng, 40, 2);

  // Give the client frozen terms; they must be ignored at beta = 1.
  std::vector<double> lo(8, 0.0), hi(8, 0.0);
  lo[1] = 1.0;
  hi[6] = 1.0;
  client.terms.emplace_back(
      fair::GroupLabel{0, "g0"},
      ot::sinkhorn_plan(ot::Histogram{lo}, ot::Histogram{hi}, 0.5, 1000, 1e-9),
      ot::Histogram{hi});

  TrainOptions opts{3, 0.05, 8, false};
  Rng rng_a(77), rng_b(77);
  ModelParams utility = local_train_utility(client, opts, rng_a);
  ModelParams combined = local_train_combined(client, 1.0, opts, rng_b);
  for (std::size_t k = 0; k < utility.weights.size(); ++k) {
    CHECK(utility.weights[k] == combined.weights[k]);
  }
  CHECK(utility.bias == combined.bias);
}

TEST_CASE("beta zero pulls scores toward a point-mass barycenter") {
  const std::size_t n_bins = 10;
  Rng data_rng(4);
  ClientState client;
  client.client_id = 2;
  client.data.dim = 2;
  for (int i = 0; i < 60; ++i) {
    client.data.features.push_back(data_rng.normal() - 1.5);
    client.data.features.push_back(data_rng.normal() * 0.5);
    client.data.labels.push_back(i % 2);
    client.data.groups.push_back(0);
  }
  client.params = ModelParams::zeros(2);
  client.params.weights = {1.0, 0.2};
  client.params.bias = -1.0;  // initial scores sit well below the target

  // Freeze a plan from the current scores to a point mass at 0.75.
  std::vector<double> scores;
  for (std::size_t i = 0; i < client.data.size(); ++i) {
    scores.push_back(forward(client.params, client.data.row(i)));
  }
  ot::Histogram source = ot::make_histogram(scores, n_bins);
  std::vector<double> target_mass(n_bins, 0.0);
  target_mass[7] = 1.0;
  ot::Histogram target{target_mass};
  client.terms.emplace_back(
      fair::GroupLabel{0, "g0"},
      ot::sinkhorn_plan(source, target, 0.05, 200000, 1e-9), target);

  const double center = ot::bin_center(7, n_bins);
  auto mean_distance = [&](const ModelParams& params) {
    double acc = 0.0;
    for (std::size_t i = 0; i < client.data.size(); ++i) {
      acc += std::abs(forward(params, client.data.row(i)) - center);
    }
    return acc / static_cast<double>(client.data.size());
  };

  TrainOptions opts{1, 0.1, 16, false};
  std::vector<double> trajectory{mean_distance(client.params)};
  Rng rng(5);
  for (int epoch = 0; epoch < 12; ++epoch) {
    client.params = local_train_combined(client, 0.0, opts, rng);
    trajectory.push_back(mean_distance(client.params));
  }
  for (std::size_t e = 3; e + 1 < trajectory.size(); ++e) {
    CHECK(trajectory[e + 1] <= trajectory[e] + 1e-9);
  }
  CHECK(trajectory.back() < trajectory.front());
}

TEST_CASE("bad beta is rejected") {
  ClientState client = separable_client();
  Rng rng(6);
  TrainOptions opts{1, 0.1, 2, false};
  CHECK_THROWS_AS(local_train_combined(client, 1.5, opts, rng), ConfigError);
  CHECK_THROWS_AS(local_train_combined(client, -0.1, opts, rng), ConfigError);
}

TEST_CASE("client_report with xi zero equals plain binning") {
  Rng data_rng(7);
  ClientState client = random_client(data_rng, 50, 3);
  client.params.weights = {0.8, -0.5, 0.3};
  client.params.bias = 0.1;

  Rng rng(8);
  auto report = client_report(client, 10, 0.0, rng);

  std::map<int, std::vector<double>> scores_by_group;
  for (std::size_t i = 0; i < client.data.size(); ++i) {
    scores_by_group[client.data.groups[i]].push_back(
        forward(client.params, client.data.row(i)));
  }
  CHECK(report.size() == scores_by_group.size());
  for (const auto& [gid, scores] : scores_by_group) {
    ot::CountHistogram expected = ot::make_count_histogram(scores, 10);
    REQUIRE(report.count(gid) == 1);
    CHECK(report.at(gid).total() == expected.total());
    for (std::size_t b = 0; b < 10; ++b) {
      CHECK(report.at(gid).counts[b] == expected.counts[b]);
    }
  }
}

TEST_CASE("client_report single sample lands one count in its bin") {
  ClientState client;
  client.client_id = 3;
  client.data.dim = 1;
  client.data.features = {0.0};
  client.data.labels = {1};
  client.data.groups = {2};
  client.params = ModelParams::zeros(1);
  client.params.bias = 0.4;  // sigmoid(0.4) ~ 0.599 -> bin 5 of 10

  Rng rng(9);
  auto report = client_report(client, 10, 0.0, rng);
  REQUIRE(report.size() == 1);
  REQUIRE(report.count(2) == 1);
  CHECK(report.at(2).total() == 1.0);
  CHECK(report.at(2).counts[5] == 1.0);
}

TEST_CASE("client_report omits absent groups and preserves counts under xi") {
  Rng data_rng(10);
  ClientState client = random_client(data_rng, 200, 2);  // groups 0 and 1 only
  Rng rng(11);
  auto report = client_report(client, 10, 0.5, rng);
  CHECK(report.count(3) == 0);
  double total = 0.0;
  for (const auto& [gid, hist] : report) total += hist.total();
  CHECK(total == 200.0);  // randomized response remaps, never drops
}

TEST_CASE("full xi scatters counts roughly uniformly") {
  ClientState client;
  client.client_id = 4;
  client.data.dim = 1;
  const std::size_t n = 10000;
  for (std::size_t i = 0; i < n; ++i) {
    client.data.features.push_back(5.0);  // all scores identical
    client.data.labels.push_back(1);
    client.data.groups.push_back(0);
  }
  client.params = ModelParams::zeros(1);
  client.params.weights = {1.0};

  const std::size_t bins = 10;
  Rng rng(12);
  auto report = client_report(client, bins, 1.0, rng);
  // Binomial(n, 1/bins): mean 1000, sd ~ 30. Bound each bin by 5 sigma.
  double expected = static_cast<double>(n) / bins;
  double sigma = std::sqrt(static_cast<double>(n) * (1.0 / bins) *
                           (1.0 - 1.0 / bins));
  for (std::size_t b = 0; b < bins; ++b) {
    CHECK(std::abs(report.at(0).counts[b] - expected) <= 5.0 * sigma);
  }
}
