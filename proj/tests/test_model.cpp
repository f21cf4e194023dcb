#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "wassffed/errors.hpp"
#include "wassffed/model.hpp"
#include "wassffed/rng.hpp"
#include "wassffed/transport.hpp"

using namespace wassffed;
using namespace wassffed::fl;

namespace {

Samples tiny_dataset(Rng& rng, std::size_t n, std::size_t d,
                     int group_count = 2) {
  Samples s;
  s.dim = d;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) s.features.push_back(rng.normal());
    s.labels.push_back(rng.uniform01() < 0.5 ? 1 : 0);
    s.groups.push_back(static_cast<int>(rng.uniform_index(group_count)));
  }
  return s;
}

ModelParams random_params(Rng& rng, std::size_t d) {
  ModelParams p = ModelParams::zeros(d);
  for (double& w : p.weights) w = rng.normal() * 0.5;
  p.bias = rng.normal() * 0.5;
  return p;
}

ot::Histogram random_hist(Rng& rng, std::size_t n) {
  std::vector<double> m(n);
  double sum = 0.0;
  for (double& v : m) {
    v = rng.uniform01();
    sum += v;
  }
  for (double& v : m) v /= sum;
  double fix = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) fix += m[i];
  m[n - 1] = 1.0 - fix;
  return ot::Histogram{m};
}

}  // namespace

TEST_CASE("forward computes a clamped sigmoid of the dot product") {
  ModelParams zero = ModelParams::zeros(3);
  std::vector<double> x{1.0, -2.0, 0.5};
  CHECK(forward(zero, x) == 0.5);

  // Score grows monotonically in the bias and stays inside (0, 1).
  ModelParams p = zero;
  double prev = 0.0;
  for (double b : {-30.0, -5.0, 0.0, 5.0, 30.0, 400.0}) {
    p.bias = b;
    double s = forward(p, x);
    CHECK(s > prev);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    prev = s;
  }

  // Independent recomputation on random inputs.
  Rng rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    ModelParams rp = random_params(rng, 6);
    std::vector<double> rx(6);
    for (double& v : rx) v = rng.normal();
    double z = rp.bias;
    for (std::size_t k = 0; k < 6; ++k) z += rp.weights[k] * rx[k];
    double expected = 1.0 / (1.0 + std::exp(-z));
    CHECK(forward(rp, rx) == doctest::Approx(expected).epsilon(1e-12));
  }

  std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(forward(zero, wrong), ShapeError);
}

TEST_CASE("utility gradient matches finite differences of the BCE") {
  Rng rng(8675309);
  Samples data = tiny_dataset(rng, 12, 4);
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);

  for (int trial = 0; trial < 20; ++trial) {
    ModelParams p = random_params(rng, 4);
    ModelParams grad = combined_gradient(p, data, idx, {}, 1.0);

    const double h = 1e-6;
    for (std::size_t k = 0; k < 4; ++k) {
      ModelParams hi = p, lo = p;
      hi.weights[k] += h;
      lo.weights[k] -= h;
      double fd = (utility_loss(hi, data, idx) - utility_loss(lo, data, idx)) /
                  (2.0 * h);
      CHECK(grad.weights[k] == doctest::Approx(fd).epsilon(1e-5));
    }
    ModelParams hi = p, lo = p;
    hi.bias += h;
    lo.bias -= h;
    double fd =
        (utility_loss(hi, data, idx) - utility_loss(lo, data, idx)) / (2.0 * h);
    CHECK(grad.bias == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("combined gradient matches finite differences of the combined loss") {
  Rng rng(1122334455);
  const std::size_t n_bins = 10;
  Samples data = tiny_dataset(rng, 16, 3);
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);

  int checked = 0;
  while (checked < 100) {
    ModelParams p = random_params(rng, 3);

    // Fresh frozen terms per draw.
    std::vector<fair::FairnessLossTerm> terms;
    ot::Histogram bary = random_hist(rng, n_bins);
    for (int g = 0; g < 2; ++g) {
      ot::Histogram source = random_hist(rng, n_bins);
      terms.emplace_back(fair::GroupLabel{g, "g" + std::to_string(g)},
                         ot::sinkhorn_plan(source, bary, 0.3, 100000, 1e-9),
                         bary);
    }

    // Differentiability guard: every sample's score must sit away from bin
    // boundaries and centers so the finite difference straddles no kink.
    bool differentiable = true;
    for (std::size_t i = 0; i < data.size(); ++i) {
      double scaled = forward(p, data.row(i)) * n_bins;
      if (std::abs(scaled - std::round(scaled)) < 1e-3 ||
          std::abs(scaled - 0.5 - std::floor(scaled)) < 1e-3) {
        differentiable = false;
        break;
      }
    }
    if (!differentiable) continue;
    ++checked;

    const double beta = 0.4;
    ModelParams grad = combined_gradient(p, data, idx, terms, beta);
    const double h = 1e-5;
    auto loss_at = [&](const ModelParams& q) {
      return combined_loss(q, data, idx, terms, beta);
    };
    for (std::size_t k = 0; k < 3; ++k) {
      ModelParams hi = p, lo = p;
      hi.weights[k] += h;
      lo.weights[k] -= h;
      double fd = (loss_at(hi) - loss_at(lo)) / (2.0 * h);
      CHECK(grad.weights[k] ==
            doctest::Approx(fd).epsilon(1e-4).scale(std::abs(fd) + 1.0));
    }
    ModelParams hi = p, lo = p;
    hi.bias += h;
    lo.bias -= h;
    double fd = (loss_at(hi) - loss_at(lo)) / (2.0 * h);
    CHECK(grad.bias ==
          doctest::Approx(fd).epsilon(1e-4).scale(std::abs(fd) + 1.0));
  }
}

TEST_CASE("beta one makes combined loss equal the pure utility loss") {
  Rng rng(99);
  Samples data = tiny_dataset(rng, 10, 3);
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  ModelParams p = random_params(rng, 3);

  ot::Histogram bary = random_hist(rng, 8);
  std::vector<fair::FairnessLossTerm> terms;
  terms.emplace_back(fair::GroupLabel{0, "g0"},
                     ot::sinkhorn_plan(random_hist(rng, 8), bary, 0.3,
                                       100000, 1e-9),
                     bary);

  CHECK(combined_loss(p, data, idx, terms, 1.0) ==
        utility_loss(p, data, idx));
  ModelParams g1 = combined_gradient(p, data, idx, terms, 1.0);
  ModelParams g2 = combined_gradient(p, data, idx, {}, 1.0);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(g1.weights[k] == g2.weights[k]);
  }
  CHECK(g1.bias == g2.bias);
}
