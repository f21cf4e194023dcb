#include "wassffed/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wassffed/errors.hpp"

namespace wassffed::ot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& terms) {
  double hi = kNegInf;
  for (double t : terms) hi = std::max(hi, t);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) {
    if (t != kNegInf) acc += std::exp(t - hi);
  }
  return hi + std::log(acc);
}

}  // namespace

BarycenterResult barycenter(std::span<const Histogram> hists,
                            std::span<const double> weights, double epsilon,
                            std::size_t max_iters, double tol) {
  if (hists.empty()) {
    throw EmptyDistribution("barycenter needs at least one histogram");
  }
  if (weights.size() != hists.size()) {
    throw WeightError("got " + std::to_string(weights.size()) +
                      " weights for " + std::to_string(hists.size()) +
                      " histograms");
  }
  const std::size_t n = hists[0].bin_count();
  for (const Histogram& h : hists) {
    if (h.bin_count() != n) {
      throw ShapeError("barycenter inputs have mismatched bin counts");
    }
  }
  double weight_sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) {
      throw WeightError("barycenter weights must be nonnegative");
    }
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > 1e-6) {
    throw WeightError("barycenter weights sum to " +
                      std::to_string(weight_sum) + ", expected 1 within 1e-6");
  }
  if (!(epsilon > 0.0)) {
    throw DomainError("epsilon must be positive");
  }

  const std::size_t a_count = hists.size();

  // log K_ij = -|c_i - c_j| / epsilon; rows are input bins, columns are
  // barycenter bins (shared grid).
  std::vector<double> log_kernel(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      log_kernel[i * n + j] =
          -std::abs(bin_center(i, n) - bin_center(j, n)) / epsilon;
    }
  }

  std::vector<std::vector<double>> log_h(a_count);
  for (std::size_t a = 0; a < a_count; ++a) {
    log_h[a].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      log_h[a][i] = hists[a].mass(i) > 0.0 ? std::log(hists[a].mass(i))
                                           : kNegInf;
    }
  }

  // Scaling vectors in log domain: T_a = diag(u_a) K diag(v_a).
  std::vector<std::vector<double>> log_u(a_count, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> log_v(a_count, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> log_ktu(a_count, std::vector<double>(n));

  std::vector<double> bary(n, 1.0 / static_cast<double>(n));
  std::vector<double> log_bary(n, std::log(1.0 / static_cast<double>(n)));
  std::vector<double> terms(n);

  for (std::size_t it = 0; it < max_iters; ++it) {
    for (std::size_t a = 0; a < a_count; ++a) {
      // Row projection: u_a = h_a / (K v_a).
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          terms[j] = log_v[a][j] == kNegInf
                         ? kNegInf
                         : log_kernel[i * n + j] + log_v[a][j];
        }
        double lse = log_sum_exp(terms);
        log_u[a][i] = log_h[a][i] == kNegInf ? kNegInf : log_h[a][i] - lse;
      }
      // Column image: (K^T u_a)_j.
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
          terms[i] = log_u[a][i] == kNegInf
                         ? kNegInf
                         : log_kernel[i * n + j] + log_u[a][i];
        }
        log_ktu[a][j] = log_sum_exp(terms);
      }
    }

    // Geometric mean of the current column marginals v_a * (K^T u_a).
    std::vector<double> log_bary_next(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < a_count; ++a) {
        acc += weights[a] * (log_v[a][j] + log_ktu[a][j]);
      }
      log_bary_next[j] = acc;
    }
    // Column projection: v_a = b / (K^T u_a).
    for (std::size_t a = 0; a < a_count; ++a) {
      for (std::size_t j = 0; j < n; ++j) {
        log_v[a][j] = log_bary_next[j] - log_ktu[a][j];
      }
    }

    double shift = 0.0;
    double mass = 0.0;
    std::vector<double> bary_next(n);
    for (std::size_t j = 0; j < n; ++j) {
      bary_next[j] = std::exp(log_bary_next[j]);
      mass += bary_next[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      bary_next[j] /= mass;
      shift = std::max(shift, std::abs(bary_next[j] - bary[j]));
    }
    bary = std::move(bary_next);
    log_bary = std::move(log_bary_next);
    if (shift <= tol) break;
  }

  // Clean up float dust so the Histogram invariant holds exactly.
  double mass = 0.0;
  for (double b : bary) mass += b;
  for (double& b : bary) b /= mass;

  BarycenterResult result{Histogram(bary), 0.0,
                          std::vector<double>(weights.begin(), weights.end())};
  for (std::size_t a = 0; a < a_count; ++a) {
    result.objective += weights[a] * wasserstein_1d(result.barycenter, hists[a]);
  }
  return result;
}

}  // namespace wassffed::ot
