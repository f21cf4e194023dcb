#include "wassffed/transport.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wassffed/errors.hpp"

namespace wassffed::ot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> log_masses(const Histogram& h) {
  std::vector<double> out(h.bin_count());
  for (std::size_t i = 0; i < h.bin_count(); ++i) {
    out[i] = h.mass(i) > 0.0 ? std::log(h.mass(i)) : kNegInf;
  }
  return out;
}

// log sum_k exp(terms[k]) with the usual max shift; -inf entries drop out.
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

TransportPlan::TransportPlan(std::vector<double> cells, Histogram source,
                             Histogram target, double epsilon)
    : n_(source.bin_count()),
      cells_(std::move(cells)),
      source_(std::move(source)),
      target_(std::move(target)),
      epsilon_(epsilon) {
  if (target_.bin_count() != n_) {
    throw ShapeError("transport plan marginals have different bin counts");
  }
  if (cells_.size() != n_ * n_) {
    throw ShapeError("transport plan cell count does not match bin count");
  }
  for (double v : cells_) {
    if (!(v >= 0.0)) {
      throw DomainError("transport plan entries must be nonnegative");
    }
  }
}

double TransportPlan::row_sum(std::size_t src) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < n_; ++j) acc += cells_[src * n_ + j];
  return acc;
}

double TransportPlan::col_sum(std::size_t dst) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) acc += cells_[i * n_ + dst];
  return acc;
}

double TransportPlan::max_marginal_violation() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    worst = std::max(worst, std::abs(row_sum(i) - source_.mass(i)));
  }
  for (std::size_t j = 0; j < n_; ++j) {
    worst = std::max(worst, std::abs(col_sum(j) - target_.mass(j)));
  }
  return worst;
}

TransportPlan sinkhorn_plan(const Histogram& source, const Histogram& target,
                            double epsilon, std::size_t max_iters, double tol,
                            SinkhornState* state_out) {
  if (source.bin_count() != target.bin_count()) {
    throw ShapeError("sinkhorn marginals have different bin counts: " +
                     std::to_string(source.bin_count()) + " vs " +
                     std::to_string(target.bin_count()));
  }
  if (!(epsilon > 0.0)) {
    throw DomainError("epsilon must be positive");
  }
  const std::size_t n = source.bin_count();

  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost[i * n + j] = std::abs(bin_center(i, n) - bin_center(j, n));
    }
  }

  const std::vector<double> log_mu = log_masses(source);  // rows
  const std::vector<double> log_nu = log_masses(target);  // columns

  SinkhornState state;
  state.f.assign(n, 0.0);
  state.g.assign(n, 0.0);

  std::vector<double> terms(n);
  std::vector<double> plan(n * n);

  auto materialize = [&]() {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double e = (state.f[j] + state.g[i] - cost[i * n + j]) / epsilon;
        plan[i * n + j] = e == kNegInf ? 0.0 : std::exp(e);
      }
    }
  };

  auto violation = [&]() {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += plan[i * n + j];
      worst = std::max(worst, std::abs(row - source.mass(i)));
    }
    for (std::size_t j = 0; j < n; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < n; ++i) col += plan[i * n + j];
      worst = std::max(worst, std::abs(col - target.mass(j)));
    }
    return worst;
  };

  for (std::size_t it = 1; it <= max_iters; ++it) {
    // Target-side update: f_j = eps * (log nu_j - LSE_i((g_i - C_ij)/eps)).
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        terms[i] = state.g[i] == kNegInf
                       ? kNegInf
                       : (state.g[i] - cost[i * n + j]) / epsilon;
      }
      state.f[j] = log_nu[j] == kNegInf
                       ? kNegInf
                       : epsilon * (log_nu[j] - log_sum_exp(terms));
    }
    // Source-side update: g_i = eps * (log mu_i - LSE_j((f_j - C_ij)/eps)).
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        terms[j] = state.f[j] == kNegInf
                       ? kNegInf
                       : (state.f[j] - cost[i * n + j]) / epsilon;
      }
      state.g[i] = log_mu[i] == kNegInf
                       ? kNegInf
                       : epsilon * (log_mu[i] - log_sum_exp(terms));
    }

    state.iteration = it;
    materialize();
    state.marginal_violation = violation();
    if (state.marginal_violation <= tol) {
      if (state_out != nullptr) *state_out = state;
      return TransportPlan(std::move(plan), source, target, epsilon);
    }
  }

  if (state_out != nullptr) *state_out = state;
  throw ConvergenceError(
      "sinkhorn did not reach marginal tolerance " + std::to_string(tol) +
          " after " + std::to_string(max_iters) +
          " iterations (violation " +
          std::to_string(state.marginal_violation) + ")",
      state.marginal_violation);
}

double transport_cost(const TransportPlan& plan) {
  const std::size_t n = plan.bin_count();
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      acc += std::abs(bin_center(i, n) - bin_center(j, n)) * plan(i, j);
    }
  }
  return acc;
}

}  // namespace wassffed::ot
