#include "wassffed/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wassffed/errors.hpp"

namespace wassffed::fair {

namespace {

double positive_rate(const std::vector<int>& labels) {
  double acc = 0.0;
  for (int v : labels) acc += v;
  return acc / static_cast<double>(labels.size());
}

double max_pairwise_gap(const std::vector<double>& rates) {
  auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
  return *hi - *lo;
}

}  // namespace

double metric_dp(const GroupedPredictions& preds) {
  if (preds.size() < 2) {
    throw UndefinedMetric("demographic parity needs at least two groups, got " +
                          std::to_string(preds.size()));
  }
  std::vector<double> rates;
  rates.reserve(preds.size());
  for (const auto& [id, group] : preds) {
    if (group.predicted.empty()) {
      throw UndefinedMetric("group " + std::to_string(id) +
                            " has no samples; positive rate undefined");
    }
    rates.push_back(positive_rate(group.predicted));
  }
  return max_pairwise_gap(rates);
}

double metric_eop(const GroupedPredictions& preds) {
  if (preds.size() < 2) {
    throw UndefinedMetric("equal opportunity needs at least two groups, got " +
                          std::to_string(preds.size()));
  }
  std::vector<double> tprs;
  tprs.reserve(preds.size());
  for (const auto& [id, group] : preds) {
    double hits = 0.0;
    double positives = 0.0;
    for (std::size_t i = 0; i < group.actual.size(); ++i) {
      if (group.actual[i] == 1) {
        positives += 1.0;
        hits += group.predicted[i];
      }
    }
    if (positives == 0.0) {
      throw UndefinedMetric("group " + std::to_string(id) +
                            " has no positive ground-truth samples; "
                            "true-positive rate undefined");
    }
    tprs.push_back(hits / positives);
  }
  return max_pairwise_gap(tprs);
}

FairnessLossTerm::FairnessLossTerm(GroupLabel group,
                                   const ot::TransportPlan& plan,
                                   const ot::Histogram& barycenter)
    : group_(std::move(group)), bin_count_(plan.bin_count()) {
  if (barycenter.bin_count() != bin_count_) {
    throw ShapeError("plan and barycenter have different bin counts: " +
                     std::to_string(bin_count_) + " vs " +
                     std::to_string(barycenter.bin_count()));
  }
  const std::size_t n = bin_count_;

  std::vector<double> row_sums(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_sums[i] += plan(i, j);
  }

  // Nearest row with mass for every bin; ties prefer the lower index.
  row_for_bin_.assign(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (row_sums[i] > 0.0) {
      row_for_bin_[i] = i;
      continue;
    }
    std::size_t best = n;
    std::size_t best_dist = n + 1;
    for (std::size_t k = 0; k < n; ++k) {
      if (row_sums[k] <= 0.0) continue;
      std::size_t dist = k > i ? k - i : i - k;
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    row_for_bin_[i] = best;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_for_bin_[i] == n) {
      throw EmptyDistribution("transport plan carries no mass in any row");
    }
  }

  mass_prefix_.assign(n * n, 0.0);
  cmass_prefix_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (row_sums[i] <= 0.0) continue;
    double m_acc = 0.0;
    double c_acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double norm = plan(i, j) / row_sums[i];
      m_acc += norm;
      c_acc += ot::bin_center(j, n) * norm;
      mass_prefix_[i * n + j] = m_acc;
      cmass_prefix_[i * n + j] = c_acc;
    }
  }
}

std::size_t FairnessLossTerm::row_offset(double score) const {
  return row_for_bin_[ot::bin_index(score, bin_count_)] * bin_count_;
}

double FairnessLossTerm::sample_loss(double score) const {
  const std::size_t n = bin_count_;
  const std::size_t off = row_offset(score);

  // Number of centers strictly below the score; centers form the uniform
  // grid (j + 0.5)/n, so the cut index is arithmetic.
  double pos = score * static_cast<double>(n) - 0.5;
  auto below = static_cast<std::ptrdiff_t>(std::ceil(pos));
  if (below > 0 &&
      ot::bin_center(static_cast<std::size_t>(below - 1), n) >= score) {
    --below;  // fp guard when score sits exactly on a center
  }
  std::size_t k = below <= 0 ? 0 : std::min<std::size_t>(below, n);

  double mass_below = k == 0 ? 0.0 : mass_prefix_[off + k - 1];
  double cmass_below = k == 0 ? 0.0 : cmass_prefix_[off + k - 1];
  double mass_total = mass_prefix_[off + n - 1];
  double cmass_total = cmass_prefix_[off + n - 1];
  double mass_above = mass_total - mass_below;
  double cmass_above = cmass_total - cmass_below;
  // Centers equal to the score contribute |s - c| = 0 either way.
  return score * mass_below - cmass_below + (cmass_above - score * mass_above);
}

double FairnessLossTerm::sample_gradient(double score) const {
  const std::size_t n = bin_count_;
  const std::size_t off = row_offset(score);

  double pos = score * static_cast<double>(n) - 0.5;
  auto below = static_cast<std::ptrdiff_t>(std::ceil(pos));
  if (below > 0 &&
      ot::bin_center(static_cast<std::size_t>(below - 1), n) >= score) {
    --below;
  }
  std::size_t k = below <= 0 ? 0 : std::min<std::size_t>(below, n);

  double mass_below = k == 0 ? 0.0 : mass_prefix_[off + k - 1];
  double mass_total = mass_prefix_[off + n - 1];
  // sign(0) = 0: a center exactly at the score joins neither side.
  double mass_eq = 0.0;
  if (k < n && ot::bin_center(k, n) == score) {
    mass_eq = mass_prefix_[off + k] - mass_below;
  }
  double mass_above = mass_total - mass_below - mass_eq;
  return mass_below - mass_above;
}

double fairness_loss(const std::map<int, std::vector<double>>& scores_by_group,
                     std::span<const FairnessLossTerm> terms) {
  double total = 0.0;
  for (const FairnessLossTerm& term : terms) {
    auto it = scores_by_group.find(term.group().id);
    if (it == scores_by_group.end() || it->second.empty()) continue;
    double acc = 0.0;
    for (double s : it->second) acc += term.sample_loss(s);
    total += acc / static_cast<double>(it->second.size());
  }
  return total;
}

double fairness_loss_gradient(double score, const FairnessLossTerm& term,
                              std::size_t group_count) {
  return term.sample_gradient(score) / static_cast<double>(group_count);
}

}  // namespace wassffed::fair
