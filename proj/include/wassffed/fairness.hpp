#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wassffed/histogram.hpp"
#include "wassffed/transport.hpp"

namespace wassffed::fair {

// Hard-label threshold used for accuracy and both fairness metrics.
inline constexpr double kDecisionThreshold = 0.5;

struct GroupLabel {
  int id = 0;
  std::string name;
};

// One sensitive group's predictions on some evaluation set.
struct GroupPredictions {
  std::vector<double> scores;
  std::vector<int> predicted;  // hard labels at the 0.5 threshold
  std::vector<int> actual;     // ground-truth labels
};

// Keyed by group id.
using GroupedPredictions = std::map<int, GroupPredictions>;

// Max pairwise gap in positive-prediction rate across groups.
double metric_dp(const GroupedPredictions& preds);

// Max pairwise gap in true-positive rate across groups (Y = 1 samples only).
double metric_eop(const GroupedPredictions& preds);

// A frozen (transport plan, barycenter) pair received from the server for
// one sensitive group. Rows of the plan are normalized once at construction;
// a score falling into a bin whose row carried no mass when the plan was
// frozen borrows the nearest row with mass.
class FairnessLossTerm {
 public:
  FairnessLossTerm(GroupLabel group, const ot::TransportPlan& plan,
                   const ot::Histogram& barycenter);

  // sum_j |score - c_j| * Tbar(bin(score), j)
  double sample_loss(double score) const;
  // d(sample_loss)/d(score) = sum_j sign(score - c_j) * Tbar(bin(score), j),
  // with sign(0) = 0; exact wherever the bin index is locally constant.
  double sample_gradient(double score) const;

  const GroupLabel& group() const { return group_; }
  std::size_t bin_count() const { return bin_count_; }

 private:
  // Index of the resolved (possibly borrowed) row for a score's bin, times n.
  std::size_t row_offset(double score) const;

  GroupLabel group_;
  std::size_t bin_count_ = 0;
  std::vector<std::size_t> row_for_bin_;  // borrowing map, identity on mass
  std::vector<double> mass_prefix_;       // per row: prefix sums of Tbar
  std::vector<double> cmass_prefix_;      // per row: prefix sums of c_j * Tbar
};

// L_fairness = sum over terms of the group-mean expected transport distance:
// (1/|S_a|) * sum_{s in S_a} term_a.sample_loss(s). Groups present in the
// score map without a matching term contribute nothing (they received no
// plan this round), as do terms whose group has no scores.
double fairness_loss(const std::map<int, std::vector<double>>& scores_by_group,
                     std::span<const FairnessLossTerm> terms);

// Per-sample gradient with the same group-size normalization as
// fairness_loss: term.sample_gradient(score) / group_count.
double fairness_loss_gradient(double score, const FairnessLossTerm& term,
                              std::size_t group_count);

}  // namespace wassffed::fair
