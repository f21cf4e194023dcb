#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "wassffed/histogram.hpp"

namespace wassffed::ot {

inline constexpr double kDefaultMarginalTol = 1e-6;
inline constexpr std::size_t kDefaultSinkhornIters = 1000;

// Dual potentials of the entropic transport problem plus convergence
// bookkeeping. f indexes target bins, g indexes source bins.
struct SinkhornState {
  std::vector<double> f;
  std::vector<double> g;
  std::size_t iteration = 0;
  double marginal_violation = std::numeric_limits<double>::infinity();
};

// Nonnegative coupling between two histograms on the same grid; entry (i, j)
// is the mass moved from source bin i to target bin j.
class TransportPlan {
 public:
  TransportPlan(std::vector<double> cells, Histogram source, Histogram target,
                double epsilon);

  double operator()(std::size_t src, std::size_t dst) const {
    return cells_[src * n_ + dst];
  }
  std::size_t bin_count() const { return n_; }
  const Histogram& source_marginal() const { return source_; }
  const Histogram& target_marginal() const { return target_; }
  double epsilon() const { return epsilon_; }

  double row_sum(std::size_t src) const;
  double col_sum(std::size_t dst) const;
  // Largest absolute deviation of any row/column sum from its marginal.
  double max_marginal_violation() const;

 private:
  std::size_t n_;
  std::vector<double> cells_;
  Histogram source_;
  Histogram target_;
  double epsilon_;
};

// Entropic optimal transport between source and target with cost
// |c_i - c_j| on bin centers. Alternates the target-side and source-side
// dual updates in log domain until the plan's marginals match within tol.
// Throws ConvergenceError (carrying the final violation) when max_iters is
// exhausted first. Pass a SinkhornState to observe the final duals.
TransportPlan sinkhorn_plan(const Histogram& source, const Histogram& target,
                            double epsilon,
                            std::size_t max_iters = kDefaultSinkhornIters,
                            double tol = kDefaultMarginalTol,
                            SinkhornState* state_out = nullptr);

// Total transport cost sum_ij |c_i - c_j| * T(i, j).
double transport_cost(const TransportPlan& plan);

}  // namespace wassffed::ot
