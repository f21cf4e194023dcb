#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wassffed/histogram.hpp"
#include "wassffed/transport.hpp"

namespace wassffed::ot {

struct BarycenterResult {
  Histogram barycenter;
  // sum_a weights[a] * wasserstein_1d(barycenter, hists[a]); exact distances,
  // not the entropic surrogate, so the number is comparable across epsilon.
  double objective = 0.0;
  std::vector<double> weights;
};

// Fixed-support Wasserstein barycenter on the inputs' shared grid, computed
// by iterative Bregman/KL projections with entropic regularization epsilon.
// Stops when the barycenter moves less than tol between sweeps (max-abs mass
// change) or after max_iters sweeps, whichever comes first.
BarycenterResult barycenter(std::span<const Histogram> hists,
                            std::span<const double> weights, double epsilon,
                            std::size_t max_iters = kDefaultSinkhornIters,
                            double tol = kDefaultMarginalTol);

}  // namespace wassffed::ot
