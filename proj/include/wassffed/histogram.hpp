#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wassffed::ot {

// Normalized mass must sum to 1 within this tolerance.
inline constexpr double kMassTol = 1e-9;

// Bin i covers [i/n, (i+1)/n); a boundary score belongs to the right bin and
// a score of exactly 1.0 to the last bin.
std::size_t bin_index(double score, std::size_t bin_count);
double bin_center(std::size_t bin, std::size_t bin_count);

// Probability masses over bin_count uniform bins on [0, 1].
class Histogram {
 public:
  explicit Histogram(std::vector<double> masses);

  const std::vector<double>& masses() const { return masses_; }
  double mass(std::size_t i) const { return masses_[i]; }
  std::size_t bin_count() const { return masses_.size(); }

 private:
  std::vector<double> masses_;
};

// Raw per-bin counts, the pre-normalization form exchanged with the server;
// total() records how much mass the counts carry.
struct CountHistogram {
  std::vector<double> counts;

  std::size_t bin_count() const { return counts.size(); }
  double total() const;
  Histogram normalized() const;
  CountHistogram& operator+=(const CountHistogram& other);
};

Histogram make_histogram(std::span<const double> scores, std::size_t bin_count);
CountHistogram make_count_histogram(std::span<const double> scores,
                                    std::size_t bin_count);

// Exact 1-Wasserstein distance between two histograms on the shared grid,
// computed from the cumulative distributions: sum_i |F1(i) - F2(i)| / n.
double wasserstein_1d(const Histogram& a, const Histogram& b);

}  // namespace wassffed::ot
