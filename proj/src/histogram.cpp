#include "wassffed/histogram.hpp"

#include <cmath>
#include <string>

#include "wassffed/errors.hpp"

namespace wassffed::ot {

std::size_t bin_index(double score, std::size_t bin_count) {
  if (bin_count < 2) {
    throw DomainError("bin_count must be >= 2, got " +
                      std::to_string(bin_count));
  }
  if (!(score >= 0.0 && score <= 1.0)) {
    throw DomainError("score " + std::to_string(score) +
                      " outside [0, 1]");
  }
  auto idx = static_cast<std::size_t>(score * static_cast<double>(bin_count));
  if (idx >= bin_count) idx = bin_count - 1;  // score == 1.0 and fp spill
  return idx;
}

double bin_center(std::size_t bin, std::size_t bin_count) {
  return (static_cast<double>(bin) + 0.5) / static_cast<double>(bin_count);
}

Histogram::Histogram(std::vector<double> masses) : masses_(std::move(masses)) {
  if (masses_.size() < 2) {
    throw DomainError("histogram needs at least 2 bins, got " +
                      std::to_string(masses_.size()));
  }
  double sum = 0.0;
  for (double m : masses_) {
    if (!(m >= 0.0)) {
      throw DomainError("histogram mass must be nonnegative, got " +
                        std::to_string(m));
    }
    sum += m;
  }
  if (std::abs(sum - 1.0) > kMassTol) {
    throw DomainError("histogram masses sum to " + std::to_string(sum) +
                      ", expected 1 within 1e-9");
  }
}

double CountHistogram::total() const {
  double sum = 0.0;
  for (double c : counts) sum += c;
  return sum;
}

Histogram CountHistogram::normalized() const {
  double sum = total();
  if (sum <= 0.0) {
    throw EmptyDistribution("count histogram has zero total mass");
  }
  std::vector<double> masses(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) masses[i] = counts[i] / sum;
  return Histogram(std::move(masses));
}

CountHistogram& CountHistogram::operator+=(const CountHistogram& other) {
  if (counts.empty()) {
    counts = other.counts;
    return *this;
  }
  if (counts.size() != other.counts.size()) {
    throw ShapeError("count histograms have different bin counts: " +
                     std::to_string(counts.size()) + " vs " +
                     std::to_string(other.counts.size()));
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

CountHistogram make_count_histogram(std::span<const double> scores,
                                    std::size_t bin_count) {
  if (scores.empty()) {
    throw EmptyDistribution("cannot bin an empty score list");
  }
  CountHistogram hist;
  hist.counts.assign(bin_count, 0.0);
  for (double s : scores) {
    hist.counts[bin_index(s, bin_count)] += 1.0;
  }
  return hist;
}

Histogram make_histogram(std::span<const double> scores,
                         std::size_t bin_count) {
  return make_count_histogram(scores, bin_count).normalized();
}

double wasserstein_1d(const Histogram& a, const Histogram& b) {
  if (a.bin_count() != b.bin_count()) {
    throw ShapeError("histogram bin counts differ: " +
                     std::to_string(a.bin_count()) + " vs " +
                     std::to_string(b.bin_count()));
  }
  const std::size_t n = a.bin_count();
  double cdf_a = 0.0;
  double cdf_b = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cdf_a += a.mass(i);
    cdf_b += b.mass(i);
    acc += std::abs(cdf_a - cdf_b);
  }
  return acc / static_cast<double>(n);
}

}  // namespace wassffed::ot
