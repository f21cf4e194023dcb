#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace wassffed {

// Stream tags for deriving independent per-purpose RNGs from one master seed.
// Training and reporting use disjoint streams so that a run which never
// reports (the FedAvg path) draws the exact same training sequence as one
// that does.
enum SeedTag : std::uint64_t {
  kSeedTrain = 1,
  kSeedReport = 2,
  kSeedSplit = 3,
  kSeedPartition = 4,
  kSeedSynthetic = 5,
  kSeedInit = 6,
};

inline std::uint64_t mix64(std::uint64_t h) {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

// Hash-combines a base seed with a sequence of parts (tag, client id, round,
// ...) into a well-mixed child seed.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(base ^ 0x9e3779b97f4a7c15ULL);
  for (std::uint64_t p : parts) {
    h = mix64(h ^ (p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  // Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }

  double gamma(double shape) {
    return std::gamma_distribution<double>(shape, 1.0)(engine_);
  }

  // Dirichlet(alpha * 1_k) draw; redraws in the rare case every gamma
  // underflows to zero.
  std::vector<double> dirichlet(double alpha, std::size_t k) {
    std::vector<double> p(k);
    double sum = 0.0;
    while (sum <= 0.0) {
      sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        p[i] = gamma(alpha);
        sum += p[i];
      }
    }
    for (double& v : p) v /= sum;
    return p;
  }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    std::shuffle(values.begin(), values.end(), engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wassffed
