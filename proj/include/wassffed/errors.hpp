#pragma once

#include <stdexcept>
#include <string>

namespace wassffed {

// Error taxonomy shared across modules. Each type corresponds to one
// documented failure mode; messages name the offending field or value.

struct EmptyDistribution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an iterative solver exhausts its iteration budget. Carries the
// final marginal violation so callers can decide whether to retry.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& msg, double final_violation)
      : std::runtime_error(msg), violation(final_violation) {}
  double violation;
};

struct WeightError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UndefinedMetric : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MissingGroup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PartitionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wassffed
