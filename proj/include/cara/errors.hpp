#pragma once
#include <stdexcept>
#include <string>

namespace cara {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Moments with infinite variance (non-central t with df <= 2).
class InfiniteVarianceError : public DomainError {
 public:
  using DomainError::DomainError;
};

// No allocation in (0,1) satisfies the outcome constraint.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Estimator preconditions unmet, e.g. an empty arm in some stratum.
class EstimationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cara
