#pragma once

#include <stdexcept>
#include <string>

namespace gpsmooth {

// Caller violated an input contract (dimension mismatch, bad argument).
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

// A matrix that must be positive definite is not, even after the jitter ladder.
class ConditioningError : public std::runtime_error {
 public:
  explicit ConditioningError(const std::string& what) : std::runtime_error(what) {}
};

// All hyperparameter optimization restarts failed; carries best-so-far diagnostics.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, double best_objective)
      : std::runtime_error(what), best_objective(best_objective) {}
  double best_objective;
};

// Particle filter: every particle has zero measurement likelihood.
class DegeneracyError : public std::runtime_error {
 public:
  explicit DegeneracyError(const std::string& what) : std::runtime_error(what) {}
};

// A covariance update needed a repair larger than the stability threshold.
class UnstableError : public std::runtime_error {
 public:
  explicit UnstableError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gpsmooth
