#pragma once

#include <stdexcept>
#include <string>

namespace obmimo {

/// A precondition or postcondition of an operation was violated.
struct ContractViolation : std::logic_error {
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// A matrix that must be invertible for the requested receiver/precompute is
/// (numerically) singular. `where` names the offending computation.
struct SingularMatrixError : std::runtime_error {
  std::string where;
  explicit SingularMatrixError(const std::string& where_)
      : std::runtime_error("singular matrix in " + where_), where(where_) {}
};

/// A non-finite value appeared inside an iterative solver.
struct DivergenceError : std::runtime_error {
  int iteration;
  DivergenceError(const std::string& what, int iteration_)
      : std::runtime_error(what + " at iteration " + std::to_string(iteration_)),
        iteration(iteration_) {}
};

/// Configuration file / flag problems; `field` is "section.key" when known.
struct ConfigError : std::runtime_error {
  std::string field;
  explicit ConfigError(const std::string& what, std::string field_ = "")
      : std::runtime_error(what), field(std::move(field_)) {}
};

/// Raised by the campaign engine when too many setups fail.
struct CampaignAborted : std::runtime_error {
  explicit CampaignAborted(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace obmimo
