#pragma once

#include <stdexcept>
#include <string>

namespace topomuse {

/// Error categories map 1:1 onto CLI exit codes.
enum class ErrorCategory : int {
  kInput = 2,       // malformed or out-of-contract input
  kInfeasible = 3,  // the algorithm cannot satisfy its constraints on this input
  kInternal = 4,    // internal invariant breach
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

struct ParseError : Error {
  explicit ParseError(const std::string& message)
      : Error(ErrorCategory::kInput, message) {}
};

struct DisconnectedNetwork : Error {
  explicit DisconnectedNetwork(const std::string& message)
      : Error(ErrorCategory::kInput, message) {}
};

struct EmptySamplingSupport : Error {
  explicit EmptySamplingSupport(const std::string& message)
      : Error(ErrorCategory::kInfeasible, message) {}
};

struct EmptyIntersection : Error {
  explicit EmptyIntersection(const std::string& message)
      : Error(ErrorCategory::kInfeasible, message) {}
};

struct SeedPlacementFailed : Error {
  explicit SeedPlacementFailed(const std::string& message)
      : Error(ErrorCategory::kInfeasible, message) {}
};

struct InternalError : Error {
  explicit InternalError(const std::string& message)
      : Error(ErrorCategory::kInternal, message) {}
};

}  // namespace topomuse
