#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contain {

enum class ErrorCode {
  // numerics
  NotSymmetric,
  Singular,
  NotControllable,
  NotObservable,
  NoConvergence,
  NonFinite,
  DimensionMismatch,
  InvalidArgument,
  // graph
  BadAdjacency,
  NoLeader,
  NoFollower,
  AssumptionViolated,
  // synthesis
  EmptyGammas,
  NonPositiveAlpha,
  VarrhoTooLarge,
  // control / simulation
  MissingState,
  NonFiniteState,
  // scenario files
  Parse,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every library operation. The code identifies the
/// failure class; the CLI maps codes onto process exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace contain
