#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace macrostate {

enum class ErrorCode {
  InvalidArgument,
  IoError,
  // laplacian builders
  AllZeroDensity,
  NonFiniteDistance,
  AllItemsRemoved,
  DisconnectedInput,
  IsolatedNode,
  EmptyGraphAfterPruning,
  // spectra
  ConvergenceFailure,
  DisconnectedSystem,
  ZeroDenominator,
  NoSeparableStructure,
  // qp
  RankDeficientBasis,
  LPInfeasible,
  MaxRowGenerationRounds,
  MaxIterationsExceeded,
  DegenerateOptimum,
  TooLargeForOracle,
  // mixture / validation
  ZeroWeightComponent,
  SingleClusterInput,
  ComponentCountMismatch,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `count()` carries an auxiliary integer
/// where the error has one (component count for DisconnectedInput, the gap
/// index for ZeroDenominator), otherwise -1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, long count = -1)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        count_(count) {}

  ErrorCode code() const noexcept { return code_; }
  long count() const noexcept { return count_; }

 private:
  ErrorCode code_;
  long count_;
};

}  // namespace macrostate
