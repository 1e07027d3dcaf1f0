#include "macrostate/error.hpp"

namespace macrostate {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::AllZeroDensity: return "AllZeroDensity";
    case ErrorCode::NonFiniteDistance: return "NonFiniteDistance";
    case ErrorCode::AllItemsRemoved: return "AllItemsRemoved";
    case ErrorCode::DisconnectedInput: return "DisconnectedInput";
    case ErrorCode::IsolatedNode: return "IsolatedNode";
    case ErrorCode::EmptyGraphAfterPruning: return "EmptyGraphAfterPruning";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DisconnectedSystem: return "DisconnectedSystem";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NoSeparableStructure: return "NoSeparableStructure";
    case ErrorCode::RankDeficientBasis: return "RankDeficientBasis";
    case ErrorCode::LPInfeasible: return "LPInfeasible";
    case ErrorCode::MaxRowGenerationRounds: return "MaxRowGenerationRounds";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::DegenerateOptimum: return "DegenerateOptimum";
    case ErrorCode::TooLargeForOracle: return "TooLargeForOracle";
    case ErrorCode::ZeroWeightComponent: return "ZeroWeightComponent";
    case ErrorCode::SingleClusterInput: return "SingleClusterInput";
    case ErrorCode::ComponentCountMismatch: return "ComponentCountMismatch";
  }
  return "Unknown";
}

}  // namespace macrostate
