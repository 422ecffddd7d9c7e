#include "sfd/error.hpp"

namespace sfd {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kCapExceeded: return "CapExceeded";
    case ErrorCode::kNumericalFailure: return "NumericalFailure";
    case ErrorCode::kNotInHull: return "NotInHull";
    case ErrorCode::kNotInHullSum: return "NotInHullSum";
    case ErrorCode::kUnsupportedDim: return "UnsupportedDim";
    case ErrorCode::kOracleFailure: return "OracleFailure";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kInvalidSparsity: return "InvalidSparsity";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kSmoothnessViolated: return "SmoothnessViolated";
    case ErrorCode::kResampleLimit: return "ResampleLimit";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace sfd
