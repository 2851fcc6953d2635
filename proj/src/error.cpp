#include "imputekit/error.hpp"

namespace imputekit {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ColumnConstant: return "ColumnConstant";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::TooFew: return "TooFew";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::EmptyTotal: return "EmptyTotal";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::ConstantInput: return "ConstantInput";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::BadSchema: return "BadSchema";
    case ErrorCode::BadCorrelationSpec: return "BadCorrelationSpec";
    case ErrorCode::DriverIsTarget: return "DriverIsTarget";
    case ErrorCode::PoolTooSmall: return "PoolTooSmall";
    case ErrorCode::NothingMissing: return "NothingMissing";
    case ErrorCode::FullyMissing: return "FullyMissing";
    case ErrorCode::EmptyBounds: return "EmptyBounds";
    case ErrorCode::MissingModel: return "MissingModel";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::NonFiniteFitness: return "NonFiniteFitness";
    case ErrorCode::AllZeroVariance: return "AllZeroVariance";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadConfig:
      return ErrorCategory::Usage;
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::NonFiniteFitness:
    case ErrorCode::AllZeroVariance:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace imputekit
