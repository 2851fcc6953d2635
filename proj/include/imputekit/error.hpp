#pragma once

#include <stdexcept>
#include <string>

namespace imputekit {

enum class ErrorCode {
  // data shape / content
  ColumnConstant,
  UnknownLabel,
  UnknownColumn,
  ShapeMismatch,
  LengthMismatch,
  WidthMismatch,
  TooFewRows,
  TooFew,
  Empty,
  EmptyData,
  EmptyTotal,
  DegenerateData,
  ConstantInput,
  SchemaMismatch,
  BadSchema,
  BadCorrelationSpec,
  DriverIsTarget,
  PoolTooSmall,
  NothingMissing,
  FullyMissing,
  EmptyBounds,
  MissingModel,
  Io,
  Parse,
  // configuration
  BadConfig,
  // numerics
  NonFiniteLoss,
  NonFiniteFitness,
  AllZeroVariance,
};

enum class ErrorCategory { Usage, Data, Numerical };

const char* to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

/// Exception type thrown by every module. The code identifies the failed
/// contract; the message carries context (column name, path, sizes).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  /// Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace imputekit
