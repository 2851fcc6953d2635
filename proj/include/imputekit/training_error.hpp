#pragma once

#include "imputekit/error.hpp"

#include <vector>

namespace imputekit {

/// Raised when a loss turns non-finite; keeps the history recorded so far.
class NonFiniteLossError : public Error {
 public:
  NonFiniteLossError(const std::string& message, std::vector<double> history)
      : Error(ErrorCode::NonFiniteLoss, message), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace imputekit
