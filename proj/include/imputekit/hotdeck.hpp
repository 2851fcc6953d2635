#pragma once

#include "imputekit/data_model.hpp"
#include "imputekit/ga.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace imputekit {

enum class BoundsWidth {
  OneSigma,  // mean +- sigma/2
  TwoSigma,  // mean +- sigma
};

struct HotDeckConfig {
  std::size_t min_matches = 6;
  double initial_threshold = 0.01;
  double growth = 2.0;
  BoundsWidth width = BoundsWidth::OneSigma;

  /// Throws BadConfig.
  void validate() const;
};

/// Donor statistics for one missing slot.
struct FieldSummary {
  std::size_t slot = 0;
  double mean = 0.0;
  double std = 0.0;  // divisor n - 1
  double lo = 0.0;
  double hi = 0.0;
};

struct HotDeckResult {
  std::vector<std::size_t> match_indices;  // pool rows, ascending
  std::vector<double> distances;           // parallel to match_indices
  std::vector<FieldSummary> fields;        // one per missing slot, ascending slot
  double final_threshold = 0.0;
  BoundsWidth width = BoundsWidth::OneSigma;
};

/// Mean squared difference between `record` and `row` over the slots where
/// `observed` is true.
double observed_distance(const Eigen::Ref<const Eigen::VectorXd>& record, const BoolVector& observed,
                         const Eigen::Ref<const Eigen::VectorXd>& row);

/// Finds donors for a record with holes. Pool rows lacking any slot are
/// skipped. The threshold starts at initial_threshold and is multiplied by
/// growth until at least min_matches donors lie at or under it.
/// Throws PoolTooSmall, FullyMissing, NothingMissing, WidthMismatch.
HotDeckResult find_similar(const Eigen::Ref<const Eigen::VectorXd>& record, const BoolVector& observed,
                           const Eigen::Ref<const Eigen::MatrixXd>& pool_values, const BoolMatrix& pool_mask,
                           const HotDeckConfig& cfg = {});
HotDeckResult find_similar(const Eigen::Ref<const Eigen::VectorXd>& record, const BoolVector& observed,
                           const EncodedMatrix& pool, const HotDeckConfig& cfg = {});

/// Interval around `mean` clamped to [0,1]; a zero spread (<= 1e-12) widens
/// to +-0.01.
GeneBounds field_bounds(double mean, double std, BoundsWidth width = BoundsWidth::OneSigma);

/// One gene interval per missing slot, in slot order.
SearchBounds bounds_from_matches(const HotDeckResult& result);

}  // namespace imputekit
