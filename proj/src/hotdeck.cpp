#include "imputekit/hotdeck.hpp"

#include "imputekit/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace imputekit {

void HotDeckConfig::validate() const {
  if (min_matches < 1) throw Error(ErrorCode::BadConfig, "min_matches must be >= 1");
  if (!(initial_threshold > 0.0) || !std::isfinite(initial_threshold))
    throw Error(ErrorCode::BadConfig, "initial_threshold must be positive");
  if (!(growth > 1.0) || !std::isfinite(growth)) throw Error(ErrorCode::BadConfig, "growth must be > 1");
}

double observed_distance(const Eigen::Ref<const Eigen::VectorXd>& record, const BoolVector& observed,
                         const Eigen::Ref<const Eigen::VectorXd>& row) {
  double sum = 0.0;
  std::size_t n = 0;
  for (Eigen::Index j = 0; j < record.size(); ++j) {
    if (!observed(j)) continue;
    const double diff = record(j) - row(j);
    sum += diff * diff;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::FullyMissing, "record has no observed slots");
  return sum / static_cast<double>(n);
}

HotDeckResult find_similar(const Eigen::Ref<const Eigen::VectorXd>& record, const BoolVector& observed,
                           const Eigen::Ref<const Eigen::MatrixXd>& pool_values, const BoolMatrix& pool_mask,
                           const HotDeckConfig& cfg) {
  cfg.validate();
  const Eigen::Index width = record.size();
  if (observed.size() != width || pool_values.cols() != width || pool_mask.cols() != width ||
      pool_mask.rows() != pool_values.rows())
    throw Error(ErrorCode::WidthMismatch,
                fmt::format("record width {}, mask {}, pool {}x{}", width, observed.size(), pool_values.rows(),
                            pool_values.cols()));
  if (observed.all()) throw Error(ErrorCode::NothingMissing, "record has no missing slots");
  if (!observed.any()) throw Error(ErrorCode::FullyMissing, "record has no observed slots");

  std::vector<std::size_t> eligible;
  std::vector<double> dist;
  for (Eigen::Index r = 0; r < pool_values.rows(); ++r) {
    if (!pool_mask.row(r).all()) continue;
    eligible.push_back(static_cast<std::size_t>(r));
    dist.push_back(observed_distance(record, observed, pool_values.row(r).transpose()));
  }
  if (eligible.size() < cfg.min_matches)
    throw Error(ErrorCode::PoolTooSmall,
                fmt::format("{} usable donor rows, {} required", eligible.size(), cfg.min_matches));

  HotDeckResult result;
  result.width = cfg.width;
  double t = cfg.initial_threshold;
  auto count_under = [&](double th) {
    return static_cast<std::size_t>(std::count_if(dist.begin(), dist.end(), [&](double d) { return d <= th; }));
  };
  while (count_under(t) < cfg.min_matches) t *= cfg.growth;
  result.final_threshold = t;
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    if (dist[i] <= t) {
      result.match_indices.push_back(eligible[i]);
      result.distances.push_back(dist[i]);
    }
  }

  const double n = static_cast<double>(result.match_indices.size());
  for (Eigen::Index j = 0; j < width; ++j) {
    if (observed(j)) continue;
    FieldSummary f;
    f.slot = static_cast<std::size_t>(j);
    for (auto r : result.match_indices) f.mean += pool_values(static_cast<Eigen::Index>(r), j);
    f.mean /= n;
    double ss = 0.0;
    for (auto r : result.match_indices) {
      const double d = pool_values(static_cast<Eigen::Index>(r), j) - f.mean;
      ss += d * d;
    }
    f.std = n > 1.0 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const GeneBounds b = field_bounds(f.mean, f.std, cfg.width);
    f.lo = b.lo;
    f.hi = b.hi;
    result.fields.push_back(f);
  }
  return result;
}

HotDeckResult find_similar(const Eigen::Ref<const Eigen::VectorXd>& record, const BoolVector& observed,
                           const EncodedMatrix& pool, const HotDeckConfig& cfg) {
  return find_similar(record, observed, pool.values, pool.mask, cfg);
}

GeneBounds field_bounds(double mean, double std, BoundsWidth width) {
  double half = width == BoundsWidth::OneSigma ? 0.5 * std : std;
  // Equal donor values can leave rounding residue in the spread.
  if (std <= 1e-12) half = 0.01;
  return {std::clamp(mean - half, 0.0, 1.0), std::clamp(mean + half, 0.0, 1.0)};
}

SearchBounds bounds_from_matches(const HotDeckResult& result) {
  SearchBounds out;
  out.reserve(result.fields.size());
  for (const auto& f : result.fields) out.push_back(field_bounds(f.mean, f.std, result.width));
  return out;
}

}  // namespace imputekit
