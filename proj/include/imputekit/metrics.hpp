#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace imputekit {

/// Root mean square difference. Throws Empty, LengthMismatch.
double rmse(std::span<const double> actual, std::span<const double> imputed);

/// Tolerance classes per raw column, in raw units.
struct ToleranceSpec {
  std::vector<std::pair<std::string, std::vector<double>>> widths{
      {"age", {2.0, 4.0, 6.0}},
      {"education", {1.0, 2.0, 3.0}},
  };

  const std::vector<double>* find(const std::string& column) const;
  /// Widths positive and strictly increasing. Throws BadConfig.
  void validate() const;
};

/// Percentage of |a_i - b_i| <= w for each width w.
/// Throws Empty, LengthMismatch.
std::vector<double> tolerance_accuracy(std::span<const double> actual, std::span<const double> imputed,
                                       std::span<const double> widths);

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Labels are positive when >= 0.5. Throws LengthMismatch.
ConfusionCounts confusion(std::span<const double> actual, std::span<const double> predicted);

/// 100 (tp + tn) / total. Throws EmptyTotal.
double hiv_accuracy(const ConfusionCounts& counts);

struct SummaryStats {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;  // divisor n - 1

  bool operator==(const SummaryStats&) const = default;
};

/// Throws TooFew (n < 2).
SummaryStats summary_stats(std::span<const double> values);

struct Histogram {
  std::vector<double> edges;   // n_bins + 1
  std::vector<double> masses;  // n_bins, sum to 1

  bool operator==(const Histogram&) const = default;
};

/// Equal-width bins over [min, max] of the values; the maximum lands in the
/// last bin. Throws Empty, BadConfig (zero bins).
Histogram pdf_histogram(std::span<const double> values, std::size_t n_bins);
/// Same over a caller-chosen range; values outside it fall in the end bins.
Histogram pdf_histogram(std::span<const double> values, std::size_t n_bins, double lo, double hi);

/// Pearson coefficient, clamped to [-1, 1].
/// Throws TooFew, LengthMismatch, ConstantInput.
double correlation(std::span<const double> a, std::span<const double> b);

/// Linearly interpolated empirical quantile of sorted data (p in [0,1]).
double quantile_sorted(std::span<const double> sorted, double p);

/// Matching quantiles of a and b at p_i = i / (n_quantiles + 1).
/// Throws Empty.
std::vector<std::pair<double, double>> qq_points(std::span<const double> a, std::span<const double> b,
                                                 std::size_t n_quantiles);

}  // namespace imputekit
