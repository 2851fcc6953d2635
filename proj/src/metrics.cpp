#include "imputekit/metrics.hpp"

#include "imputekit/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace imputekit {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch, fmt::format("vectors of length {} and {}", a.size(), b.size()));
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double rmse(std::span<const double> actual, std::span<const double> imputed) {
  check_pair(actual, imputed);
  if (actual.empty()) throw Error(ErrorCode::Empty, "rmse of empty vectors");
  double ss = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) ss += (actual[i] - imputed[i]) * (actual[i] - imputed[i]);
  return std::sqrt(ss / static_cast<double>(actual.size()));
}

const std::vector<double>* ToleranceSpec::find(const std::string& column) const {
  for (const auto& [name, w] : widths)
    if (name == column) return &w;
  return nullptr;
}

void ToleranceSpec::validate() const {
  for (const auto& [name, w] : widths) {
    if (w.empty()) throw Error(ErrorCode::BadConfig, fmt::format("no tolerance widths for '{}'", name));
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!(w[i] > 0.0) || !std::isfinite(w[i]) || (i > 0 && !(w[i] > w[i - 1])))
        throw Error(ErrorCode::BadConfig,
                    fmt::format("tolerance widths for '{}' must be positive and strictly increasing", name));
    }
  }
}

std::vector<double> tolerance_accuracy(std::span<const double> actual, std::span<const double> imputed,
                                       std::span<const double> widths) {
  check_pair(actual, imputed);
  if (actual.empty()) throw Error(ErrorCode::Empty, "tolerance accuracy of empty vectors");
  std::vector<double> out;
  for (double w : widths) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < actual.size(); ++i)
      if (std::abs(actual[i] - imputed[i]) <= w) ++hits;
    out.push_back(100.0 * static_cast<double>(hits) / static_cast<double>(actual.size()));
  }
  return out;
}

ConfusionCounts confusion(std::span<const double> actual, std::span<const double> predicted) {
  check_pair(actual, predicted);
  ConfusionCounts c;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const bool truth = actual[i] >= 0.5;
    const bool guess = predicted[i] >= 0.5;
    if (truth && guess) ++c.tp;
    else if (!truth && !guess) ++c.tn;
    else if (guess) ++c.fp;
    else ++c.fn;
  }
  return c;
}

double hiv_accuracy(const ConfusionCounts& counts) {
  if (counts.total() == 0) throw Error(ErrorCode::EmptyTotal, "no classified records");
  return 100.0 * static_cast<double>(counts.tp + counts.tn) / static_cast<double>(counts.total());
}

SummaryStats summary_stats(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::TooFew, fmt::format("{} values, need at least 2", values.size()));
  SummaryStats s;
  s.mean = mean_of(values);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(n - 1));
  return s;
}

Histogram pdf_histogram(std::span<const double> values, std::size_t n_bins) {
  if (values.empty()) throw Error(ErrorCode::Empty, "histogram of no values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return pdf_histogram(values, n_bins, *lo, *hi);
}

Histogram pdf_histogram(std::span<const double> values, std::size_t n_bins, double lo, double hi) {
  if (values.empty()) throw Error(ErrorCode::Empty, "histogram of no values");
  if (n_bins < 1) throw Error(ErrorCode::BadConfig, "histogram needs at least one bin");
  if (!(lo <= hi)) throw Error(ErrorCode::BadConfig, fmt::format("histogram range [{}, {}] is empty", lo, hi));
  Histogram h;
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t b = 0; b <= n_bins; ++b) h.edges.push_back(b == n_bins ? hi : lo + width * static_cast<double>(b));
  std::vector<std::size_t> counts(n_bins, 0);
  for (double v : values) {
    std::size_t b = n_bins - 1;
    if (v < hi && width > 0.0) {
      const double pos = std::floor((v - lo) / width);
      b = pos <= 0.0 ? 0 : std::min(n_bins - 1, static_cast<std::size_t>(pos));
    }
    ++counts[b];
  }
  for (auto c : counts) h.masses.push_back(static_cast<double>(c) / static_cast<double>(values.size()));
  return h;
}

double correlation(std::span<const double> a, std::span<const double> b) {
  check_pair(a, b);
  if (a.size() < 2) throw Error(ErrorCode::TooFew, fmt::format("{} pairs, need at least 2", a.size()));
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sxy += da * db;
    sxx += da * da;
    syy += db * db;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ConstantInput, "correlation with a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::Empty, "quantile of no values");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto i = static_cast<std::size_t>(std::floor(h));
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (h - static_cast<double>(i)) * (sorted[i + 1] - sorted[i]);
}

std::vector<std::pair<double, double>> qq_points(std::span<const double> a, std::span<const double> b,
                                                 std::size_t n_quantiles) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::Empty, "Q-Q of an empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 1; i <= n_quantiles; ++i) {
    const double p = static_cast<double>(i) / static_cast<double>(n_quantiles + 1);
    out.emplace_back(quantile_sorted(sa, p), quantile_sorted(sb, p));
  }
  return out;
}

}  // namespace imputekit
