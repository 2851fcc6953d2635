#pragma once

#include "imputekit/data_model.hpp"
#include "imputekit/metrics.hpp"
#include "imputekit/training.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace imputekit {

struct ImpactOptions {
  std::size_t bins = 20;
  std::size_t quantiles = 19;
};

struct ColumnImpact {
  std::string column;
  std::size_t n_rows = 0;  // rows compared
  SummaryStats actual;
  SummaryStats imputed;
  std::optional<double> correlation;  // absent when either side is constant
  Histogram actual_pdf;               // shared bin edges
  Histogram imputed_pdf;
  std::vector<std::pair<double, double>> qq;
};

struct ClassifierAccuracy {
  double mlp_actual = 0.0;
  double mlp_imputed = 0.0;
  double fuzzy_actual = 0.0;
  double fuzzy_imputed = 0.0;
};

struct ImpactReport {
  std::vector<ColumnImpact> columns;
  Eigen::VectorXd composition_actual;
  Eigen::VectorXd composition_imputed;
  std::optional<ClassifierAccuracy> classification;
};

/// Compares an imputed table with the ground truth. Non-categorical columns
/// get summary statistics, PDFs, Q-Q points and the actual/imputed
/// correlation. When `imputed_cells` (rows x raw columns) is given, a column
/// is compared only on the rows where it was imputed; columns never imputed
/// are then skipped. PCA composition uses every complete row of each table
/// encoded with `norm`. Classifier accuracy scores each table against its
/// own target column. Throws SchemaMismatch.
ImpactReport impact_report(const SurveyTable& actual, const SurveyTable& imputed, const NormParams& norm,
                           const HivClassifiers* classifiers = nullptr, const BoolMatrix* imputed_cells = nullptr,
                           const ImpactOptions& options = {});

/// Classifier accuracy on one table (rows with a missing cell are skipped).
std::pair<double, double> classifier_accuracy(const HivClassifiers& classifiers, const SurveyTable& table,
                                              const NormParams& norm);

nlohmann::json to_json(const ImpactReport& report);

/// Writes impact.json, stats.csv, histograms.csv, qq.csv and composition.csv
/// into `dir`; returns the paths written.
std::vector<std::filesystem::path> write_impact_files(const std::filesystem::path& dir, const ImpactReport& report);

}  // namespace imputekit
