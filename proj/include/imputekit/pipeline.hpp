#pragma once

#include "imputekit/data_model.hpp"
#include "imputekit/ga.hpp"
#include "imputekit/hotdeck.hpp"
#include "imputekit/impact.hpp"
#include "imputekit/imputer.hpp"
#include "imputekit/metrics.hpp"
#include "imputekit/training.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace imputekit {

struct MissingnessConfig {
  std::string mechanism = "mar";  // mar | mcar | mnar
  std::string driver = "clinic";  // mar only
  double slope = 2.0;             // mar only
  double rate = 0.3;              // base rate (mar) or rate (mcar, mnar)
  MaskGranularity granularity = MaskGranularity::PerRow;
};

struct RunConfig {
  std::optional<std::filesystem::path> schema_path;  // default layout when absent
  std::optional<std::filesystem::path> data_path;    // synthesized when absent
  std::size_t rows = 2000;
  std::uint64_t seed = 1;
  std::vector<Method> methods{Method{}};
  std::string missing = "age";  // age | education | hiv | all3
  MissingnessConfig missingness;
  ModelConfig models;
  GaConfig ga;
  HotDeckConfig hot_deck;
  ToleranceSpec tolerances;
  ImpactOptions impact;
  std::filesystem::path out = "out";

  /// Throws BadConfig, Io (referenced path missing).
  void validate() const;
};

/// Overlays the keys of a JSON config object; relative paths resolve against
/// `base_dir`. Unknown keys are rejected. Throws BadConfig.
void apply_config(RunConfig& cfg, const nlohmann::json& j, const std::filesystem::path& base_dir = {});
/// Throws Io, Parse, BadConfig.
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

/// Raw columns masked for a --missing choice. Throws BadConfig.
std::vector<std::string> missing_columns(const std::string& which);

struct SchemaAndRules {
  Schema schema;
  std::vector<OutlierRule> rules;
};
SchemaAndRules load_schema(const RunConfig& cfg);

/// Everything that precedes imputation.
struct PreparedRun {
  SchemaAndRules layout;
  SurveyTable data;  // after outlier removal
  std::size_t outliers_removed = 0;
  SplitDataset split;
  EncodedMatrix masked_test;
  SurveyTable test_actual;
  std::vector<std::string> targets;
  ImputationModels models;
  std::optional<HivClassifiers> classifiers;  // when the schema has a binary "hiv" column
};

/// Loads or synthesizes the data, drops rule violations, encodes, splits,
/// masks the test partition and trains what cfg.methods need. Seeds come from
/// the named substreams "data", "split", "mask", "init" of cfg.seed.
PreparedRun prepare_run(const RunConfig& cfg, std::ostream* log = nullptr);

struct AccuracyRow {
  std::string method;
  std::size_t missing_columns = 0;
  std::string column;
  std::string tolerance_class;  // "within 2", "exact", "rmse"
  double value = 0.0;
  std::size_t n = 0;
};

struct MethodOutcome {
  Method method;
  ImputationResult result;
  SurveyTable imputed;
  BoolMatrix imputed_cells;  // test rows x raw columns
  std::vector<AccuracyRow> accuracy;
  ImpactReport impact;
};

/// Imputes the masked test partition with one method (GA seeds from the "ga"
/// substream) and scores it.
MethodOutcome run_method(const PreparedRun& prep, const Method& method, const RunConfig& cfg);

/// Accuracy rows for the imputed cells of each target column, in raw units.
std::vector<AccuracyRow> score_accuracy(const SurveyTable& actual, const SurveyTable& imputed,
                                        const BoolMatrix& imputed_cells, const std::vector<std::string>& targets,
                                        const ToleranceSpec& tolerances, const std::string& method_name);

struct RunOutcome {
  PreparedRun prep;
  std::vector<MethodOutcome> methods;
  std::vector<std::filesystem::path> files;  // relative to cfg.out
};

/// Writes the synthesized table and its schema file. Returns the files
/// written (relative to cfg.out).
std::vector<std::filesystem::path> cmd_synth(const RunConfig& cfg, std::ostream& log);

/// Full pipeline; writes every output under cfg.out plus manifest.json.
RunOutcome cmd_run(const RunConfig& cfg, std::ostream& log);

/// Impact report for two CSV files sharing the configured schema.
/// Classifiers are trained on the actual table.
ImpactReport cmd_report(const std::filesystem::path& actual_csv, const std::filesystem::path& imputed_csv,
                        const RunConfig& cfg, std::ostream& log);

}  // namespace imputekit
