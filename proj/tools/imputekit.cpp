// imputekit: synthesize survey data, impute masked fields and report the
// statistical impact of the imputation.

#include "imputekit/error.hpp"
#include "imputekit/imputer.hpp"
#include "imputekit/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

using imputekit::ErrorCategory;

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Usage: return 1;
    case ErrorCategory::Data: return 2;
    case ErrorCategory::Numerical: return 3;
  }
  return 2;
}

struct Overrides {
  std::string config;
  std::optional<std::string> method;
  bool hot_deck = false;
  std::optional<std::string> missing;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> data;
  std::optional<std::string> schema;
  std::optional<std::size_t> rows;
};

imputekit::RunConfig build_config(const Overrides& o) {
  imputekit::RunConfig cfg = o.config.empty() ? imputekit::RunConfig{} : imputekit::load_run_config(o.config);
  if (o.method) cfg.methods = {imputekit::Method::parse(*o.method)};
  if (o.hot_deck)
    for (auto& m : cfg.methods) m.hot_deck = true;
  if (o.missing) cfg.missing = *o.missing;
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  if (o.data) cfg.data_path = *o.data;
  if (o.schema) cfg.schema_path = *o.schema;
  if (o.rows) cfg.rows = *o.rows;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Missing-data imputation with neural, neuro-fuzzy and PCA models searched by a genetic algorithm"};
  app.require_subcommand(1);
  Overrides o;
  std::string actual_csv, imputed_csv;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--schema", o.schema, "schema file");
  };

  auto* synth = app.add_subcommand("synth", "write a synthetic survey CSV and its schema");
  common(synth);
  synth->add_option("--rows", o.rows, "number of rows");

  auto* run = app.add_subcommand("run", "mask, train, impute, score and report");
  common(run);
  run->add_option("--method", o.method, "nn-ga | nf-ga | nn-pca-ga | nf-pca-ga");
  run->add_flag("--hot-deck", o.hot_deck, "bound the GA search with hot-deck donor statistics");
  run->add_option("--missing", o.missing, "age | education | hiv | all3");
  run->add_option("--data", o.data, "survey CSV (synthesized when omitted)");
  run->add_option("--rows", o.rows, "rows to synthesize");

  auto* report = app.add_subcommand("report", "statistical impact report for two CSVs");
  common(report);
  report->add_option("actual", actual_csv, "ground-truth CSV")->required();
  report->add_option("imputed", imputed_csv, "imputed CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const imputekit::RunConfig cfg = build_config(o);
    if (synth->parsed()) {
      imputekit::cmd_synth(cfg, std::cout);
    } else if (run->parsed()) {
      imputekit::cmd_run(cfg, std::cout);
    } else {
      imputekit::cmd_report(actual_csv, imputed_csv, cfg, std::cout);
    }
  } catch (const imputekit::Error& e) {
    std::cerr << "imputekit: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "imputekit: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
