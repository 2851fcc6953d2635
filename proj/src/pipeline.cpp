#include "imputekit/pipeline.hpp"

#include "imputekit/csv.hpp"
#include "imputekit/error.hpp"
#include "imputekit/model_io.hpp"
#include "imputekit/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace imputekit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::BadConfig, fmt::format("'{}' must be an object", where));
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw Error(ErrorCode::BadConfig, fmt::format("unknown key '{}' in {}", key, where));
}

template <class T>
void take(const json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::BadConfig, fmt::format("'{}' in {} has the wrong type", key, where));
  }
}

fs::path resolve(const fs::path& p, const fs::path& base) { return p.is_absolute() || base.empty() ? p : base / p; }

MaskGranularity parse_granularity(const std::string& s) {
  if (s == "row") return MaskGranularity::PerRow;
  if (s == "cell") return MaskGranularity::PerCell;
  throw Error(ErrorCode::BadConfig, fmt::format("granularity '{}' (expected row or cell)", s));
}

BoundsWidth parse_width(const std::string& s) {
  if (s == "one-sigma") return BoundsWidth::OneSigma;
  if (s == "two-sigma") return BoundsWidth::TwoSigma;
  throw Error(ErrorCode::BadConfig, fmt::format("hot-deck width '{}' (expected one-sigma or two-sigma)", s));
}

MissingnessMechanism make_mechanism(const MissingnessConfig& m) {
  if (m.mechanism == "mar") return Mar{m.driver, m.slope, m.rate};
  if (m.mechanism == "mcar") return Mcar{m.rate};
  if (m.mechanism == "mnar") return Mnar{m.rate};
  throw Error(ErrorCode::BadConfig, fmt::format("missingness mechanism '{}' (expected mar, mcar or mnar)", m.mechanism));
}

/// Tracks every file a command writes so the manifest has no orphans.
class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  std::ofstream open(const fs::path& rel, bool volatile_file = false) {
    const fs::path full = root_ / rel;
    fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", full.string()));
    record(rel, volatile_file);
    return out;
  }

  void record(const fs::path& rel, bool volatile_file = false) {
    files_.push_back(rel);
    if (volatile_file) volatile_.insert(rel.generic_string());
  }

  const fs::path& root() const { return root_; }

  std::vector<fs::path> finish() {
    json entries = json::array();
    for (const auto& f : files_)
      entries.push_back({{"path", f.generic_string()}, {"volatile", volatile_.count(f.generic_string()) > 0}});
    save_json(root_ / "manifest.json", {{"version", 1}, {"files", entries}});
    files_.push_back("manifest.json");
    return files_;
  }

 private:
  fs::path root_;
  std::vector<fs::path> files_;
  std::set<std::string> volatile_;
};

void write_table(OutputDir& out, const fs::path& rel, const SurveyTable& table) {
  auto f = out.open(rel);
  write_survey_csv(f, table);
}

void write_json(OutputDir& out, const fs::path& rel, const json& j, bool volatile_file = false) {
  auto f = out.open(rel, volatile_file);
  f << j.dump(2) << '\n';
}

SurveyTable synthesize_for(const Schema& schema, const RunConfig& cfg) {
  const SynthesisSpec spec = schema == default_schema() ? default_synthesis_spec() : SynthesisSpec{};
  return synthesize(schema, cfg.rows, derive_seed(cfg.seed, "data"), spec);
}

ModelConfig seeded_models(const RunConfig& cfg) {
  ModelConfig m = cfg.models;
  m.mlp.seed = derive_seed(cfg.seed, "init");
  return m;
}

/// `base` with the flagged cells taken from `source`.
SurveyTable overlay_cells(const SurveyTable& base, const SurveyTable& source, const BoolMatrix& cells) {
  SurveyTable out = base;
  for (std::size_t r = 0; r < out.n_rows(); ++r)
    for (std::size_t c = 0; c < out.schema.size(); ++c)
      if (cells(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) out.rows[r][c] = source.rows[r][c];
  return out;
}

/// Raw cells (rows x columns) with at least one masked slot.
BoolMatrix masked_cells(const EncodedMatrix& m) {
  const Schema& schema = m.schema;
  BoolMatrix out(m.mask.rows(), static_cast<Eigen::Index>(schema.size()));
  for (Eigen::Index r = 0; r < m.mask.rows(); ++r)
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const SlotRange s = schema.slots(c);
      out(r, static_cast<Eigen::Index>(c)) =
          !m.mask.row(r).segment(static_cast<Eigen::Index>(s.first), static_cast<Eigen::Index>(s.count)).all();
    }
  return out;
}

/// Raw rows with every masked cell blanked out.
SurveyTable masked_table(const SurveyTable& raw, const EncodedMatrix& masked) {
  const SurveyTable blanks(raw.schema, std::vector<std::vector<Cell>>(raw.n_rows(), std::vector<Cell>(raw.schema.size())));
  return overlay_cells(raw, blanks, masked_cells(masked));
}

/// Re-raises module errors with the pipeline stage that failed.
template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("stage '{}': {}", stage, e.detail()));
  }
}

bool has_binary_hiv(const Schema& schema) {
  const auto c = schema.find("hiv");
  return c && std::holds_alternative<BinaryKind>(schema.column(*c).kind);
}

}  // namespace

void RunConfig::validate() const {
  if (schema_path && !fs::exists(*schema_path))
    throw Error(ErrorCode::Io, fmt::format("schema file '{}' does not exist", schema_path->string()));
  if (data_path && !fs::exists(*data_path))
    throw Error(ErrorCode::Io, fmt::format("data file '{}' does not exist", data_path->string()));
  if (!data_path && rows < 8) throw Error(ErrorCode::BadConfig, "rows must be >= 8");
  if (methods.empty()) throw Error(ErrorCode::BadConfig, "no imputation method selected");
  missing_columns(missing);
  make_mechanism(missingness);
  if (!(missingness.rate >= 0.0 && missingness.rate <= 1.0))
    throw Error(ErrorCode::BadConfig, "missingness rate outside [0,1]");
  models.validate();
  ga.validate();
  hot_deck.validate();
  tolerances.validate();
  if (impact.bins < 1 || impact.quantiles < 1) throw Error(ErrorCode::BadConfig, "impact bins and quantiles must be >= 1");
}

void apply_config(RunConfig& cfg, const json& j, const fs::path& base_dir) {
  reject_unknown(j,
                 {"schema", "data", "rows", "seed", "methods", "method", "missing", "missingness", "mlp",
                  "anfis", "pca", "ga", "hot_deck", "tolerances", "impact", "out"},
                 "config");
  if (j.contains("schema")) {
    std::string p;
    take(j, "schema", p, "config");
    cfg.schema_path = resolve(p, base_dir);
  }
  if (j.contains("data")) {
    std::string p;
    take(j, "data", p, "config");
    cfg.data_path = resolve(p, base_dir);
  }
  if (j.contains("out")) {
    std::string p;
    take(j, "out", p, "config");
    cfg.out = resolve(p, base_dir);
  }
  take(j, "rows", cfg.rows, "config");
  take(j, "seed", cfg.seed, "config");
  take(j, "missing", cfg.missing, "config");
  if (j.contains("methods") || j.contains("method")) {
    std::vector<std::string> names;
    if (j.contains("methods")) take(j, "methods", names, "config");
    if (j.contains("method")) {
      std::string one;
      take(j, "method", one, "config");
      names = {one};
    }
    cfg.methods.clear();
    for (const auto& n : names) cfg.methods.push_back(Method::parse(n));
  }
  if (j.contains("missingness")) {
    const auto& m = j["missingness"];
    reject_unknown(m, {"mechanism", "driver", "slope", "rate", "granularity"}, "missingness");
    take(m, "mechanism", cfg.missingness.mechanism, "missingness");
    take(m, "driver", cfg.missingness.driver, "missingness");
    take(m, "slope", cfg.missingness.slope, "missingness");
    take(m, "rate", cfg.missingness.rate, "missingness");
    if (m.contains("granularity")) {
      std::string g;
      take(m, "granularity", g, "missingness");
      cfg.missingness.granularity = parse_granularity(g);
    }
  }
  if (j.contains("mlp")) {
    const auto& m = j["mlp"];
    reject_unknown(m, {"hidden", "epochs", "learning_rate", "backtracking"}, "mlp");
    take(m, "hidden", cfg.models.hidden, "mlp");
    take(m, "epochs", cfg.models.mlp.epochs, "mlp");
    take(m, "learning_rate", cfg.models.mlp.learning_rate, "mlp");
    take(m, "backtracking", cfg.models.mlp.backtracking, "mlp");
  }
  if (j.contains("anfis")) {
    const auto& m = j["anfis"];
    reject_unknown(m, {"radius", "squash_factor", "accept_ratio", "reject_ratio", "epochs", "learning_rate"}, "anfis");
    take(m, "radius", cfg.models.cluster.radius, "anfis");
    take(m, "squash_factor", cfg.models.cluster.squash_factor, "anfis");
    take(m, "accept_ratio", cfg.models.cluster.accept_ratio, "anfis");
    take(m, "reject_ratio", cfg.models.cluster.reject_ratio, "anfis");
    take(m, "epochs", cfg.models.anfis_epochs, "anfis");
    take(m, "learning_rate", cfg.models.anfis_learning_rate, "anfis");
  }
  if (j.contains("pca")) {
    reject_unknown(j["pca"], {"components"}, "pca");
    take(j["pca"], "components", cfg.models.pca_components, "pca");
  }
  if (j.contains("ga")) {
    const auto& m = j["ga"];
    reject_unknown(m, {"population", "generations", "crossover_rate", "mutation_rate", "elitism", "tournament"}, "ga");
    take(m, "population", cfg.ga.population, "ga");
    take(m, "generations", cfg.ga.generations, "ga");
    take(m, "crossover_rate", cfg.ga.crossover_rate, "ga");
    take(m, "mutation_rate", cfg.ga.mutation_rate, "ga");
    take(m, "elitism", cfg.ga.elitism, "ga");
    take(m, "tournament", cfg.ga.tournament, "ga");
  }
  if (j.contains("hot_deck")) {
    const auto& m = j["hot_deck"];
    reject_unknown(m, {"min_matches", "initial_threshold", "growth", "width"}, "hot_deck");
    take(m, "min_matches", cfg.hot_deck.min_matches, "hot_deck");
    take(m, "initial_threshold", cfg.hot_deck.initial_threshold, "hot_deck");
    take(m, "growth", cfg.hot_deck.growth, "hot_deck");
    if (m.contains("width")) {
      std::string w;
      take(m, "width", w, "hot_deck");
      cfg.hot_deck.width = parse_width(w);
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    if (!t.is_object()) throw Error(ErrorCode::BadConfig, "'tolerances' must map column names to width lists");
    cfg.tolerances.widths.clear();
    for (const auto& [name, widths] : t.items()) {
      std::vector<double> w;
      take(t, name.c_str(), w, "tolerances");
      cfg.tolerances.widths.emplace_back(name, std::move(w));
    }
  }
  if (j.contains("impact")) {
    reject_unknown(j["impact"], {"bins", "quantiles"}, "impact");
    take(j["impact"], "bins", cfg.impact.bins, "impact");
    take(j["impact"], "quantiles", cfg.impact.quantiles, "impact");
  }
}

RunConfig load_run_config(const fs::path& path) {
  RunConfig cfg;
  json j;
  try {
    j = load_json(path);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw Error(ErrorCode::BadConfig, e.what());
    throw;
  }
  apply_config(cfg, j, path.parent_path());
  return cfg;
}

json to_json(const RunConfig& cfg) {
  std::vector<std::string> methods;
  for (const auto& m : cfg.methods) methods.push_back(m.name());
  json tol = json::object();
  for (const auto& [name, w] : cfg.tolerances.widths) tol[name] = w;
  return {
      {"rows", cfg.rows},
      {"seed", cfg.seed},
      {"data", cfg.data_path ? "file" : "synthetic"},
      {"methods", methods},
      {"missing", cfg.missing},
      {"missingness",
       {{"mechanism", cfg.missingness.mechanism},
        {"driver", cfg.missingness.driver},
        {"slope", cfg.missingness.slope},
        {"rate", cfg.missingness.rate},
        {"granularity", cfg.missingness.granularity == MaskGranularity::PerRow ? "row" : "cell"}}},
      {"mlp",
       {{"hidden", cfg.models.hidden},
        {"epochs", cfg.models.mlp.epochs},
        {"learning_rate", cfg.models.mlp.learning_rate},
        {"backtracking", cfg.models.mlp.backtracking}}},
      {"anfis",
       {{"radius", cfg.models.cluster.radius},
        {"squash_factor", cfg.models.cluster.squash_factor},
        {"accept_ratio", cfg.models.cluster.accept_ratio},
        {"reject_ratio", cfg.models.cluster.reject_ratio},
        {"epochs", cfg.models.anfis_epochs},
        {"learning_rate", cfg.models.anfis_learning_rate}}},
      {"pca", {{"components", cfg.models.pca_components}}},
      {"ga",
       {{"population", cfg.ga.population},
        {"generations", cfg.ga.generations},
        {"crossover_rate", cfg.ga.crossover_rate},
        {"mutation_rate", cfg.ga.mutation_rate},
        {"elitism", cfg.ga.elitism},
        {"tournament", cfg.ga.tournament}}},
      {"hot_deck",
       {{"min_matches", cfg.hot_deck.min_matches},
        {"initial_threshold", cfg.hot_deck.initial_threshold},
        {"growth", cfg.hot_deck.growth},
        {"width", cfg.hot_deck.width == BoundsWidth::OneSigma ? "one-sigma" : "two-sigma"}}},
      {"tolerances", tol},
      {"impact", {{"bins", cfg.impact.bins}, {"quantiles", cfg.impact.quantiles}}},
  };
}

std::vector<std::string> missing_columns(const std::string& which) {
  if (which == "age" || which == "education" || which == "hiv") return {which};
  if (which == "all3") return {"age", "education", "hiv"};
  throw Error(ErrorCode::BadConfig, fmt::format("--missing '{}' (expected age, education, hiv or all3)", which));
}

SchemaAndRules load_schema(const RunConfig& cfg) {
  if (!cfg.schema_path) return {default_schema(), default_rules()};
  SchemaFile f = read_schema_file(*cfg.schema_path);
  return {std::move(f.schema), std::move(f.rules)};
}

PreparedRun prepare_run(const RunConfig& cfg, std::ostream* log) {
  in_stage("config", [&] { cfg.validate(); });
  PreparedRun prep;
  prep.layout = in_stage("schema", [&] { return load_schema(cfg); });
  const Schema& schema = prep.layout.schema;

  const SurveyTable raw = in_stage("load", [&] {
    return cfg.data_path ? read_survey_csv(*cfg.data_path, schema) : synthesize_for(schema, cfg);
  });
  in_stage("rules", [&] {
    std::set<std::size_t> bad;
    for (const auto& v : check_outliers(raw, prep.layout.rules)) bad.insert(v.row);
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < raw.n_rows(); ++r)
      if (!bad.count(r)) keep.push_back(r);
    prep.outliers_removed = bad.size();
    prep.data = select_rows(raw, keep);
  });
  if (log) *log << fmt::format("data: {} rows ({} removed by rules)\n", prep.data.n_rows(), prep.outliers_removed);

  in_stage("split", [&] {
    // The shuffle depends only on the seed and row count, so the second split
    // reproduces the partitions of the first under train-only normalization.
    const std::uint64_t split_seed = derive_seed(cfg.seed, "split");
    const SplitDataset probe = split(encode(prep.data), split_seed);
    const NormParams norm = encode(select_rows(prep.data, probe.train_rows)).norm;
    prep.split = split(encode(prep.data, norm), split_seed);
    prep.targets = missing_columns(cfg.missing);
    for (const auto& t : prep.targets) schema.index_of(t);
    prep.masked_test = inject_missing(prep.split.test, make_mechanism(cfg.missingness), prep.targets,
                                      derive_seed(cfg.seed, "mask"), cfg.missingness.granularity);
    prep.test_actual = select_rows(prep.data, prep.split.test_rows);
  });
  if (log)
    *log << fmt::format("split: train {}, validation {}, test {} ({} masked slots)\n", prep.split.train.rows(),
                        prep.split.validation.rows(), prep.split.test.rows(), prep.masked_test.masked_count());

  in_stage("train", [&] {
    const ModelConfig mcfg = seeded_models(cfg);
    prep.models = train_models(prep.split.train, cfg.methods, mcfg);
    if (has_binary_hiv(schema)) prep.classifiers = train_hiv_classifiers(prep.split.train, mcfg);
  });
  return prep;
}

std::vector<AccuracyRow> score_accuracy(const SurveyTable& actual, const SurveyTable& imputed,
                                        const BoolMatrix& imputed_cells, const std::vector<std::string>& targets,
                                        const ToleranceSpec& tolerances, const std::string& method_name) {
  const Schema& schema = actual.schema;
  std::vector<AccuracyRow> out;
  for (const auto& name : targets) {
    const std::size_t c = schema.index_of(name);
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < actual.n_rows(); ++r)
      if (imputed_cells(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) rows.push_back(r);
    if (rows.empty()) continue;
    auto row = [&](std::string cls, double v) {
      out.push_back({method_name, targets.size(), name, std::move(cls), v, rows.size()});
    };
    const ColumnKind& kind = schema.column(c).kind;
    if (std::holds_alternative<CategoricalKind>(kind)) {
      std::size_t hits = 0;
      for (auto r : rows) hits += actual.rows[r][c] == imputed.rows[r][c] ? 1 : 0;
      row("exact", 100.0 * static_cast<double>(hits) / static_cast<double>(rows.size()));
      continue;
    }
    std::vector<double> a, b;
    for (auto r : rows) {
      a.push_back(std::get<double>(actual.rows[r][c]));
      b.push_back(std::get<double>(imputed.rows[r][c]));
    }
    if (std::holds_alternative<BinaryKind>(kind)) {
      row("exact", hiv_accuracy(confusion(a, b)));
      continue;
    }
    if (const auto* widths = tolerances.find(name)) {
      const auto acc = tolerance_accuracy(a, b, *widths);
      for (std::size_t k = 0; k < widths->size(); ++k) row("within " + format_number((*widths)[k]), acc[k]);
    }
    row("rmse", rmse(a, b));
  }
  return out;
}

MethodOutcome run_method(const PreparedRun& prep, const Method& method, const RunConfig& cfg) {
  ImputeOptions options{cfg.ga, cfg.hot_deck, derive_seed(cfg.seed, "ga")};
  MethodOutcome mo;
  mo.method = method;
  mo.result = impute_table(prep.masked_test, method, prep.models, options, method.hot_deck ? &prep.split.train : nullptr);

  const Schema& schema = prep.masked_test.schema;
  const auto n = static_cast<Eigen::Index>(prep.masked_test.rows());
  mo.imputed_cells = BoolMatrix::Constant(n, static_cast<Eigen::Index>(schema.size()), false);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (!mo.result.completed.row_complete(static_cast<std::size_t>(r))) continue;
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const SlotRange s = schema.slots(c);
      mo.imputed_cells(r, static_cast<Eigen::Index>(c)) =
          !prep.masked_test.mask.row(r).segment(static_cast<Eigen::Index>(s.first), static_cast<Eigen::Index>(s.count)).all();
    }
  }
  // Failed rows keep their holes; observed cells keep their raw values.
  mo.imputed = overlay_cells(prep.test_actual, decode(mo.result.completed), masked_cells(prep.masked_test));
  mo.accuracy = score_accuracy(prep.test_actual, mo.imputed, mo.imputed_cells, prep.targets, cfg.tolerances, method.name());
  mo.impact = impact_report(prep.test_actual, mo.imputed, prep.split.test.norm,
                            prep.classifiers ? &*prep.classifiers : nullptr, &mo.imputed_cells, cfg.impact);
  return mo;
}

std::vector<fs::path> cmd_synth(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const SchemaAndRules layout = load_schema(cfg);
  const SurveyTable table = synthesize_for(layout.schema, cfg);
  OutputDir out(cfg.out);
  write_table(out, "data.csv", table);
  {
    auto f = out.open("schema.txt");
    write_schema(f, SchemaFile{layout.schema, layout.rules});
  }
  log << fmt::format("synthesized {} rows x {} columns into {}\n", table.n_rows(), layout.schema.size(),
                     (cfg.out / "data.csv").string());
  return out.finish();
}

RunOutcome cmd_run(const RunConfig& cfg, std::ostream& log) {
  RunOutcome run;
  run.prep = prepare_run(cfg, &log);
  const PreparedRun& prep = run.prep;

  for (const auto& m : cfg.methods) {
    run.methods.push_back(in_stage("impute", [&] { return run_method(prep, m, cfg); }));
    const auto& r = run.methods.back().result;
    log << fmt::format("{}: {} rows imputed, {} failed, {:.1f} ms\n", m.name(), r.rows.size() - r.failures(),
                       r.failures(), r.wall_time_ms);
  }

  OutputDir out(cfg.out);
  write_table(out, "data.csv", prep.data);
  {
    auto f = out.open("schema.txt");
    write_schema(f, SchemaFile{prep.layout.schema, prep.layout.rules});
  }
  write_table(out, "test_actual.csv", prep.test_actual);
  write_table(out, "test_masked.csv", masked_table(prep.test_actual, prep.masked_test));
  write_json(out, "models.json", to_json(prep.models));
  if (prep.classifiers) write_json(out, "classifiers.json", to_json(*prep.classifiers));

  {
    auto f = out.open("accuracy.csv");
    write_csv_row(f, {"method", "missing_columns", "column", "class", "value", "n"});
    for (const auto& mo : run.methods)
      for (const auto& a : mo.accuracy)
        write_csv_row(f, {a.method, std::to_string(a.missing_columns), a.column, a.tolerance_class,
                          format_number(a.value), std::to_string(a.n)});
  }

  json summary = {{"config", to_json(cfg)},
                  {"rows", prep.data.n_rows()},
                  {"outliers_removed", prep.outliers_removed},
                  {"partitions",
                   {{"train", prep.split.train.rows()},
                    {"validation", prep.split.validation.rows()},
                    {"test", prep.split.test.rows()},
                    {"max_mean_gap", prep.split.max_mean_gap()}}},
                  {"masked_slots", prep.masked_test.masked_count()},
                  {"methods", json::array()}};
  json timing = {{"methods", json::array()}};
  for (const auto& mo : run.methods) {
    const fs::path dir = fs::path("methods") / mo.method.name();
    write_table(out, dir / "imputed.csv", mo.imputed);
    {
      auto f = out.open(dir / "diagnostics.csv", true);
      write_diagnostics_csv(f, mo.result);
    }
    for (const auto& p : write_impact_files(out.root() / dir / "impact", mo.impact))
      out.record(dir / "impact" / p.filename());

    json acc = json::array();
    for (const auto& a : mo.accuracy)
      acc.push_back({{"column", a.column}, {"class", a.tolerance_class}, {"value", a.value}, {"n", a.n}});
    summary["methods"].push_back({{"method", mo.method.name()},
                                  {"rows_with_holes", mo.result.rows.size()},
                                  {"failures", mo.result.failures()},
                                  {"accuracy", acc},
                                  {"impact", to_json(mo.impact)}});
    timing["methods"].push_back({{"method", mo.method.name()}, {"wall_time_ms", mo.result.wall_time_ms}});
  }
  write_json(out, "summary.json", summary);
  write_json(out, "timing.json", timing, true);
  run.files = out.finish();
  return run;
}

ImpactReport cmd_report(const fs::path& actual_csv, const fs::path& imputed_csv, const RunConfig& cfg,
                        std::ostream& log) {
  cfg.validate();
  const SchemaAndRules layout = load_schema(cfg);
  const SurveyTable actual = read_survey_csv(actual_csv, layout.schema);
  const SurveyTable imputed = read_survey_csv(imputed_csv, layout.schema);
  const EncodedMatrix enc = encode(actual);

  std::optional<HivClassifiers> classifiers;
  if (has_binary_hiv(layout.schema)) classifiers = train_hiv_classifiers(enc, seeded_models(cfg));
  const ImpactReport report =
      impact_report(actual, imputed, enc.norm, classifiers ? &*classifiers : nullptr, nullptr, cfg.impact);

  OutputDir out(cfg.out);
  for (const auto& p : write_impact_files(cfg.out, report)) out.record(p.filename());
  out.finish();
  log << fmt::format("impact report for {} columns written to {}\n", report.columns.size(), cfg.out.string());
  return report;
}

}  // namespace imputekit
