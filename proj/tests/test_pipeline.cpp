#include "imputekit/csv.hpp"
#include "imputekit/error.hpp"
#include "imputekit/model_io.hpp"
#include "imputekit/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace imputekit;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("imputekit_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

RunConfig tiny(const fs::path& out) {
  RunConfig cfg;
  cfg.rows = 200;
  cfg.out = out;
  cfg.models.mlp.epochs = 40;
  return cfg;
}

}  // namespace

TEST(Config, AppliesNestedKeys) {
  RunConfig cfg;
  apply_config(cfg, json::parse(R"({
    "rows": 500, "seed": 9, "methods": ["nf-ga", "nn-pca-ga+hd"], "missing": "all3",
    "missingness": {"mechanism": "mcar", "rate": 0.2, "granularity": "cell"},
    "mlp": {"hidden": 7, "epochs": 10}, "anfis": {"radius": 0.4, "epochs": 3},
    "pca": {"components": 9}, "ga": {"population": 20, "generations": 5},
    "hot_deck": {"min_matches": 8, "width": "two-sigma"},
    "tolerances": {"age": [1, 3]}, "impact": {"bins": 10, "quantiles": 9}, "out": "results"
  })"), "/base");
  EXPECT_EQ(cfg.rows, 500u);
  EXPECT_EQ(cfg.seed, 9u);
  ASSERT_EQ(cfg.methods.size(), 2u);
  EXPECT_EQ(cfg.methods[1], (Method{BaseMethod::NnPcaGa, true}));
  EXPECT_EQ(cfg.missing, "all3");
  EXPECT_EQ(cfg.missingness.mechanism, "mcar");
  EXPECT_EQ(cfg.missingness.granularity, MaskGranularity::PerCell);
  EXPECT_EQ(cfg.models.hidden, 7u);
  EXPECT_EQ(cfg.models.cluster.radius, 0.4);
  EXPECT_EQ(cfg.models.pca_components, 9u);
  EXPECT_EQ(cfg.ga.population, 20u);
  EXPECT_EQ(cfg.hot_deck.min_matches, 8u);
  EXPECT_EQ(cfg.hot_deck.width, BoundsWidth::TwoSigma);
  EXPECT_EQ(*cfg.tolerances.find("age"), (std::vector<double>{1, 3}));
  EXPECT_EQ(cfg.impact.bins, 10u);
  EXPECT_EQ(cfg.out, fs::path("/base/results"));
  // untouched keys keep their defaults
  EXPECT_EQ(cfg.models.mlp.learning_rate, TrainConfig{}.learning_rate);
}

TEST(Config, Rejections) {
  RunConfig cfg;
  EXPECT_EQ(code_of([&] { apply_config(cfg, json::parse(R"({"colour": 1})")); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([&] { apply_config(cfg, json::parse(R"({"ga": {"pop": 1}})")); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([&] { apply_config(cfg, json::parse(R"({"method": "svm-ga"})")); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([&] { apply_config(cfg, json::parse(R"({"rows": "many"})")); }), ErrorCode::BadConfig);
  EXPECT_EQ(code_of([] { missing_columns("weight"); }), ErrorCode::BadConfig);
  RunConfig bad;
  bad.ga.population = 1;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::BadConfig);
  RunConfig nopath;
  nopath.data_path = "/nonexistent/data.csv";
  EXPECT_EQ(code_of([&] { nopath.validate(); }), ErrorCode::Io);
}

TEST(Config, LoadFromFile) {
  const fs::path dir = fresh_dir("config_load");
  std::ofstream(dir / "run.json") << R"({"seed": 4, "out": "o"})";
  const RunConfig cfg = load_run_config(dir / "run.json");
  EXPECT_EQ(cfg.seed, 4u);
  EXPECT_EQ(cfg.out, dir / "o");
  std::ofstream(dir / "bad.json") << "{";
  EXPECT_EQ(code_of([&] { load_run_config(dir / "bad.json"); }), ErrorCode::BadConfig);
  fs::remove_all(dir);
}

TEST(Config, MissingColumnChoices) {
  EXPECT_EQ(missing_columns("age"), (std::vector<std::string>{"age"}));
  EXPECT_EQ(missing_columns("all3"), (std::vector<std::string>{"age", "education", "hiv"}));
}

TEST(Accuracy, RowsPerToleranceClass) {
  const SurveyTable actual = synthesize(default_schema(), 20, 2, default_synthesis_spec());
  SurveyTable imputed = actual;
  BoolMatrix cells = BoolMatrix::Constant(20, 8, false);
  for (std::size_t r = 0; r < 10; ++r) {
    cells(static_cast<Eigen::Index>(r), 0) = true;
    cells(static_cast<Eigen::Index>(r), 4) = true;
    imputed.rows[r][0] = Cell{std::get<double>(actual.rows[r][0]) + (r < 5 ? 1.0 : 5.0)};
  }
  const auto rows = score_accuracy(actual, imputed, cells, {"age", "hiv"}, ToleranceSpec{}, "nn-ga");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].tolerance_class, "within 2");
  EXPECT_EQ(rows[0].value, 50.0);
  EXPECT_EQ(rows[1].value, 50.0);
  EXPECT_EQ(rows[2].tolerance_class, "within 6");
  EXPECT_EQ(rows[2].value, 100.0);
  EXPECT_EQ(rows[3].tolerance_class, "rmse");
  EXPECT_EQ(rows[4].column, "hiv");
  EXPECT_EQ(rows[4].tolerance_class, "exact");
  EXPECT_EQ(rows[4].value, 100.0);
  for (const auto& r : rows) {
    EXPECT_EQ(r.missing_columns, 2u);
    EXPECT_EQ(r.n, 10u);
  }
}

TEST(Pipeline, PrepareRunPartitionsAndMasks) {
  const RunConfig cfg = tiny(fresh_dir("prepare"));
  const PreparedRun prep = prepare_run(cfg);
  const std::size_t n = prep.data.n_rows();
  EXPECT_EQ(prep.split.train.rows(), (n + 1) / 2);
  EXPECT_EQ(prep.test_actual.n_rows(), prep.split.test.rows());
  EXPECT_GT(prep.masked_test.masked_count(), 0u);
  // only the age slot is masked
  EXPECT_TRUE(prep.masked_test.mask.rightCols(12).all());
  // normalization comes from the training partition
  EXPECT_EQ(prep.split.train.values.col(0).minCoeff(), 0.0);
  EXPECT_EQ(prep.split.train.values.col(0).maxCoeff(), 1.0);
  EXPECT_TRUE(prep.models.autoencoder.has_value());
  EXPECT_FALSE(prep.models.pca.has_value());
  EXPECT_TRUE(prep.classifiers.has_value());
  fs::remove_all(cfg.out);
}

TEST(Pipeline, StageNamedInErrors) {
  RunConfig cfg = tiny(fresh_dir("stage"));
  cfg.missingness.driver = "age";  // driver is also the target
  try {
    prepare_run(cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DriverIsTarget);
    EXPECT_NE(std::string(e.what()).find("stage 'split'"), std::string::npos) << e.what();
  }
  fs::remove_all(cfg.out);
}

TEST(Pipeline, RunWritesManifestedOutputs) {
  const fs::path out = fresh_dir("run");
  RunConfig cfg = tiny(out);
  cfg.methods = {Method{}, Method{BaseMethod::NnGa, true}};
  std::ostringstream log;
  const RunOutcome run = cmd_run(cfg, log);
  EXPECT_NE(log.str().find("nn-ga+hd"), std::string::npos);
  ASSERT_EQ(run.methods.size(), 2u);
  EXPECT_EQ(run.methods[0].accuracy.size(), 4u);  // three widths plus rmse

  const json manifest = load_json(out / "manifest.json");
  std::set<std::string> declared;
  for (const auto& f : manifest["files"]) declared.insert(f["path"].get<std::string>());
  std::set<std::string> present;
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.is_regular_file()) present.insert(fs::relative(e.path(), out).generic_string());
  present.erase("manifest.json");
  EXPECT_EQ(declared, present);
  for (const char* f : {"accuracy.csv", "summary.json", "models.json", "test_actual.csv", "methods/nn-ga/imputed.csv",
                        "methods/nn-ga+hd/impact/qq.csv"})
    EXPECT_TRUE(present.count(f)) << f;

  // observed cells of the imputed table equal the ground truth
  const SurveyTable imputed = read_survey_csv(out / "methods/nn-ga/imputed.csv", default_schema());
  const SurveyTable actual = read_survey_csv(out / "test_actual.csv", default_schema());
  ASSERT_EQ(imputed.n_rows(), actual.n_rows());
  for (std::size_t r = 0; r < actual.n_rows(); ++r)
    for (std::size_t c = 1; c < 8; ++c) EXPECT_EQ(imputed.rows[r][c], actual.rows[r][c]);
  fs::remove_all(out);
}

TEST(Pipeline, SynthIsDeterministic) {
  const fs::path a = fresh_dir("synth_a"), b = fresh_dir("synth_b");
  RunConfig cfg;
  cfg.rows = 100;
  std::ostringstream log;
  cfg.out = a;
  cmd_synth(cfg, log);
  cfg.out = b;
  cmd_synth(cfg, log);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  const std::string csv = slurp(a / "data.csv");
  EXPECT_EQ(csv, slurp(b / "data.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 101);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Pipeline, ReportOnIdenticalTables) {
  const fs::path dir = fresh_dir("report");
  RunConfig cfg;
  cfg.rows = 300;
  cfg.out = dir / "synth";
  std::ostringstream log;
  cmd_synth(cfg, log);
  cfg.out = dir / "report";
  cfg.models.mlp.epochs = 20;
  cfg.models.anfis_epochs = 2;
  const fs::path csv = dir / "synth" / "data.csv";
  const ImpactReport r = cmd_report(csv, csv, cfg, log);
  for (const auto& c : r.columns) EXPECT_EQ(c.correlation.value_or(0.0), 1.0) << c.column;
  ASSERT_TRUE(r.classification.has_value());
  EXPECT_EQ(r.classification->mlp_actual, r.classification->mlp_imputed);
  for (const char* f : {"histograms.csv", "qq.csv", "composition.csv", "manifest.json"})
    EXPECT_TRUE(fs::exists(cfg.out / f)) << f;
  EXPECT_EQ(code_of([&] { cmd_report(dir / "absent.csv", csv, cfg, log); }), ErrorCode::Io);
  fs::remove_all(dir);
}
