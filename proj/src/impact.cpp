#include "imputekit/impact.hpp"

#include "imputekit/csv.hpp"
#include "imputekit/error.hpp"
#include "imputekit/pca.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace imputekit {

namespace fs = std::filesystem;

namespace {

Eigen::VectorXd composition_of(const SurveyTable& table, const NormParams& norm) {
  const EncodedMatrix enc = encode(table, norm);
  const auto rows = complete_rows(enc);
  if (rows.size() < 2) throw Error(ErrorCode::DegenerateData, "fewer than 2 complete rows for PCA composition");
  return component_composition(pca_fit(select_rows(enc, rows).values, 1));
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
  return out;
}

nlohmann::json stats_json(const SummaryStats& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"std", s.std}};
}

}  // namespace

std::pair<double, double> classifier_accuracy(const HivClassifiers& classifiers, const SurveyTable& table,
                                              const NormParams& norm) {
  const EncodedMatrix enc = encode(table, norm);
  std::vector<double> truth, mlp, fuzzy;
  for (auto r : complete_rows(enc)) {
    const Eigen::VectorXd x = enc.values.row(static_cast<Eigen::Index>(r)).transpose();
    truth.push_back(x(static_cast<Eigen::Index>(classifiers.target_slot)));
    mlp.push_back(classifiers.mlp_probability(x));
    fuzzy.push_back(classifiers.fuzzy_probability(x));
  }
  return {hiv_accuracy(confusion(truth, mlp)), hiv_accuracy(confusion(truth, fuzzy))};
}

ImpactReport impact_report(const SurveyTable& actual, const SurveyTable& imputed, const NormParams& norm,
                           const HivClassifiers* classifiers, const BoolMatrix* imputed_cells,
                           const ImpactOptions& options) {
  if (!(actual.schema == imputed.schema))
    throw Error(ErrorCode::SchemaMismatch, "actual and imputed tables have different schemas");
  if (actual.n_rows() != imputed.n_rows())
    throw Error(ErrorCode::SchemaMismatch,
                fmt::format("actual has {} rows, imputed has {}", actual.n_rows(), imputed.n_rows()));
  const Schema& schema = actual.schema;
  if (imputed_cells && (static_cast<std::size_t>(imputed_cells->rows()) != actual.n_rows() ||
                        static_cast<std::size_t>(imputed_cells->cols()) != schema.size()))
    throw Error(ErrorCode::ShapeMismatch, "imputed-cell mask does not match the table");

  ImpactReport report;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (is_categorical(schema.column(c))) continue;
    const auto a_col = actual.numeric_column(c);
    const auto b_col = imputed.numeric_column(c);
    std::vector<double> a, b;
    for (std::size_t r = 0; r < actual.n_rows(); ++r) {
      if (imputed_cells && !(*imputed_cells)(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) continue;
      if (std::isnan(a_col[r]) || std::isnan(b_col[r])) continue;
      a.push_back(a_col[r]);
      b.push_back(b_col[r]);
    }
    if (a.size() < 2) continue;

    ColumnImpact ci;
    ci.column = schema.column(c).name;
    ci.n_rows = a.size();
    ci.actual = summary_stats(a);
    ci.imputed = summary_stats(b);
    try {
      ci.correlation = correlation(a, b);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConstantInput) throw;
    }
    const double lo = std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
    const double hi = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
    ci.actual_pdf = pdf_histogram(a, options.bins, lo, hi);
    ci.imputed_pdf = pdf_histogram(b, options.bins, lo, hi);
    ci.qq = qq_points(a, b, options.quantiles);
    report.columns.push_back(std::move(ci));
  }

  report.composition_actual = composition_of(actual, norm);
  report.composition_imputed = composition_of(imputed, norm);

  if (classifiers) {
    const auto [mlp_a, fuzzy_a] = classifier_accuracy(*classifiers, actual, norm);
    const auto [mlp_b, fuzzy_b] = classifier_accuracy(*classifiers, imputed, norm);
    report.classification = ClassifierAccuracy{mlp_a, mlp_b, fuzzy_a, fuzzy_b};
  }
  return report;
}

nlohmann::json to_json(const ImpactReport& report) {
  nlohmann::json j;
  j["columns"] = nlohmann::json::array();
  for (const auto& c : report.columns) {
    j["columns"].push_back({
        {"column", c.column},
        {"rows", c.n_rows},
        {"actual", stats_json(c.actual)},
        {"imputed", stats_json(c.imputed)},
        {"correlation", c.correlation ? nlohmann::json(*c.correlation) : nlohmann::json(nullptr)},
        {"std_change_percent", c.actual.std > 0.0 ? nlohmann::json(100.0 * (c.imputed.std - c.actual.std) / c.actual.std)
                                                  : nlohmann::json(nullptr)},
    });
  }
  j["composition"] = {
      {"actual", std::vector<double>(report.composition_actual.begin(), report.composition_actual.end())},
      {"imputed", std::vector<double>(report.composition_imputed.begin(), report.composition_imputed.end())},
  };
  if (report.classification) {
    const auto& k = *report.classification;
    j["classification"] = {
        {"mlp", {{"actual", k.mlp_actual}, {"imputed", k.mlp_imputed}}},
        {"anfis", {{"actual", k.fuzzy_actual}, {"imputed", k.fuzzy_imputed}}},
    };
  }
  return j;
}

std::vector<fs::path> write_impact_files(const fs::path& dir, const ImpactReport& report) {
  fs::create_directories(dir);
  std::vector<fs::path> written;

  {
    const auto path = dir / "impact.json";
    auto out = open_out(path);
    out << to_json(report).dump(2) << '\n';
    written.push_back(path);
  }
  {
    const auto path = dir / "stats.csv";
    auto out = open_out(path);
    write_csv_row(out, {"column", "rows", "actual_mean", "imputed_mean", "actual_median", "imputed_median",
                        "actual_std", "imputed_std", "correlation"});
    for (const auto& c : report.columns)
      write_csv_row(out, {c.column, std::to_string(c.n_rows), format_number(c.actual.mean),
                          format_number(c.imputed.mean), format_number(c.actual.median),
                          format_number(c.imputed.median), format_number(c.actual.std), format_number(c.imputed.std),
                          c.correlation ? format_number(*c.correlation) : ""});
    written.push_back(path);
  }
  {
    const auto path = dir / "histograms.csv";
    auto out = open_out(path);
    write_csv_row(out, {"column", "bin", "lo", "hi", "actual_mass", "imputed_mass"});
    for (const auto& c : report.columns)
      for (std::size_t b = 0; b < c.actual_pdf.masses.size(); ++b)
        write_csv_row(out, {c.column, std::to_string(b), format_number(c.actual_pdf.edges[b]),
                            format_number(c.actual_pdf.edges[b + 1]), format_number(c.actual_pdf.masses[b]),
                            format_number(c.imputed_pdf.masses[b])});
    written.push_back(path);
  }
  {
    const auto path = dir / "qq.csv";
    auto out = open_out(path);
    write_csv_row(out, {"column", "index", "actual_quantile", "imputed_quantile"});
    for (const auto& c : report.columns)
      for (std::size_t i = 0; i < c.qq.size(); ++i)
        write_csv_row(out, {c.column, std::to_string(i + 1), format_number(c.qq[i].first),
                            format_number(c.qq[i].second)});
    written.push_back(path);
  }
  {
    const auto path = dir / "composition.csv";
    auto out = open_out(path);
    write_csv_row(out, {"component", "actual_percent", "imputed_percent"});
    for (Eigen::Index i = 0; i < report.composition_actual.size(); ++i)
      write_csv_row(out, {std::to_string(i + 1), format_number(report.composition_actual(i)),
                          format_number(report.composition_imputed(i))});
    written.push_back(path);
  }
  return written;
}

}  // namespace imputekit
