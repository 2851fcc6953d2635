#include "imputekit/imputer.hpp"

#include "imputekit/csv.hpp"
#include "imputekit/error.hpp"
#include "imputekit/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <ostream>

namespace imputekit {

namespace {

constexpr std::string_view kHybridSuffix = "+hd";

void check_length(const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(x.size()) != expected)
    throw Error(ErrorCode::LengthMismatch, fmt::format("record length {}, {} expects {}", x.size(), what, expected));
}

void check_scores(const PcaModel& pca, std::size_t n_out) {
  if (n_out != pca.k())
    throw Error(ErrorCode::WidthMismatch, fmt::format("regressor has {} outputs, PCA keeps {}", n_out, pca.k()));
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::string_view base_name(BaseMethod base) noexcept {
  switch (base) {
    case BaseMethod::NnGa: return "nn-ga";
    case BaseMethod::NfGa: return "nf-ga";
    case BaseMethod::NnPcaGa: return "nn-pca-ga";
    case BaseMethod::NfPcaGa: return "nf-pca-ga";
  }
  return "?";
}

std::string Method::name() const {
  std::string out(base_name(base));
  if (hot_deck) out += kHybridSuffix;
  return out;
}

Method Method::parse(std::string_view text) {
  Method m;
  if (text.size() > kHybridSuffix.size() && text.substr(text.size() - kHybridSuffix.size()) == kHybridSuffix) {
    m.hot_deck = true;
    text.remove_suffix(kHybridSuffix.size());
  }
  for (auto b : {BaseMethod::NnGa, BaseMethod::NfGa, BaseMethod::NnPcaGa, BaseMethod::NfPcaGa}) {
    if (text == base_name(b)) {
      m.base = b;
      return m;
    }
  }
  throw Error(ErrorCode::BadConfig,
              fmt::format("unknown method '{}' (expected nn-ga, nf-ga, nn-pca-ga or nf-pca-ga)", text));
}

std::vector<Method> all_methods() {
  std::vector<Method> out;
  for (bool hd : {false, true})
    for (auto b : {BaseMethod::NnGa, BaseMethod::NfGa, BaseMethod::NnPcaGa, BaseMethod::NfPcaGa}) out.push_back({b, hd});
  return out;
}

Eigen::VectorXd AnfisBank::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  check_length(x, n_in, "fuzzy bank");
  Eigen::VectorXd out(static_cast<Eigen::Index>(models.size()));
  Eigen::VectorXd sub;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& idx = inputs[i];
    sub.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) sub(static_cast<Eigen::Index>(j)) = x(static_cast<Eigen::Index>(idx[j]));
    out(static_cast<Eigen::Index>(i)) = anfis_forward(models[i], sub);
  }
  return out;
}

Eigen::VectorXd ScaledMlp::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return offset + scale.cwiseProduct(forward(net, x));
}

void ImputationModels::require(const Method& method) const {
  auto missing = [&](const char* what) {
    return Error(ErrorCode::MissingModel, fmt::format("method {} needs a trained {}", method.name(), what));
  };
  switch (method.base) {
    case BaseMethod::NnGa:
      if (!autoencoder) throw missing("auto-associative MLP");
      break;
    case BaseMethod::NfGa:
      if (!fuzzy_bank) throw missing("auto-associative fuzzy bank");
      break;
    case BaseMethod::NnPcaGa:
      if (!pca) throw missing("PCA model");
      if (!pca_mlp) throw missing("PCA score MLP");
      break;
    case BaseMethod::NfPcaGa:
      if (!pca) throw missing("PCA model");
      if (!pca_fuzzy) throw missing("PCA score fuzzy bank");
      break;
  }
}

double eq1_error(const MlpModel& net, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (net.n_out != net.n_in)
    throw Error(ErrorCode::WidthMismatch, fmt::format("network {}-{} is not auto-associative", net.n_in, net.n_out));
  check_length(x, net.n_in, "network");
  return (x - forward(net, x)).squaredNorm();
}

double eq1_error(const AnfisBank& bank, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (bank.n_out() != bank.n_in)
    throw Error(ErrorCode::WidthMismatch, fmt::format("fuzzy bank {}-{} is not auto-associative", bank.n_in, bank.n_out()));
  return (x - bank.predict(x)).squaredNorm();
}

double eq4_error(const PcaModel& pca, const MlpModel& net, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_scores(pca, net.n_out);
  check_length(x, net.n_in, "network");
  return (pca_compress(pca, x) - forward(net, x)).squaredNorm();
}

double eq4_error(const PcaModel& pca, const ScaledMlp& net, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_scores(pca, net.net.n_out);
  check_length(x, net.net.n_in, "network");
  return (pca_compress(pca, x) - net.predict(x)).squaredNorm();
}

double eq4_error(const PcaModel& pca, const AnfisBank& bank, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_scores(pca, bank.n_out());
  return (pca_compress(pca, x) - bank.predict(x)).squaredNorm();
}

double method_error(const Method& method, const ImputationModels& models, const Eigen::Ref<const Eigen::VectorXd>& x) {
  models.require(method);
  switch (method.base) {
    case BaseMethod::NnGa: return eq1_error(*models.autoencoder, x);
    case BaseMethod::NfGa: return eq1_error(*models.fuzzy_bank, x);
    case BaseMethod::NnPcaGa: return eq4_error(*models.pca, *models.pca_mlp, x);
    case BaseMethod::NfPcaGa: return eq4_error(*models.pca, *models.pca_fuzzy, x);
  }
  return 0.0;
}

RecordImputation impute_record(const Eigen::Ref<const Eigen::VectorXd>& values, const BoolVector& observed,
                               const Schema& schema, const Method& method, const ImputationModels& models,
                               const ImputeOptions& options, const EncodedMatrix* pool) {
  const auto width = static_cast<Eigen::Index>(schema.encoded_width());
  if (values.size() != width || observed.size() != width)
    throw Error(ErrorCode::WidthMismatch,
                fmt::format("record width {} (mask {}), schema width {}", values.size(), observed.size(), width));
  if (observed.all()) throw Error(ErrorCode::NothingMissing, "record has no missing slots");
  if (!observed.any()) throw Error(ErrorCode::FullyMissing, "record has no observed slots");
  models.require(method);

  RecordImputation out;
  for (Eigen::Index j = 0; j < width; ++j)
    if (!observed(j)) out.gene_slots.push_back(static_cast<std::size_t>(j));

  if (method.hot_deck) {
    if (!pool) throw Error(ErrorCode::MissingModel, fmt::format("method {} needs a donor pool", method.name()));
    out.hot_deck = find_similar(values, observed, *pool, options.hot_deck);
    out.bounds = bounds_from_matches(*out.hot_deck);
  } else {
    out.bounds.assign(out.gene_slots.size(), GeneBounds{0.0, 1.0});
  }

  Eigen::VectorXd work = values;
  auto fill = [&](Eigen::VectorXd& x, const Eigen::VectorXd& genes) {
    for (std::size_t g = 0; g < out.gene_slots.size(); ++g)
      x(static_cast<Eigen::Index>(out.gene_slots[g])) = genes(static_cast<Eigen::Index>(g));
  };
  const GaResult ga = run_ga(
      [&](const Eigen::VectorXd& genes) {
        fill(work, genes);
        return -method_error(method, models, work);
      },
      out.bounds, options.ga);

  out.genes = ga.best_genes;
  out.ga_fitness = ga.best_fitness;
  out.evaluations = ga.evaluations;
  out.completed = values;
  fill(out.completed, ga.best_genes);

  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (!is_categorical(schema.column(c))) continue;
    const SlotRange s = schema.slots(c);
    const auto first = static_cast<Eigen::Index>(s.first);
    const auto count = static_cast<Eigen::Index>(s.count);
    if (observed.segment(first, count).any()) continue;
    Eigen::Index winner = 0;
    out.completed.segment(first, count).maxCoeff(&winner);
    out.completed.segment(first, count).setZero();
    out.completed(first + winner) = 1.0;
  }
  out.fitness = -method_error(method, models, out.completed);
  return out;
}

std::size_t ImputationResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const RowDiagnostics& d) { return !d.error.empty(); }));
}

ImputationResult impute_table(const EncodedMatrix& table, const Method& method, const ImputationModels& models,
                              const ImputeOptions& options, const EncodedMatrix* pool) {
  models.require(method);
  if (method.hot_deck && !pool)
    throw Error(ErrorCode::MissingModel, fmt::format("method {} needs a donor pool", method.name()));
  const auto start = std::chrono::steady_clock::now();
  ImputationResult result{table, {}, method, 0.0};
  const Schema& schema = table.schema;

  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (table.row_complete(r)) continue;
    const auto row = static_cast<Eigen::Index>(r);
    const auto row_start = std::chrono::steady_clock::now();
    RowDiagnostics diag;
    diag.row = r;
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const SlotRange s = schema.slots(c);
      if (!table.mask.row(row).segment(static_cast<Eigen::Index>(s.first), static_cast<Eigen::Index>(s.count)).all())
        diag.masked_columns.push_back(schema.column(c).name);
    }

    ImputeOptions row_options = options;
    row_options.ga.seed = derive_seed(options.seed, static_cast<std::uint64_t>(r));
    try {
      const BoolVector observed = table.mask.row(row).transpose();
      const RecordImputation rec =
          impute_record(table.values.row(row).transpose(), observed, schema, method, models, row_options, pool);
      result.completed.values.row(row) = rec.completed.transpose();
      result.completed.mask.row(row).setConstant(true);
      diag.ga_fitness = rec.ga_fitness;
      diag.fitness = rec.fitness;
    } catch (const NonFiniteFitnessError& e) {
      diag.error = e.what();
    } catch (const Error& e) {
      if (e.category() == ErrorCategory::Usage) throw;
      diag.error = e.what();
    }
    diag.wall_time_ms = elapsed_ms(row_start);
    result.rows.push_back(std::move(diag));
  }
  result.wall_time_ms = elapsed_ms(start);
  return result;
}

void write_diagnostics_csv(std::ostream& out, const ImputationResult& result) {
  write_csv_row(out, {"row", "method", "masked_columns", "ga_fitness", "fitness", "wall_time_ms", "error"});
  for (const auto& d : result.rows) {
    std::string cols;
    for (const auto& c : d.masked_columns) cols += (cols.empty() ? "" : ";") + c;
    const bool ok = d.error.empty();
    write_csv_row(out, {std::to_string(d.row), result.method.name(), cols, ok ? format_number(d.ga_fitness) : "",
                        ok ? format_number(d.fitness) : "", fmt::format("{:.3f}", d.wall_time_ms), d.error});
  }
}

}  // namespace imputekit
