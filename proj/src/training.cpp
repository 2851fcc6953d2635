#include "imputekit/training.hpp"

#include "imputekit/error.hpp"
#include "imputekit/random.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace imputekit {

namespace {

Eigen::MatrixXd gather_columns(const Eigen::Ref<const Eigen::MatrixXd>& data, const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(data.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = data.col(static_cast<Eigen::Index>(cols[j]));
  return out;
}

AnfisModel fit_fuzzy(const Eigen::Ref<const Eigen::MatrixXd>& inputs, const Eigen::Ref<const Eigen::VectorXd>& target,
                     const std::vector<Eigen::VectorXd>& centers, const ModelConfig& cfg) {
  AnfisModel model = build_anfis_from_centers(inputs, target, centers, cfg.cluster.radius);
  return anfis_train(std::move(model), inputs, target, cfg.anfis_epochs, cfg.anfis_learning_rate).model;
}

TrainConfig seeded(const TrainConfig& base, std::string_view stream) {
  TrainConfig cfg = base;
  cfg.seed = derive_seed(base.seed, stream);
  return cfg;
}

// Score targets are mapped into [0.1, 0.9] so the sigmoid outputs never need
// to saturate.
constexpr double kScoreMargin = 0.1;

}  // namespace

void ModelConfig::validate() const {
  if (hidden < 1) throw Error(ErrorCode::BadConfig, "hidden must be >= 1");
  mlp.validate();
  cluster.validate();
  if (anfis_epochs < 1) throw Error(ErrorCode::BadConfig, "anfis_epochs must be >= 1");
  if (!(anfis_learning_rate > 0.0)) throw Error(ErrorCode::BadConfig, "anfis_learning_rate must be positive");
  if (pca_components < 1) throw Error(ErrorCode::BadConfig, "pca_components must be >= 1");
}

MlpModel train_autoencoder(const Eigen::Ref<const Eigen::MatrixXd>& data, const ModelConfig& cfg) {
  return fit_mlp(data, data, cfg.hidden, seeded(cfg.mlp, "autoencoder")).model;
}

AnfisBank train_fuzzy_bank(const Eigen::Ref<const Eigen::MatrixXd>& data, const Schema& schema,
                           const ModelConfig& cfg) {
  const std::size_t width = schema.encoded_width();
  if (static_cast<std::size_t>(data.cols()) != width)
    throw Error(ErrorCode::WidthMismatch, fmt::format("data width {}, schema width {}", data.cols(), width));
  AnfisBank bank;
  bank.n_in = width;
  bank.models.resize(width);
  bank.inputs.resize(width);
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const SlotRange own = schema.slots(c);
    std::vector<std::size_t> cols;
    for (std::size_t s = 0; s < width; ++s)
      if (s < own.first || s >= own.first + own.count) cols.push_back(s);
    const Eigen::MatrixXd x = gather_columns(data, cols);
    const auto centers = subtractive_cluster(x, cfg.cluster);
    for (std::size_t s = own.first; s < own.first + own.count; ++s) {
      bank.models[s] = fit_fuzzy(x, data.col(static_cast<Eigen::Index>(s)), centers, cfg);
      bank.inputs[s] = cols;
    }
  }
  return bank;
}

ScaledMlp train_pca_mlp(const PcaModel& pca, const Eigen::Ref<const Eigen::MatrixXd>& data, const ModelConfig& cfg) {
  const Eigen::MatrixXd scores = pca_compress_rows(pca, data);
  const Eigen::RowVectorXd lo = scores.colwise().minCoeff();
  const Eigen::RowVectorXd hi = scores.colwise().maxCoeff();
  ScaledMlp out;
  out.scale = ((hi - lo).array().max(1e-12) / (1.0 - 2.0 * kScoreMargin)).matrix().transpose();
  out.offset = lo.transpose() - kScoreMargin * out.scale;
  const Eigen::MatrixXd targets =
      ((scores.rowwise() - out.offset.transpose()).array().rowwise() / out.scale.transpose().array()).matrix();
  out.net = fit_mlp(data, targets, cfg.hidden, seeded(cfg.mlp, "pca-mlp")).model;
  return out;
}

AnfisBank train_pca_fuzzy(const PcaModel& pca, const Eigen::Ref<const Eigen::MatrixXd>& data, const ModelConfig& cfg) {
  const Eigen::MatrixXd scores = pca_compress_rows(pca, data);
  const auto centers = subtractive_cluster(data, cfg.cluster);
  AnfisBank bank;
  bank.n_in = static_cast<std::size_t>(data.cols());
  std::vector<std::size_t> all(bank.n_in);
  for (std::size_t s = 0; s < bank.n_in; ++s) all[s] = s;
  for (Eigen::Index i = 0; i < scores.cols(); ++i) {
    bank.models.push_back(fit_fuzzy(data, scores.col(i), centers, cfg));
    bank.inputs.push_back(all);
  }
  return bank;
}

ImputationModels train_models(const EncodedMatrix& train, const std::vector<Method>& methods, const ModelConfig& cfg) {
  cfg.validate();
  const auto rows = complete_rows(train);
  if (rows.size() < 2)
    throw Error(ErrorCode::EmptyData, fmt::format("{} complete training rows, need at least 2", rows.size()));
  const Eigen::MatrixXd data = select_rows(train, rows).values;

  auto wants = [&](auto pred) { return std::any_of(methods.begin(), methods.end(), pred); };
  ImputationModels models;
  if (wants([](const Method& m) { return m.base == BaseMethod::NnGa; })) models.autoencoder = train_autoencoder(data, cfg);
  if (wants([](const Method& m) { return m.base == BaseMethod::NfGa; }))
    models.fuzzy_bank = train_fuzzy_bank(data, train.schema, cfg);
  if (wants([](const Method& m) { return m.uses_pca(); })) {
    models.pca = pca_fit(data, cfg.pca_components);
    if (wants([](const Method& m) { return m.base == BaseMethod::NnPcaGa; }))
      models.pca_mlp = train_pca_mlp(*models.pca, data, cfg);
    if (wants([](const Method& m) { return m.base == BaseMethod::NfPcaGa; }))
      models.pca_fuzzy = train_pca_fuzzy(*models.pca, data, cfg);
  }
  return models;
}

Eigen::VectorXd HivClassifiers::inputs_of(const Eigen::Ref<const Eigen::VectorXd>& record) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(input_slots.size()));
  for (std::size_t j = 0; j < input_slots.size(); ++j)
    x(static_cast<Eigen::Index>(j)) = record(static_cast<Eigen::Index>(input_slots[j]));
  return x;
}

double HivClassifiers::mlp_probability(const Eigen::Ref<const Eigen::VectorXd>& record) const {
  return forward(mlp, inputs_of(record))(0);
}

double HivClassifiers::fuzzy_probability(const Eigen::Ref<const Eigen::VectorXd>& record) const {
  return anfis_forward(fuzzy, inputs_of(record));
}

HivClassifiers train_hiv_classifiers(const EncodedMatrix& train, const ModelConfig& cfg,
                                     const std::string& target_column) {
  cfg.validate();
  const Schema& schema = train.schema;
  const std::size_t c = schema.index_of(target_column);
  if (!std::holds_alternative<BinaryKind>(schema.column(c).kind))
    throw Error(ErrorCode::BadSchema, fmt::format("classifier target '{}' is not binary", target_column));
  const auto rows = complete_rows(train);
  if (rows.size() < 2)
    throw Error(ErrorCode::EmptyData, fmt::format("{} complete training rows, need at least 2", rows.size()));
  const Eigen::MatrixXd data = select_rows(train, rows).values;

  HivClassifiers out;
  out.target_slot = schema.slots(c).first;
  for (std::size_t s = 0; s < schema.encoded_width(); ++s)
    if (s != out.target_slot) out.input_slots.push_back(s);
  const Eigen::MatrixXd x = gather_columns(data, out.input_slots);
  const Eigen::VectorXd y = data.col(static_cast<Eigen::Index>(out.target_slot));

  out.mlp = fit_mlp(x, y, cfg.hidden, seeded(cfg.mlp, "classifier")).model;
  out.fuzzy = fit_fuzzy(x, y, subtractive_cluster(x, cfg.cluster), cfg);
  return out;
}

}  // namespace imputekit
