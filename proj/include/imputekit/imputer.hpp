#pragma once

#include "imputekit/anfis.hpp"
#include "imputekit/data_model.hpp"
#include "imputekit/ga.hpp"
#include "imputekit/hotdeck.hpp"
#include "imputekit/mlp.hpp"
#include "imputekit/pca.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imputekit {

enum class BaseMethod { NnGa, NfGa, NnPcaGa, NfPcaGa };

struct Method {
  BaseMethod base = BaseMethod::NnGa;
  bool hot_deck = false;

  bool uses_pca() const noexcept { return base == BaseMethod::NnPcaGa || base == BaseMethod::NfPcaGa; }
  bool uses_fuzzy() const noexcept { return base == BaseMethod::NfGa || base == BaseMethod::NfPcaGa; }

  /// "nn-ga", "nf-pca-ga", ...; hybrids append "+hd".
  std::string name() const;
  /// Accepts the names produced by name(). Throws BadConfig.
  static Method parse(std::string_view text);

  bool operator==(const Method&) const = default;
};

std::string_view base_name(BaseMethod base) noexcept;
std::vector<Method> all_methods();

/// Bank of single-output ANFIS models. Model i reads the slots in inputs[i]
/// and predicts output dimension i.
struct AnfisBank {
  std::vector<AnfisModel> models;
  std::vector<std::vector<std::size_t>> inputs;
  std::size_t n_in = 0;

  std::size_t n_out() const noexcept { return models.size(); }
  /// Throws LengthMismatch.
  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// MLP whose sigmoid outputs are mapped affinely onto an unbounded target
/// range: y = offset + scale .* net(x).
struct ScaledMlp {
  MlpModel net;
  Eigen::VectorXd offset;
  Eigen::VectorXd scale;

  Eigen::VectorXd predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct ImputationModels {
  std::optional<MlpModel> autoencoder;
  std::optional<AnfisBank> fuzzy_bank;
  std::optional<PcaModel> pca;
  std::optional<ScaledMlp> pca_mlp;
  std::optional<AnfisBank> pca_fuzzy;

  /// Throws MissingModel when `method` needs a model that is absent.
  void require(const Method& method) const;
};

/// ||x - f(x)||^2 for an auto-associative network. Throws LengthMismatch.
double eq1_error(const MlpModel& net, const Eigen::Ref<const Eigen::VectorXd>& x);
double eq1_error(const AnfisBank& bank, const Eigen::Ref<const Eigen::VectorXd>& x);

/// ||compress(x) - g(x)||^2 where g regresses the PCA scores.
/// Throws WidthMismatch, LengthMismatch.
double eq4_error(const PcaModel& pca, const MlpModel& net, const Eigen::Ref<const Eigen::VectorXd>& x);
double eq4_error(const PcaModel& pca, const ScaledMlp& net, const Eigen::Ref<const Eigen::VectorXd>& x);
double eq4_error(const PcaModel& pca, const AnfisBank& bank, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Error of `method` on a complete encoded record.
double method_error(const Method& method, const ImputationModels& models, const Eigen::Ref<const Eigen::VectorXd>& x);

struct ImputeOptions {
  GaConfig ga;
  HotDeckConfig hot_deck;
  std::uint64_t seed = 0;
};

struct RecordImputation {
  Eigen::VectorXd completed;
  std::vector<std::size_t> gene_slots;  // masked slots, ascending
  SearchBounds bounds;
  Eigen::VectorXd genes;        // GA best, before one-hot post-processing
  double ga_fitness = 0.0;      // -error at `genes`
  double fitness = 0.0;         // -error of `completed`
  std::size_t evaluations = 0;
  std::optional<HotDeckResult> hot_deck;
};

/// Imputes the masked slots of one encoded record. Fully masked one-hot groups
/// are snapped to the argmax label afterwards. `pool` is required for hot-deck
/// methods. Throws NothingMissing, FullyMissing, MissingModel, PoolTooSmall.
RecordImputation impute_record(const Eigen::Ref<const Eigen::VectorXd>& values, const BoolVector& observed,
                               const Schema& schema, const Method& method, const ImputationModels& models,
                               const ImputeOptions& options, const EncodedMatrix* pool = nullptr);

struct RowDiagnostics {
  std::size_t row = 0;
  std::vector<std::string> masked_columns;
  double ga_fitness = 0.0;
  double fitness = 0.0;
  double wall_time_ms = 0.0;
  std::string error;  // empty on success
};

struct ImputationResult {
  EncodedMatrix completed;  // mask true except on rows whose imputation failed
  std::vector<RowDiagnostics> rows;
  Method method;
  double wall_time_ms = 0.0;

  std::size_t failures() const;
};

/// Runs impute_record on every row with a hole. Row r uses GA seed
/// derive_seed(options.seed, r). A failed row keeps its holes and reports
/// the error; the other rows are unaffected.
ImputationResult impute_table(const EncodedMatrix& table, const Method& method, const ImputationModels& models,
                              const ImputeOptions& options, const EncodedMatrix* pool = nullptr);

/// row,method,masked_columns,ga_fitness,fitness,wall_time_ms,error
void write_diagnostics_csv(std::ostream& out, const ImputationResult& result);

}  // namespace imputekit
