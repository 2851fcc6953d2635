#pragma once

#include "imputekit/anfis.hpp"
#include "imputekit/data_model.hpp"
#include "imputekit/imputer.hpp"
#include "imputekit/mlp.hpp"
#include "imputekit/pca.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace imputekit {

struct ModelConfig {
  std::size_t hidden = 11;
  TrainConfig mlp;
  ClusterConfig cluster;
  std::size_t anfis_epochs = 30;
  double anfis_learning_rate = 0.1;
  std::size_t pca_components = 11;

  /// Throws BadConfig.
  void validate() const;
};

/// d-hidden-d MLP trained to reproduce its input.
MlpModel train_autoencoder(const Eigen::Ref<const Eigen::MatrixXd>& data, const ModelConfig& cfg);

/// One ANFIS per encoded slot. The model for a slot reads every slot that
/// belongs to a different raw column; rules are clustered once per raw column.
AnfisBank train_fuzzy_bank(const Eigen::Ref<const Eigen::MatrixXd>& data, const Schema& schema,
                           const ModelConfig& cfg);

/// Regressors from the full record onto its PCA scores.
ScaledMlp train_pca_mlp(const PcaModel& pca, const Eigen::Ref<const Eigen::MatrixXd>& data, const ModelConfig& cfg);
AnfisBank train_pca_fuzzy(const PcaModel& pca, const Eigen::Ref<const Eigen::MatrixXd>& data, const ModelConfig& cfg);

/// Fits what `methods` need on the complete rows of `train`.
/// Throws EmptyData when fewer than two complete rows remain.
ImputationModels train_models(const EncodedMatrix& train, const std::vector<Method>& methods, const ModelConfig& cfg);

/// Predicts a binary column from the remaining slots.
struct HivClassifiers {
  std::vector<std::size_t> input_slots;
  std::size_t target_slot = 0;
  MlpModel mlp;
  AnfisModel fuzzy;

  Eigen::VectorXd inputs_of(const Eigen::Ref<const Eigen::VectorXd>& record) const;
  double mlp_probability(const Eigen::Ref<const Eigen::VectorXd>& record) const;
  double fuzzy_probability(const Eigen::Ref<const Eigen::VectorXd>& record) const;
};

/// Throws UnknownColumn, BadSchema (target not binary), EmptyData.
HivClassifiers train_hiv_classifiers(const EncodedMatrix& train, const ModelConfig& cfg,
                                     const std::string& target_column = "hiv");

}  // namespace imputekit
