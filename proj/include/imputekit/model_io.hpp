#pragma once

#include "imputekit/anfis.hpp"
#include "imputekit/imputer.hpp"
#include "imputekit/mlp.hpp"
#include "imputekit/pca.hpp"
#include "imputekit/training.hpp"

#include <json.hpp>

#include <filesystem>

namespace imputekit {

inline constexpr int kModelFormatVersion = 1;

// Doubles are written with round-trip precision, so load(save(m)) == m.
// The *_from_json functions throw Parse on malformed input.

nlohmann::json to_json(const MlpModel& model);
MlpModel mlp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AnfisModel& model);
AnfisModel anfis_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AnfisBank& bank);
AnfisBank bank_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PcaModel& model);
PcaModel pca_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScaledMlp& model);
ScaledMlp scaled_mlp_from_json(const nlohmann::json& j);

nlohmann::json to_json(const HivClassifiers& classifiers);
HivClassifiers classifiers_from_json(const nlohmann::json& j);

/// {"version": 1, "autoencoder": ..., "pca": ..., ...}; absent models are
/// omitted.
nlohmann::json to_json(const ImputationModels& models);
ImputationModels models_from_json(const nlohmann::json& j);

/// Throws Io.
void save_json(const std::filesystem::path& path, const nlohmann::json& j);
/// Throws Io, Parse.
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace imputekit
