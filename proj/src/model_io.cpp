#include "imputekit/model_io.hpp"

#include "imputekit/error.hpp"

#include <fmt/format.h>

#include <fstream>

namespace imputekit {

using nlohmann::json;

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.begin(), v.end()); }

json mat_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Eigen::VectorXd row = m.row(r).transpose();
    rows.push_back(vec_json(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Eigen::VectorXd vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd mat_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows) throw Error(ErrorCode::Parse, "matrix row count mismatch");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::VectorXd row = vec_from(data.at(static_cast<std::size_t>(r)));
    if (row.size() != cols) throw Error(ErrorCode::Parse, "matrix column count mismatch");
    m.row(r) = row.transpose();
  }
  return m;
}

template <class F>
auto parse_guard(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("malformed {}: {}", what, e.what()));
  }
}

}  // namespace

json to_json(const MlpModel& model) {
  return {{"type", "mlp"}, {"n_in", model.n_in}, {"n_hidden", model.n_hidden}, {"n_out", model.n_out},
          {"w1", mat_json(model.w1)}, {"w2", mat_json(model.w2)}};
}

MlpModel mlp_from_json(const json& j) {
  return parse_guard("MLP", [&] {
    MlpModel m{j.at("n_in").get<std::size_t>(), j.at("n_hidden").get<std::size_t>(), j.at("n_out").get<std::size_t>(),
               mat_from(j.at("w1")), mat_from(j.at("w2"))};
    if (static_cast<std::size_t>(m.w1.rows()) != m.n_hidden || static_cast<std::size_t>(m.w1.cols()) != m.n_in + 1 ||
        static_cast<std::size_t>(m.w2.rows()) != m.n_out || static_cast<std::size_t>(m.w2.cols()) != m.n_hidden + 1)
      throw Error(ErrorCode::Parse, "MLP weight shapes do not match layer sizes");
    return m;
  });
}

json to_json(const AnfisModel& model) {
  json rules = json::array();
  for (const auto& r : model.rules)
    rules.push_back({{"centers", vec_json(r.centers)}, {"sigmas", vec_json(r.sigmas)}, {"coeffs", vec_json(r.coeffs)},
                     {"offset", r.offset}});
  return {{"type", "anfis"}, {"n_in", model.n_in}, {"rules", rules}};
}

AnfisModel anfis_from_json(const json& j) {
  return parse_guard("ANFIS", [&] {
    AnfisModel m;
    m.n_in = j.at("n_in").get<std::size_t>();
    for (const auto& r : j.at("rules")) {
      FuzzyRule rule{vec_from(r.at("centers")), vec_from(r.at("sigmas")), vec_from(r.at("coeffs")),
                     r.at("offset").get<double>()};
      const auto n = static_cast<Eigen::Index>(m.n_in);
      if (rule.centers.size() != n || rule.sigmas.size() != n || rule.coeffs.size() != n)
        throw Error(ErrorCode::Parse, "ANFIS rule width does not match n_in");
      m.rules.push_back(std::move(rule));
    }
    return m;
  });
}

json to_json(const AnfisBank& bank) {
  json models = json::array();
  for (const auto& m : bank.models) models.push_back(to_json(m));
  return {{"type", "anfis_bank"}, {"n_in", bank.n_in}, {"inputs", bank.inputs}, {"models", models}};
}

AnfisBank bank_from_json(const json& j) {
  return parse_guard("fuzzy bank", [&] {
    AnfisBank b;
    b.n_in = j.at("n_in").get<std::size_t>();
    b.inputs = j.at("inputs").get<std::vector<std::vector<std::size_t>>>();
    for (const auto& m : j.at("models")) b.models.push_back(anfis_from_json(m));
    if (b.inputs.size() != b.models.size()) throw Error(ErrorCode::Parse, "fuzzy bank inputs/models mismatch");
    return b;
  });
}

json to_json(const PcaModel& model) {
  return {{"type", "pca"}, {"original_mean", vec_json(model.original_mean)},
          {"feature_vector", mat_json(model.feature_vector)}, {"eigenvalues", vec_json(model.eigenvalues)}};
}

PcaModel pca_from_json(const json& j) {
  return parse_guard("PCA", [&] {
    PcaModel m{vec_from(j.at("original_mean")), mat_from(j.at("feature_vector")), vec_from(j.at("eigenvalues"))};
    if (m.feature_vector.cols() != m.original_mean.size() || m.eigenvalues.size() != m.original_mean.size())
      throw Error(ErrorCode::Parse, "PCA shapes are inconsistent");
    return m;
  });
}

json to_json(const ScaledMlp& model) {
  return {{"type", "scaled_mlp"}, {"net", to_json(model.net)}, {"offset", vec_json(model.offset)},
          {"scale", vec_json(model.scale)}};
}

ScaledMlp scaled_mlp_from_json(const json& j) {
  return parse_guard("scaled MLP", [&] {
    return ScaledMlp{mlp_from_json(j.at("net")), vec_from(j.at("offset")), vec_from(j.at("scale"))};
  });
}

json to_json(const HivClassifiers& c) {
  return {{"type", "classifiers"}, {"input_slots", c.input_slots}, {"target_slot", c.target_slot},
          {"mlp", to_json(c.mlp)}, {"anfis", to_json(c.fuzzy)}};
}

HivClassifiers classifiers_from_json(const json& j) {
  return parse_guard("classifiers", [&] {
    return HivClassifiers{j.at("input_slots").get<std::vector<std::size_t>>(), j.at("target_slot").get<std::size_t>(),
                          mlp_from_json(j.at("mlp")), anfis_from_json(j.at("anfis"))};
  });
}

json to_json(const ImputationModels& models) {
  json j = {{"version", kModelFormatVersion}};
  if (models.autoencoder) j["autoencoder"] = to_json(*models.autoencoder);
  if (models.fuzzy_bank) j["fuzzy_bank"] = to_json(*models.fuzzy_bank);
  if (models.pca) j["pca"] = to_json(*models.pca);
  if (models.pca_mlp) j["pca_mlp"] = to_json(*models.pca_mlp);
  if (models.pca_fuzzy) j["pca_fuzzy"] = to_json(*models.pca_fuzzy);
  return j;
}

ImputationModels models_from_json(const json& j) {
  return parse_guard("model file", [&] {
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw Error(ErrorCode::Parse, fmt::format("model format version {} (expected {})", version, kModelFormatVersion));
    ImputationModels m;
    if (j.contains("autoencoder")) m.autoencoder = mlp_from_json(j["autoencoder"]);
    if (j.contains("fuzzy_bank")) m.fuzzy_bank = bank_from_json(j["fuzzy_bank"]);
    if (j.contains("pca")) m.pca = pca_from_json(j["pca"]);
    if (j.contains("pca_mlp")) m.pca_mlp = scaled_mlp_from_json(j["pca_mlp"]);
    if (j.contains("pca_fuzzy")) m.pca_fuzzy = bank_from_json(j["pca_fuzzy"]);
    return m;
  });
}

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, fmt::format("write failed for '{}'", path.string()));
}

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot read '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, fmt::format("'{}': {}", path.string(), e.what()));
  }
}

}  // namespace imputekit
