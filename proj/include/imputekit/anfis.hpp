#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace imputekit {

/// Sugeno rule with Gaussian premise memberships and an affine consequent
/// a . x + b.
struct FuzzyRule {
  Eigen::VectorXd centers;
  Eigen::VectorXd sigmas;  // > 0
  Eigen::VectorXd coeffs;  // a
  double offset = 0.0;     // b
};

/// Single-output ANFIS. Multi-output targets use one model per output.
struct AnfisModel {
  std::size_t n_in = 0;
  std::vector<FuzzyRule> rules;

  std::size_t parameter_count() const noexcept { return rules.size() * (3 * n_in + 1); }
};

struct ClusterConfig {
  double radius = 0.3;
  double squash_factor = 1.25;
  double accept_ratio = 0.5;
  double reject_ratio = 0.15;

  /// Throws BadConfig.
  void validate() const;
};

inline constexpr double kMinSigma = 1e-4;

/// Subtractive clustering. Potentials P_i = sum_j exp(-4 |x_i - x_j|^2 / r^2);
/// the highest-potential row becomes a center, its influence (radius
/// r * squash_factor) is subtracted, and selection continues until the
/// accept/reject ratios stop it. Every center is one of the input rows.
/// Throws EmptyData.
std::vector<Eigen::VectorXd> subtractive_cluster(const Eigen::Ref<const Eigen::MatrixXd>& data,
                                                 const ClusterConfig& cfg);

/// One rule per center, sigma_k = radius * range_k / sqrt(8), consequents
/// by least squares on the normalised firing strengths.
AnfisModel build_anfis(const Eigen::Ref<const Eigen::MatrixXd>& inputs, const Eigen::Ref<const Eigen::VectorXd>& outputs,
                       const ClusterConfig& cfg);
AnfisModel build_anfis_from_centers(const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                    const Eigen::Ref<const Eigen::VectorXd>& outputs,
                                    const std::vector<Eigen::VectorXd>& centers, double radius);

/// Least-squares consequents for fixed premises (zero slopes and the mean
/// target when the system has no finite solution).
void fit_consequents(AnfisModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                     const Eigen::Ref<const Eigen::VectorXd>& outputs);

/// Layer-3 output: normalised firing strengths (uniform if all strengths
/// underflow). Throws LengthMismatch.
Eigen::VectorXd normalized_firing(const AnfisModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Five-layer evaluation. Throws LengthMismatch.
double anfis_forward(const AnfisModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd anfis_forward_batch(const AnfisModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs);

/// Per rule: centers, sigmas, coeffs, offset.
Eigen::VectorXd flatten_parameters(const AnfisModel& model);
void assign_parameters(AnfisModel& model, const Eigen::Ref<const Eigen::VectorXd>& flat);

struct AnfisLossGradient {
  double sse = 0.0;
  Eigen::VectorXd gradient;  // flatten_parameters order
};

AnfisLossGradient anfis_loss_and_gradient(const AnfisModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                          const Eigen::Ref<const Eigen::VectorXd>& outputs);
double anfis_sse(const AnfisModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                 const Eigen::Ref<const Eigen::VectorXd>& outputs);

struct AnfisTrainResult {
  AnfisModel model;
  std::vector<double> loss_history;
};

/// Backtracking gradient descent over premise and consequent parameters;
/// sigmas are clamped to >= kMinSigma. Throws BadConfig, NonFiniteLossError.
AnfisTrainResult anfis_train(AnfisModel model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                             const Eigen::Ref<const Eigen::VectorXd>& outputs, std::size_t epochs,
                             double learning_rate);

}  // namespace imputekit
