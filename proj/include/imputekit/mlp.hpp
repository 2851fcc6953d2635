#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace imputekit {

/// One-hidden-layer perceptron: y = sigmoid(W2 * [tanh(W1 * [x; 1]); 1]).
/// The bias weights are the last column of each matrix.
struct MlpModel {
  std::size_t n_in = 0;
  std::size_t n_hidden = 0;
  std::size_t n_out = 0;
  Eigen::MatrixXd w1;  // n_hidden x (n_in + 1)
  Eigen::MatrixXd w2;  // n_out x (n_hidden + 1)

  std::size_t parameter_count() const noexcept { return n_hidden * (n_in + 1) + n_out * (n_hidden + 1); }
};

struct TrainConfig {
  std::size_t epochs = 250;
  /// Initial step on the per-sample mean gradient; adapted by the line search.
  double learning_rate = 1.0;
  /// Seeds weight initialisation in fit_mlp.
  std::uint64_t seed = 0;
  bool backtracking = true;

  void validate() const;
};

/// Weights ~ N(0, 1/fan_in), deterministic per seed. Throws BadConfig for
/// zero-sized layers.
MlpModel init_mlp(std::size_t n_in, std::size_t n_hidden, std::size_t n_out, std::uint64_t seed);

/// Throws LengthMismatch.
Eigen::VectorXd forward(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
/// Row-wise forward pass: inputs are samples x n_in.
Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs);

/// W1 row-major, then W2 row-major.
Eigen::VectorXd flatten_weights(const MlpModel& model);
void assign_weights(MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& flat);

struct LossGradient {
  double sse = 0.0;
  Eigen::VectorXd gradient;  // flatten_weights order
};

/// Sum of squared errors over all samples and outputs, with its gradient by
/// backpropagation. Throws ShapeMismatch.
LossGradient loss_and_gradient(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                               const Eigen::Ref<const Eigen::MatrixXd>& targets);
double sum_squared_error(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                         const Eigen::Ref<const Eigen::MatrixXd>& targets);

struct TrainResult {
  MlpModel model;
  /// Loss before training followed by the loss after each epoch.
  std::vector<double> loss_history;
};

/// Full-batch gradient descent. With backtracking the step is halved (at
/// most 30 times) until the loss strictly decreases and doubled after each
/// accepted step, so the history never increases; training stops early once
/// no halving helps. Throws NonFiniteLossError.
TrainResult train(MlpModel model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                  const Eigen::Ref<const Eigen::MatrixXd>& targets, const TrainConfig& cfg);

/// init_mlp with cfg.seed, then train.
TrainResult fit_mlp(const Eigen::Ref<const Eigen::MatrixXd>& inputs, const Eigen::Ref<const Eigen::MatrixXd>& targets,
                    std::size_t n_hidden, const TrainConfig& cfg);

}  // namespace imputekit
