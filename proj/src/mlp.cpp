#include "imputekit/mlp.hpp"

#include "descent.hpp"
#include "imputekit/error.hpp"
#include "imputekit/random.hpp"

#include <fmt/format.h>

#include <cmath>

namespace imputekit {

namespace {

Eigen::MatrixXd with_bias(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  Eigen::MatrixXd out(rows.rows(), rows.cols() + 1);
  out.leftCols(rows.cols()) = rows;
  out.col(rows.cols()).setOnes();
  return out;
}

Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& a) { return 1.0 / (1.0 + (-a).exp()); }

void check_batch(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
  if (static_cast<std::size_t>(inputs.cols()) != model.n_in)
    throw Error(ErrorCode::ShapeMismatch, fmt::format("inputs have {} columns, model expects {}", inputs.cols(), model.n_in));
}

void check_targets(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                   const Eigen::Ref<const Eigen::MatrixXd>& targets) {
  check_batch(model, inputs);
  if (inputs.rows() != targets.rows() || static_cast<std::size_t>(targets.cols()) != model.n_out)
    throw Error(ErrorCode::ShapeMismatch, fmt::format("targets {}x{} do not match {} samples x {} outputs", targets.rows(),
                                                      targets.cols(), inputs.rows(), model.n_out));
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::BadConfig, "epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw Error(ErrorCode::BadConfig, "learning_rate must be positive");
}

MlpModel init_mlp(std::size_t n_in, std::size_t n_hidden, std::size_t n_out, std::uint64_t seed) {
  if (n_in < 1 || n_hidden < 1 || n_out < 1)
    throw Error(ErrorCode::BadConfig, fmt::format("layer sizes must be >= 1 (got {}-{}-{})", n_in, n_hidden, n_out));
  MlpModel m{n_in, n_hidden, n_out, Eigen::MatrixXd(n_hidden, n_in + 1), Eigen::MatrixXd(n_out, n_hidden + 1)};
  Rng rng(seed);
  std::normal_distribution<double> g1(0.0, 1.0 / std::sqrt(static_cast<double>(n_in)));
  std::normal_distribution<double> g2(0.0, 1.0 / std::sqrt(static_cast<double>(n_hidden)));
  for (Eigen::Index r = 0; r < m.w1.rows(); ++r)
    for (Eigen::Index c = 0; c < m.w1.cols(); ++c) m.w1(r, c) = g1(rng);
  for (Eigen::Index r = 0; r < m.w2.rows(); ++r)
    for (Eigen::Index c = 0; c < m.w2.cols(); ++c) m.w2(r, c) = g2(rng);
  return m;
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != model.n_in)
    throw Error(ErrorCode::LengthMismatch, fmt::format("input length {}, model expects {}", x.size(), model.n_in));
  const auto in = static_cast<Eigen::Index>(model.n_in);
  const auto hid = static_cast<Eigen::Index>(model.n_hidden);
  const Eigen::VectorXd hidden = (model.w1.leftCols(in) * x + model.w1.col(in)).array().tanh().matrix();
  const Eigen::ArrayXd act = (model.w2.leftCols(hid) * hidden + model.w2.col(hid)).array();
  return (1.0 / (1.0 + (-act).exp())).matrix();
}

Eigen::MatrixXd forward_batch(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
  check_batch(model, inputs);
  const Eigen::MatrixXd hidden = (with_bias(inputs) * model.w1.transpose()).array().tanh().matrix();
  return sigmoid((with_bias(hidden) * model.w2.transpose()).array()).matrix();
}

Eigen::VectorXd flatten_weights(const MlpModel& model) {
  Eigen::VectorXd flat(static_cast<Eigen::Index>(model.parameter_count()));
  Eigen::Index k = 0;
  for (const auto* w : {&model.w1, &model.w2})
    for (Eigen::Index r = 0; r < w->rows(); ++r)
      for (Eigen::Index c = 0; c < w->cols(); ++c) flat(k++) = (*w)(r, c);
  return flat;
}

void assign_weights(MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& flat) {
  if (static_cast<std::size_t>(flat.size()) != model.parameter_count())
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} weights given, model has {}", flat.size(), model.parameter_count()));
  Eigen::Index k = 0;
  for (auto* w : {&model.w1, &model.w2})
    for (Eigen::Index r = 0; r < w->rows(); ++r)
      for (Eigen::Index c = 0; c < w->cols(); ++c) (*w)(r, c) = flat(k++);
}

double sum_squared_error(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                         const Eigen::Ref<const Eigen::MatrixXd>& targets) {
  check_targets(model, inputs, targets);
  return (forward_batch(model, inputs) - targets).squaredNorm();
}

LossGradient loss_and_gradient(const MlpModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                               const Eigen::Ref<const Eigen::MatrixXd>& targets) {
  check_targets(model, inputs, targets);
  const auto hid = static_cast<Eigen::Index>(model.n_hidden);

  const Eigen::MatrixXd xa = with_bias(inputs);
  const Eigen::MatrixXd hidden = (xa * model.w1.transpose()).array().tanh().matrix();
  const Eigen::MatrixXd ha = with_bias(hidden);
  const Eigen::ArrayXXd y = sigmoid((ha * model.w2.transpose()).array());
  const Eigen::ArrayXXd err = y - targets.array();

  // d sse / d pre-activation, output layer then hidden layer
  const Eigen::MatrixXd delta2 = (2.0 * err * y * (1.0 - y)).matrix();
  const Eigen::MatrixXd delta1 =
      ((delta2 * model.w2.leftCols(hid)).array() * (1.0 - hidden.array().square())).matrix();

  MlpModel grad = model;
  grad.w2 = delta2.transpose() * ha;
  grad.w1 = delta1.transpose() * xa;
  return {err.square().sum(), flatten_weights(grad)};
}

TrainResult train(MlpModel model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                  const Eigen::Ref<const Eigen::MatrixXd>& targets, const TrainConfig& cfg) {
  cfg.validate();
  check_targets(model, inputs, targets);
  const Eigen::MatrixXd x = inputs;
  const Eigen::MatrixXd t = targets;
  MlpModel work = model;

  auto loss_grad = [&](const Eigen::VectorXd& p) {
    assign_weights(work, p);
    auto lg = loss_and_gradient(work, x, t);
    return std::pair{lg.sse, std::move(lg.gradient)};
  };
  auto loss = [&](const Eigen::VectorXd& p) {
    assign_weights(work, p);
    return sum_squared_error(work, x, t);
  };
  auto result = detail::gradient_descent(
      flatten_weights(model), loss_grad, loss, [](Eigen::VectorXd&) {}, cfg.epochs, cfg.learning_rate,
      1.0 / static_cast<double>(std::max<Eigen::Index>(x.rows(), 1)), cfg.backtracking);
  assign_weights(model, result.params);
  return {std::move(model), std::move(result.history)};
}

TrainResult fit_mlp(const Eigen::Ref<const Eigen::MatrixXd>& inputs, const Eigen::Ref<const Eigen::MatrixXd>& targets,
                    std::size_t n_hidden, const TrainConfig& cfg) {
  auto model = init_mlp(static_cast<std::size_t>(inputs.cols()), n_hidden, static_cast<std::size_t>(targets.cols()),
                        cfg.seed);
  return train(std::move(model), inputs, targets, cfg);
}

}  // namespace imputekit
