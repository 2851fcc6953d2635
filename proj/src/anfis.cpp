#include "imputekit/anfis.hpp"

#include "descent.hpp"
#include "imputekit/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace imputekit {

namespace {

/// Rule parameters stacked as matrices, one row per rule.
struct RuleMatrices {
  Eigen::MatrixXd centers;
  Eigen::MatrixXd sigmas;
  Eigen::MatrixXd coeffs;
  Eigen::VectorXd offsets;

  explicit RuleMatrices(const AnfisModel& m) {
    const auto r = static_cast<Eigen::Index>(m.rules.size());
    const auto n = static_cast<Eigen::Index>(m.n_in);
    centers.resize(r, n);
    sigmas.resize(r, n);
    coeffs.resize(r, n);
    offsets.resize(r);
    for (Eigen::Index i = 0; i < r; ++i) {
      const auto& rule = m.rules[static_cast<std::size_t>(i)];
      centers.row(i) = rule.centers.transpose();
      sigmas.row(i) = rule.sigmas.transpose();
      coeffs.row(i) = rule.coeffs.transpose();
      offsets(i) = rule.offset;
    }
  }
};

/// Layers 1-3 for one sample: raw strengths w and their sum.
struct Firing {
  Eigen::ArrayXXd diff;  // x - c, rules x inputs
  Eigen::ArrayXd strength;
  double total = 0.0;
};

Firing fire(const RuleMatrices& rm, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Firing f;
  f.diff = (-rm.centers).rowwise() + x.transpose();
  const Eigen::ArrayXd exponent = (f.diff.square() / (2.0 * rm.sigmas.array().square())).rowwise().sum();
  f.strength = (-exponent).exp();
  f.total = f.strength.sum();
  return f;
}

Eigen::ArrayXd normalize(const Firing& f) {
  const auto r = f.strength.size();
  if (f.total > 0.0) return f.strength / f.total;
  return Eigen::ArrayXd::Constant(r, 1.0 / static_cast<double>(r));
}

void check_model(const AnfisModel& model) {
  if (model.rules.empty()) throw Error(ErrorCode::EmptyData, "ANFIS model has no rules");
}

void check_input(const AnfisModel& model, Eigen::Index length) {
  if (static_cast<std::size_t>(length) != model.n_in)
    throw Error(ErrorCode::LengthMismatch, fmt::format("input length {}, model expects {}", length, model.n_in));
}

void check_data(const AnfisModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                const Eigen::Ref<const Eigen::VectorXd>& outputs) {
  check_model(model);
  check_input(model, inputs.cols());
  if (inputs.rows() != outputs.size())
    throw Error(ErrorCode::ShapeMismatch, fmt::format("{} input rows, {} outputs", inputs.rows(), outputs.size()));
}

}  // namespace

void ClusterConfig::validate() const {
  if (!(radius > 0.0 && radius <= 1.0)) throw Error(ErrorCode::BadConfig, "cluster radius must be in (0,1]");
  if (!(squash_factor > 0.0)) throw Error(ErrorCode::BadConfig, "squash factor must be positive");
  if (!(reject_ratio > 0.0 && reject_ratio < accept_ratio && accept_ratio <= 1.0))
    throw Error(ErrorCode::BadConfig, "need 0 < reject_ratio < accept_ratio <= 1");
}

std::vector<Eigen::VectorXd> subtractive_cluster(const Eigen::Ref<const Eigen::MatrixXd>& data,
                                                 const ClusterConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = data.rows();
  if (n == 0) throw Error(ErrorCode::EmptyData, "subtractive clustering needs at least one row");

  const double alpha = 4.0 / (cfg.radius * cfg.radius);
  const double rb = cfg.radius * cfg.squash_factor;
  const double beta = 4.0 / (rb * rb);

  Eigen::VectorXd potential(n);
  for (Eigen::Index i = 0; i < n; ++i)
    potential(i) = (-alpha * (data.rowwise() - data.row(i)).rowwise().squaredNorm().array()).exp().sum();

  std::vector<Eigen::VectorXd> centers;
  double reference = 0.0;
  while (static_cast<Eigen::Index>(centers.size()) < n) {
    Eigen::Index best = 0;
    const double peak = potential.maxCoeff(&best);
    if (!(peak > 0.0)) break;
    if (centers.empty()) {
      reference = peak;
    } else if (peak <= cfg.accept_ratio * reference) {
      if (peak < cfg.reject_ratio * reference) break;
      double min_dist = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) min_dist = std::min(min_dist, (data.row(best).transpose() - c).norm());
      if (min_dist / cfg.radius + peak / reference < 1.0) {
        // grey zone and too close to an existing center: drop the candidate
        potential(best) = 0.0;
        continue;
      }
    }
    const Eigen::VectorXd center = data.row(best).transpose();
    centers.push_back(center);
    potential -= (peak * (-beta * (data.rowwise() - center.transpose()).rowwise().squaredNorm().array()).exp()).matrix();
    potential(best) = 0.0;
  }
  return centers;
}

AnfisModel build_anfis(const Eigen::Ref<const Eigen::MatrixXd>& inputs, const Eigen::Ref<const Eigen::VectorXd>& outputs,
                       const ClusterConfig& cfg) {
  if (inputs.rows() == 0) throw Error(ErrorCode::EmptyData, "build_anfis needs at least one row");
  return build_anfis_from_centers(inputs, outputs, subtractive_cluster(inputs, cfg), cfg.radius);
}

AnfisModel build_anfis_from_centers(const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                    const Eigen::Ref<const Eigen::VectorXd>& outputs,
                                    const std::vector<Eigen::VectorXd>& centers, double radius) {
  if (inputs.rows() == 0 || centers.empty()) throw Error(ErrorCode::EmptyData, "build_anfis needs rows and centers");
  if (inputs.rows() != outputs.size())
    throw Error(ErrorCode::ShapeMismatch, fmt::format("{} input rows, {} outputs", inputs.rows(), outputs.size()));
  const auto n = static_cast<std::size_t>(inputs.cols());
  Eigen::VectorXd range = inputs.colwise().maxCoeff() - inputs.colwise().minCoeff();
  for (auto& r : range) r = r > 0.0 ? r : 1.0;
  const Eigen::VectorXd sigma = (radius * range / std::sqrt(8.0)).cwiseMax(kMinSigma);

  AnfisModel model{n, {}};
  for (const auto& c : centers) {
    if (static_cast<std::size_t>(c.size()) != n)
      throw Error(ErrorCode::LengthMismatch, fmt::format("center length {}, inputs have {}", c.size(), n));
    model.rules.push_back({c, sigma, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)), 0.0});
  }
  fit_consequents(model, inputs, outputs);
  return model;
}

void fit_consequents(AnfisModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                     const Eigen::Ref<const Eigen::VectorXd>& outputs) {
  check_data(model, inputs, outputs);
  const double mean = outputs.mean();
  auto fallback = [&] {
    for (auto& rule : model.rules) {
      rule.coeffs.setZero();
      rule.offset = mean;
    }
  };
  if ((outputs.array() == outputs(0)).all()) {
    fallback();
    return;
  }

  const RuleMatrices rm(model);
  const auto rules = static_cast<Eigen::Index>(model.rules.size());
  const auto n = static_cast<Eigen::Index>(model.n_in);
  const Eigen::Index block = n + 1;
  Eigen::MatrixXd design(inputs.rows(), rules * block);
  for (Eigen::Index s = 0; s < inputs.rows(); ++s) {
    const Eigen::ArrayXd wn = normalize(fire(rm, inputs.row(s).transpose()));
    for (Eigen::Index i = 0; i < rules; ++i) {
      design.block(s, i * block, 1, n) = wn(i) * inputs.row(s);
      design(s, i * block + n) = wn(i);
    }
  }
  const Eigen::VectorXd theta = design.completeOrthogonalDecomposition().solve(outputs);
  if (!theta.allFinite()) {
    fallback();
    return;
  }
  for (Eigen::Index i = 0; i < rules; ++i) {
    auto& rule = model.rules[static_cast<std::size_t>(i)];
    rule.coeffs = theta.segment(i * block, n);
    rule.offset = theta(i * block + n);
  }
}

Eigen::VectorXd normalized_firing(const AnfisModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_model(model);
  check_input(model, x.size());
  return normalize(fire(RuleMatrices(model), x)).matrix();
}

double anfis_forward(const AnfisModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_model(model);
  check_input(model, x.size());
  const RuleMatrices rm(model);
  const Eigen::VectorXd consequents = rm.coeffs * x + rm.offsets;
  return normalize(fire(rm, x)).matrix().dot(consequents);
}

Eigen::VectorXd anfis_forward_batch(const AnfisModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
  check_model(model);
  check_input(model, inputs.cols());
  const RuleMatrices rm(model);
  Eigen::VectorXd out(inputs.rows());
  for (Eigen::Index s = 0; s < inputs.rows(); ++s) {
    const Eigen::VectorXd x = inputs.row(s).transpose();
    out(s) = normalize(fire(rm, x)).matrix().dot(rm.coeffs * x + rm.offsets);
  }
  return out;
}

Eigen::VectorXd flatten_parameters(const AnfisModel& model) {
  const auto n = static_cast<Eigen::Index>(model.n_in);
  Eigen::VectorXd flat(static_cast<Eigen::Index>(model.parameter_count()));
  Eigen::Index k = 0;
  for (const auto& rule : model.rules) {
    flat.segment(k, n) = rule.centers;
    flat.segment(k + n, n) = rule.sigmas;
    flat.segment(k + 2 * n, n) = rule.coeffs;
    flat(k + 3 * n) = rule.offset;
    k += 3 * n + 1;
  }
  return flat;
}

void assign_parameters(AnfisModel& model, const Eigen::Ref<const Eigen::VectorXd>& flat) {
  if (static_cast<std::size_t>(flat.size()) != model.parameter_count())
    throw Error(ErrorCode::LengthMismatch,
                fmt::format("{} parameters given, model has {}", flat.size(), model.parameter_count()));
  const auto n = static_cast<Eigen::Index>(model.n_in);
  Eigen::Index k = 0;
  for (auto& rule : model.rules) {
    rule.centers = flat.segment(k, n);
    rule.sigmas = flat.segment(k + n, n);
    rule.coeffs = flat.segment(k + 2 * n, n);
    rule.offset = flat(k + 3 * n);
    k += 3 * n + 1;
  }
}

double anfis_sse(const AnfisModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                 const Eigen::Ref<const Eigen::VectorXd>& outputs) {
  check_data(model, inputs, outputs);
  return (anfis_forward_batch(model, inputs) - outputs).squaredNorm();
}

AnfisLossGradient anfis_loss_and_gradient(const AnfisModel& model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                          const Eigen::Ref<const Eigen::VectorXd>& outputs) {
  check_data(model, inputs, outputs);
  const RuleMatrices rm(model);
  const auto rules = static_cast<Eigen::Index>(model.rules.size());
  const auto n = static_cast<Eigen::Index>(model.n_in);

  Eigen::ArrayXXd g_centers = Eigen::ArrayXXd::Zero(rules, n);
  Eigen::ArrayXXd g_sigmas = Eigen::ArrayXXd::Zero(rules, n);
  Eigen::MatrixXd g_coeffs = Eigen::MatrixXd::Zero(rules, n);
  Eigen::VectorXd g_offsets = Eigen::VectorXd::Zero(rules);
  const Eigen::ArrayXXd sigma2 = rm.sigmas.array().square();
  const Eigen::ArrayXXd sigma3 = sigma2 * rm.sigmas.array();

  double sse = 0.0;
  for (Eigen::Index s = 0; s < inputs.rows(); ++s) {
    const Eigen::VectorXd x = inputs.row(s).transpose();
    const Firing f = fire(rm, x);
    const Eigen::ArrayXd wn = normalize(f);
    const Eigen::ArrayXd consequent = (rm.coeffs * x + rm.offsets).array();
    const double y = (wn * consequent).sum();
    const double dy = 2.0 * (y - outputs(s));
    sse += (y - outputs(s)) * (y - outputs(s));

    g_coeffs.noalias() += (dy * wn).matrix() * x.transpose();
    g_offsets += (dy * wn).matrix();
    if (f.total > 0.0) {
      // dy/dw_i = (f_i - y) / sum(w); dw_i/dc_ik = w_i (x_k - c_ik) / s_ik^2
      const Eigen::ArrayXd scale = dy * wn * (consequent - y);
      g_centers += (f.diff / sigma2).colwise() * scale;
      g_sigmas += (f.diff.square() / sigma3).colwise() * scale;
    }
  }

  AnfisModel grad = model;
  for (Eigen::Index i = 0; i < rules; ++i) {
    auto& rule = grad.rules[static_cast<std::size_t>(i)];
    rule.centers = g_centers.row(i).transpose().matrix();
    rule.sigmas = g_sigmas.row(i).transpose().matrix();
    rule.coeffs = g_coeffs.row(i).transpose();
    rule.offset = g_offsets(i);
  }
  return {sse, flatten_parameters(grad)};
}

AnfisTrainResult anfis_train(AnfisModel model, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                             const Eigen::Ref<const Eigen::VectorXd>& outputs, std::size_t epochs,
                             double learning_rate) {
  if (epochs < 1) throw Error(ErrorCode::BadConfig, "ANFIS epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::BadConfig, "ANFIS learning rate must be positive");
  check_data(model, inputs, outputs);
  const Eigen::MatrixXd x = inputs;
  const Eigen::VectorXd y = outputs;
  const auto n = static_cast<Eigen::Index>(model.n_in);
  AnfisModel work = model;

  auto loss_grad = [&](const Eigen::VectorXd& p) {
    assign_parameters(work, p);
    auto lg = anfis_loss_and_gradient(work, x, y);
    return std::pair{lg.sse, std::move(lg.gradient)};
  };
  auto loss = [&](const Eigen::VectorXd& p) {
    assign_parameters(work, p);
    return anfis_sse(work, x, y);
  };
  auto clamp_sigmas = [&](Eigen::VectorXd& p) {
    for (Eigen::Index k = 0; k < p.size(); k += 3 * n + 1) p.segment(k + n, n) = p.segment(k + n, n).cwiseMax(kMinSigma);
  };
  auto result = detail::gradient_descent(flatten_parameters(model), loss_grad, loss, clamp_sigmas, epochs,
                                         learning_rate, 1.0 / static_cast<double>(std::max<Eigen::Index>(x.rows(), 1)),
                                         true);
  assign_parameters(model, result.params);
  return {std::move(model), std::move(result.history)};
}

}  // namespace imputekit
