#pragma once

#include "imputekit/training_error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

namespace imputekit::detail {

struct DescentResult {
  Eigen::VectorXd params;
  std::vector<double> history;
};

inline constexpr int kMaxHalvings = 30;

/// Full-batch gradient descent shared by the MLP and ANFIS trainers.
/// `loss_grad(p)` returns {loss, gradient}; `loss(p)` returns the loss only;
/// `project(p)` restores parameter constraints after a step. Steps move along
/// gradient * grad_scale.
template <class LossGradFn, class LossFn, class ProjectFn>
DescentResult gradient_descent(Eigen::VectorXd params, LossGradFn&& loss_grad, LossFn&& loss, ProjectFn&& project,
                               std::size_t epochs, double learning_rate, double grad_scale, bool backtracking) {
  auto [current, gradient] = loss_grad(params);
  std::vector<double> history{current};
  if (!std::isfinite(current)) throw NonFiniteLossError("initial loss is not finite", history);

  double step = learning_rate;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    if (!backtracking) {
      Eigen::VectorXd next = params - step * grad_scale * gradient;
      project(next);
      auto [l, g] = loss_grad(next);
      history.push_back(l);
      if (!std::isfinite(l)) throw NonFiniteLossError("loss became non-finite", history);
      params = std::move(next);
      current = l;
      gradient = std::move(g);
      continue;
    }
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      Eigen::VectorXd trial = params - step * grad_scale * gradient;
      project(trial);
      const double l = loss(trial);
      if (std::isfinite(l) && l < current) {
        params = std::move(trial);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      history.push_back(current);
      break;
    }
    auto [l, g] = loss_grad(params);
    current = l;
    gradient = std::move(g);
    history.push_back(current);
    step *= 2.0;
  }
  return {std::move(params), std::move(history)};
}

}  // namespace imputekit::detail
