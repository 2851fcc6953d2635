#include "imputekit/data_model.hpp"
#include "imputekit/error.hpp"
#include "imputekit/mlp.hpp"
#include "imputekit/training_error.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace imputekit;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

double fd_max_relative_error(const MlpModel& model, const Eigen::MatrixXd& x, const Eigen::MatrixXd& t) {
  const auto lg = loss_and_gradient(model, x, t);
  const Eigen::VectorXd w = flatten_weights(model);
  const double h = 1e-5;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    MlpModel p = model, q = model;
    Eigen::VectorXd wp = w, wq = w;
    wp(i) += h;
    wq(i) -= h;
    assign_weights(p, wp);
    assign_weights(q, wq);
    const double fd = (sum_squared_error(p, x, t) - sum_squared_error(q, x, t)) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(lg.gradient(i)), 1e-6});
    worst = std::max(worst, std::abs(fd - lg.gradient(i)) / denom);
  }
  return worst;
}

}  // namespace

TEST(Mlp, InitShapes) {
  const MlpModel m = init_mlp(13, 11, 13, 7);
  EXPECT_EQ(m.w1.rows(), 11);
  EXPECT_EQ(m.w1.cols(), 14);
  EXPECT_EQ(m.w2.rows(), 13);
  EXPECT_EQ(m.w2.cols(), 12);
  const MlpModel s = init_mlp(2, 1, 1, 3);
  EXPECT_EQ(s.w1.rows() * s.w1.cols(), 3);
  EXPECT_EQ(s.w2.rows() * s.w2.cols(), 2);
  EXPECT_EQ(flatten_weights(m).size(), static_cast<Eigen::Index>(m.parameter_count()));
}

TEST(Mlp, InitDeterministicAndScaled) {
  const MlpModel a = init_mlp(13, 11, 13, 7), b = init_mlp(13, 11, 13, 7), c = init_mlp(13, 11, 13, 8);
  EXPECT_EQ(a.w1, b.w1);
  EXPECT_EQ(a.w2, b.w2);
  EXPECT_NE(a.w1, c.w1);
  const MlpModel big = init_mlp(400, 300, 1, 1);
  const double var = big.w1.leftCols(400).array().square().mean();
  EXPECT_NEAR(var, 1.0 / 401.0, 0.2 / 401.0);
}

TEST(Mlp, InitRejectsEmptyLayers) {
  try {
    init_mlp(0, 1, 1, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadConfig);
  }
}

TEST(Mlp, ZeroNetworkOutputsHalf) {
  MlpModel m = init_mlp(3, 2, 4, 1);
  m.w1.setZero();
  m.w2.setZero();
  const Eigen::VectorXd y = forward(m, Eigen::Vector3d(0.3, 0.9, 0.1));
  for (double v : y) EXPECT_EQ(v, 0.5);
}

TEST(Mlp, OneOneOneHandEvaluation) {
  MlpModel m = init_mlp(1, 1, 1, 1);
  m.w1 << 1, 0;
  m.w2 << 1, 0;
  EXPECT_EQ(forward(m, Eigen::VectorXd::Zero(1))(0), 0.5);
}

TEST(Mlp, MatchesLoopOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MlpModel m = init_mlp(2, 2, 1, seed);
    const Eigen::MatrixXd x = random_matrix(1, 2, seed + 100);
    const Eigen::VectorXd y = forward(m, x.row(0).transpose());
    const auto oracle = oracle::mlp_forward(m, {x(0, 0), x(0, 1)});
    EXPECT_NEAR(y(0), oracle[0], 1e-12);
  }
}

TEST(Mlp, ForwardLengthMismatch) {
  const MlpModel m = init_mlp(3, 2, 1, 1);
  try {
    forward(m, Eigen::VectorXd::Zero(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(Mlp, BatchForwardMatchesRows) {
  const MlpModel m = init_mlp(4, 3, 2, 5);
  const Eigen::MatrixXd x = random_matrix(6, 4, 9);
  const Eigen::MatrixXd y = forward_batch(m, x);
  for (Eigen::Index r = 0; r < 6; ++r) EXPECT_TRUE(y.row(r).transpose().isApprox(forward(m, x.row(r).transpose()), 1e-14));
}

TEST(Mlp, PerfectFitHasZeroLossAndGradient) {
  const MlpModel m = init_mlp(3, 2, 3, 2);
  const Eigen::MatrixXd x = random_matrix(5, 3, 4);
  const auto lg = loss_and_gradient(m, x, forward_batch(m, x));
  EXPECT_EQ(lg.sse, 0.0);
  EXPECT_EQ(lg.gradient.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t ni = 1 + seed % 3, nh = 1 + (seed / 3) % 3, no = 1 + (seed / 9) % 3;
    const MlpModel m = init_mlp(ni, nh, no, seed);
    const Eigen::MatrixXd x = random_matrix(1 + static_cast<Eigen::Index>(seed % 4), static_cast<Eigen::Index>(ni), seed + 50);
    const Eigen::MatrixXd t = random_matrix(x.rows(), static_cast<Eigen::Index>(no), seed + 90);
    EXPECT_LT(fd_max_relative_error(m, x, t), 1e-5) << "seed " << seed;
  }
}

TEST(Mlp, DuplicatedBatchDoublesLossAndGradient) {
  const MlpModel m = init_mlp(3, 3, 2, 11);
  const Eigen::MatrixXd x = random_matrix(4, 3, 1), t = random_matrix(4, 2, 2);
  Eigen::MatrixXd x2(8, 3), t2(8, 2);
  x2 << x, x;
  t2 << t, t;
  const auto a = loss_and_gradient(m, x, t), b = loss_and_gradient(m, x2, t2);
  EXPECT_NEAR(b.sse, 2 * a.sse, 1e-12);
  EXPECT_TRUE(b.gradient.isApprox(2 * a.gradient, 1e-12));
}

TEST(Mlp, ShapeMismatch) {
  const MlpModel m = init_mlp(3, 2, 2, 1);
  try {
    loss_and_gradient(m, random_matrix(4, 3, 1), random_matrix(3, 2, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Mlp, TrainConfigValidation) {
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.epochs = 1;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Mlp, SingleEpochHistory) {
  TrainConfig cfg;
  cfg.epochs = 1;
  const Eigen::MatrixXd x = random_matrix(10, 3, 3);
  const auto r = train(init_mlp(3, 2, 3, 1), x, x, cfg);
  ASSERT_EQ(r.loss_history.size(), 2u);
  EXPECT_LE(r.loss_history[1], r.loss_history[0]);
}

TEST(Mlp, AutoAssociativeTrainingHalvesLoss) {
  const EncodedMatrix m = encode(synthesize(default_schema(), 200, 13, default_synthesis_spec()));
  TrainConfig cfg;
  cfg.seed = 3;
  const auto r = fit_mlp(m.values, m.values, 11, cfg);
  EXPECT_LT(r.loss_history.back(), 0.5 * r.loss_history.front());
  for (std::size_t i = 1; i < r.loss_history.size(); ++i) EXPECT_LE(r.loss_history[i], r.loss_history[i - 1]);
}

TEST(Mlp, IdenticalRowsAreLearned) {
  Eigen::MatrixXd x(30, 4);
  x.rowwise() = Eigen::RowVector4d(0.2, 0.8, 0.5, 0.35);
  TrainConfig cfg;
  cfg.epochs = 300;
  const auto r = fit_mlp(x, x, 3, cfg);
  EXPECT_LT(r.loss_history.back(), 1e-3);
  EXPECT_TRUE(forward(r.model, x.row(0).transpose()).isApprox(x.row(0).transpose(), 0.05));
}

TEST(Mlp, MonotoneHistoryWithBacktracking) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.learning_rate = 50.0;  // deliberately too large
    cfg.seed = seed;
    const Eigen::MatrixXd x = random_matrix(25, 3, seed), t = random_matrix(25, 2, seed + 7);
    const auto r = fit_mlp(x, t, 3, cfg);
    for (std::size_t i = 1; i < r.loss_history.size(); ++i) EXPECT_LE(r.loss_history[i], r.loss_history[i - 1]);
  }
}

TEST(Mlp, NonFiniteInputAborts) {
  Eigen::MatrixXd x = random_matrix(3, 2, 1);
  x(1, 1) = std::nan("");
  try {
    train(init_mlp(2, 2, 2, 1), x, x, TrainConfig{});
    FAIL();
  } catch (const NonFiniteLossError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteLoss);
    ASSERT_EQ(e.history().size(), 1u);
    EXPECT_FALSE(std::isfinite(e.history().back()));
  }
}
