#include "imputekit/error.hpp"
#include "imputekit/hotdeck.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace imputekit;

namespace {

BoolVector observed_of(std::initializer_list<bool> v) {
  BoolVector b(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (bool x : v) b(i++) = x;
  return b;
}

std::vector<bool> flags(const BoolVector& b) { return {b.begin(), b.end()}; }

}  // namespace

TEST(HotDeck, ExactMatchesAtInitialThreshold) {
  Eigen::MatrixXd pool(9, 3);
  for (int r = 0; r < 9; ++r) pool.row(r) << (r < 6 ? 0.4 : 0.9), (r < 6 ? 0.6 : 0.1), 0.1 * r;
  const Eigen::Vector3d record(0.4, 0.6, 0.5);
  const auto res = find_similar(record, observed_of({true, true, false}), pool, BoolMatrix::Constant(9, 3, true));
  EXPECT_EQ(res.match_indices, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(res.final_threshold, 0.01);
  for (double d : res.distances) EXPECT_EQ(d, 0.0);
  ASSERT_EQ(res.fields.size(), 1u);
  EXPECT_EQ(res.fields[0].slot, 2u);
  EXPECT_NEAR(res.fields[0].mean, 0.25, 1e-12);
}

TEST(HotDeck, ExactPoolRelaxesUntilAllMatched) {
  Eigen::MatrixXd pool(6, 2);
  pool << 0.0, 0.1, 0.2, 0.2, 0.9, 0.3, 1.0, 0.4, 0.5, 0.5, 0.05, 0.6;
  const auto res = find_similar(Eigen::Vector2d(0.0, 0.5), observed_of({true, false}), pool, BoolMatrix::Constant(6, 2, true));
  EXPECT_EQ(res.match_indices.size(), 6u);
  EXPECT_GE(res.final_threshold, 1.0);
}

TEST(HotDeck, NearestSetFromBruteForceRanking) {
  Eigen::MatrixXd pool(7, 2);
  pool.col(0) << 0.0, 0.1, 0.2, 0.5, 0.6, 0.9, 0.95;
  pool.col(1).setConstant(0.3);
  HotDeckConfig cfg;
  cfg.min_matches = 3;
  const Eigen::Vector2d record(0.05, 0.5);
  const BoolVector obs = observed_of({true, false});
  const auto res = find_similar(record, obs, pool, BoolMatrix::Constant(7, 2, true), cfg);
  EXPECT_EQ(res.match_indices, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(res.final_threshold, 0.04);
  const auto o = oracle::donors(record, flags(obs), pool, 3);
  EXPECT_EQ(o.rows, res.match_indices);
  EXPECT_DOUBLE_EQ(o.threshold, res.final_threshold);
}

TEST(HotDeck, RandomPoolsAgreeWithBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd pool(40, 5);
    for (auto& v : pool.reshaped()) v = u(rng);
    Eigen::VectorXd record(5);
    for (auto& v : record) v = u(rng);
    BoolVector obs = BoolVector::Constant(5, true);
    obs(trial % 5) = false;
    const auto res = find_similar(record, obs, pool, BoolMatrix::Constant(40, 5, true));
    const auto o = oracle::donors(record, flags(obs), pool, 6);
    EXPECT_EQ(res.match_indices, o.rows);
    EXPECT_DOUBLE_EQ(res.final_threshold, o.threshold);
    EXPECT_GE(res.match_indices.size(), 6u);
    for (const auto& f : res.fields) {
      EXPECT_LE(0.0, f.lo);
      EXPECT_LE(f.lo, f.hi);
      EXPECT_LE(f.hi, 1.0);
      EXPECT_LE(f.lo, f.mean + 1e-15);
      EXPECT_GE(f.hi, f.mean - 1e-15);
    }
  }
}

TEST(HotDeck, MinMatchesMonotoneThreshold) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  Eigen::MatrixXd pool(60, 4);
  for (auto& v : pool.reshaped()) v = u(rng);
  const Eigen::Vector4d record(0.3, 0.2, 0.8, 0.5);
  const BoolVector obs = observed_of({true, true, true, false});
  double prev = 0;
  for (std::size_t k = 1; k <= 60; ++k) {
    HotDeckConfig cfg;
    cfg.min_matches = k;
    const double t = find_similar(record, obs, pool, BoolMatrix::Constant(60, 4, true), cfg).final_threshold;
    EXPECT_GE(t, prev);
    prev = t;
  }
}

TEST(HotDeck, IncompletePoolRowsSkipped) {
  Eigen::MatrixXd pool = Eigen::MatrixXd::Constant(8, 2, 0.5);
  BoolMatrix mask = BoolMatrix::Constant(8, 2, true);
  mask(0, 1) = false;
  mask(3, 0) = false;
  const auto res = find_similar(Eigen::Vector2d(0.5, 0.0), observed_of({true, false}), pool, mask);
  EXPECT_EQ(res.match_indices, (std::vector<std::size_t>{1, 2, 4, 5, 6, 7}));
  mask(4, 1) = false;
  try {
    find_similar(Eigen::Vector2d(0.5, 0.0), observed_of({true, false}), pool, mask);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PoolTooSmall);
  }
}

TEST(HotDeck, RecordErrors) {
  const Eigen::MatrixXd pool = Eigen::MatrixXd::Constant(8, 2, 0.5);
  const BoolMatrix mask = BoolMatrix::Constant(8, 2, true);
  auto code = [&](const BoolVector& obs, Eigen::Index width) {
    try {
      find_similar(Eigen::VectorXd::Zero(width), obs, pool, mask);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  EXPECT_EQ(code(observed_of({true, true}), 2), ErrorCode::NothingMissing);
  EXPECT_EQ(code(observed_of({false, false}), 2), ErrorCode::FullyMissing);
  EXPECT_EQ(code(observed_of({true, false, true}), 3), ErrorCode::WidthMismatch);
}

TEST(Bounds, Examples) {
  const GeneBounds zero = field_bounds(0.4, 0.0);
  EXPECT_NEAR(zero.lo, 0.39, 1e-15);
  EXPECT_NEAR(zero.hi, 0.41, 1e-15);
  const GeneBounds mid = field_bounds(0.5, 0.2);
  EXPECT_NEAR(mid.lo, 0.4, 1e-15);
  EXPECT_NEAR(mid.hi, 0.6, 1e-15);
  const GeneBounds edge = field_bounds(0.02, 0.2);
  EXPECT_EQ(edge.lo, 0.0);
  EXPECT_NEAR(edge.hi, 0.12, 1e-15);
  const GeneBounds wide = field_bounds(0.5, 0.2, BoundsWidth::TwoSigma);
  EXPECT_NEAR(wide.hi - wide.lo, 0.4, 1e-15);
}

TEST(Bounds, FromMatchesUsesSummaries) {
  Eigen::MatrixXd pool(6, 3);
  pool << 0.5, 0.2, 0.4, 0.5, 0.4, 0.4, 0.5, 0.6, 0.4, 0.5, 0.2, 0.4, 0.5, 0.4, 0.4, 0.5, 0.6, 0.4;
  const auto res =
      find_similar(Eigen::Vector3d(0.5, 0, 0), observed_of({true, false, false}), pool, BoolMatrix::Constant(6, 3, true));
  const SearchBounds b = bounds_from_matches(res);
  ASSERT_EQ(b.size(), 2u);
  const double sd = std::sqrt((2 * 0.04 + 0 + 2 * 0.04) / 5.0);  // values 0.2,0.4,0.6 twice, mean 0.4
  EXPECT_NEAR(res.fields[0].std, sd, 1e-12);
  EXPECT_NEAR(b[0].hi - b[0].lo, sd, 1e-12);
  EXPECT_NEAR(b[1].lo, 0.39, 1e-12);
}
