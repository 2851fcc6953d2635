#include "imputekit/ga.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace imputekit;

namespace {

GaConfig seeded(std::uint64_t seed) {
  GaConfig cfg;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(Ga, DegenerateBoundsReturnThePoint) {
  const SearchBounds b{{0.3, 0.3}, {0.7, 0.7}};
  const auto r = run_ga([](const Eigen::VectorXd& x) { return -x.sum(); }, b, seeded(1));
  EXPECT_EQ(r.best_genes(0), 0.3);
  EXPECT_EQ(r.best_genes(1), 0.7);
}

TEST(Ga, OneDimensionalQuadraticBattery) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = run_ga([](const Eigen::VectorXd& x) { return -(x(0) - 3) * (x(0) - 3); }, {{0.0, 10.0}}, seeded(seed));
    hits += std::abs(r.best_genes(0) - 3.0) < 0.1 ? 1 : 0;
    for (std::size_t g = 1; g < r.history.size(); ++g) EXPECT_GE(r.history[g], r.history[g - 1]);
    EXPECT_EQ(r.history.size(), 21u);
    EXPECT_EQ(r.history.back(), r.best_fitness);
  }
  EXPECT_GE(hits, 95);
}

TEST(Ga, ThreeDimensionalMedianWithinTolerance) {
  const Eigen::Vector3d c(0.2, 0.55, 0.9);
  std::vector<double> worst;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = run_ga([&](const Eigen::VectorXd& x) { return -(x - c).squaredNorm(); }, {{0, 1}, {0, 1}, {0, 1}},
                          seeded(seed));
    worst.push_back((r.best_genes - c).cwiseAbs().maxCoeff());
  }
  std::nth_element(worst.begin(), worst.begin() + 10, worst.end());
  EXPECT_LT(worst[10], 0.2);
}

TEST(Ga, EveryEvaluationInsideBounds) {
  const SearchBounds b{{-1.0, 0.5}, {2.0, 2.25}, {0.0, 0.0}};
  std::size_t calls = 0;
  bool outside = false;
  GaConfig cfg = seeded(4);
  cfg.mutation_rate = 0.9;  // stress the clamp
  const auto r = run_ga(
      [&](const Eigen::VectorXd& x) {
        ++calls;
        for (std::size_t i = 0; i < b.size(); ++i)
          outside |= x(static_cast<Eigen::Index>(i)) < b[i].lo || x(static_cast<Eigen::Index>(i)) > b[i].hi;
        return x(0) + x(1);
      },
      b, cfg);
  EXPECT_FALSE(outside);
  EXPECT_EQ(calls, r.evaluations);
  // elites are carried without re-evaluation
  EXPECT_EQ(r.evaluations, cfg.population + cfg.generations * (cfg.population - cfg.elitism));
}

TEST(Ga, Deterministic) {
  auto f = [](const Eigen::VectorXd& x) { return std::sin(5 * x(0)) * std::cos(3 * x(1)); };
  const auto a = run_ga(f, {{0, 1}, {0, 1}}, seeded(9));
  const auto b = run_ga(f, {{0, 1}, {0, 1}}, seeded(9));
  EXPECT_EQ(a.best_genes, b.best_genes);
  EXPECT_EQ(a.history, b.history);
  const auto c = run_ga(f, {{0, 1}, {0, 1}}, seeded(10));
  EXPECT_NE(a.history, c.history);
}

TEST(Ga, NonFiniteFitnessCarriesGenes) {
  try {
    run_ga([](const Eigen::VectorXd& x) { return x(0) > 0.5 ? std::nan("") : x(0); }, {{0, 1}}, seeded(2));
    FAIL();
  } catch (const NonFiniteFitnessError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteFitness);
    EXPECT_GT(e.genes()(0), 0.5);
  }
}

TEST(Ga, RejectsBadInputs) {
  auto f = [](const Eigen::VectorXd&) { return 0.0; };
  try {
    run_ga(f, {}, seeded(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyBounds);
  }
  EXPECT_THROW(run_ga(f, {{1.0, 0.0}}, seeded(0)), Error);
  GaConfig cfg;
  cfg.population = 1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.elitism = cfg.population;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.crossover_rate = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
}
