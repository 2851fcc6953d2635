#pragma once

#include "imputekit/error.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace imputekit {

struct GaConfig {
  std::size_t population = 50;
  std::size_t generations = 20;
  double crossover_rate = 0.8;
  double mutation_rate = 0.05;
  std::size_t elitism = 2;
  std::size_t tournament = 3;
  std::uint64_t seed = 0;

  /// Throws BadConfig.
  void validate() const;
};

struct GeneBounds {
  double lo = 0.0;
  double hi = 1.0;
};
using SearchBounds = std::vector<GeneBounds>;

using FitnessFn = std::function<double(const Eigen::VectorXd&)>;

struct GaResult {
  Eigen::VectorXd best_genes;
  double best_fitness = 0.0;
  std::vector<double> history;  // best-so-far after init and after each generation
  std::size_t evaluations = 0;
};

class NonFiniteFitnessError : public Error {
 public:
  NonFiniteFitnessError(const std::string& message, Eigen::VectorXd genes)
      : Error(ErrorCode::NonFiniteFitness, message), genes_(std::move(genes)) {}
  const Eigen::VectorXd& genes() const noexcept { return genes_; }

 private:
  Eigen::VectorXd genes_;
};

/// Maximises `fitness` over the box. Uniform initial population, size-k
/// tournament selection, BLX-0.5 blend crossover, Gaussian mutation with
/// sigma = 0.1 (hi - lo), clamping to the box and elitist carry-over. Returns
/// the best individual ever evaluated.
/// Throws EmptyBounds, BadConfig, NonFiniteFitnessError.
GaResult run_ga(const FitnessFn& fitness, const SearchBounds& bounds, const GaConfig& cfg);

}  // namespace imputekit
