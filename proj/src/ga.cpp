#include "imputekit/ga.hpp"

#include "imputekit/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace imputekit {

namespace {

struct Individual {
  Eigen::VectorXd genes;
  double fitness = 0.0;
};

std::string format_genes(const Eigen::VectorXd& g) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < g.size(); ++i) out += fmt::format("{}{}", i ? ", " : "", g(i));
  return out + "]";
}

}  // namespace

void GaConfig::validate() const {
  if (population < 2) throw Error(ErrorCode::BadConfig, "population must be >= 2");
  if (elitism >= population) throw Error(ErrorCode::BadConfig, "elitism must be < population");
  if (tournament < 1) throw Error(ErrorCode::BadConfig, "tournament size must be >= 1");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0))
    throw Error(ErrorCode::BadConfig, "crossover_rate outside [0,1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
    throw Error(ErrorCode::BadConfig, "mutation_rate outside [0,1]");
}

GaResult run_ga(const FitnessFn& fitness, const SearchBounds& bounds, const GaConfig& cfg) {
  cfg.validate();
  if (bounds.empty()) throw Error(ErrorCode::EmptyBounds, "no genes to search");
  for (std::size_t g = 0; g < bounds.size(); ++g) {
    const auto& b = bounds[g];
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi)
      throw Error(ErrorCode::BadConfig, fmt::format("gene {} has invalid bounds [{}, {}]", g, b.lo, b.hi));
  }
  const auto n_genes = static_cast<Eigen::Index>(bounds.size());
  Rng rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  GaResult result;
  auto evaluate = [&](const Eigen::VectorXd& genes) {
    const double f = fitness(genes);
    ++result.evaluations;
    if (!std::isfinite(f))
      throw NonFiniteFitnessError(fmt::format("fitness {} at genes {}", f, format_genes(genes)), genes);
    return f;
  };
  auto clamp_gene = [&](Eigen::Index g, double v) {
    const auto& b = bounds[static_cast<std::size_t>(g)];
    return std::clamp(v, b.lo, b.hi);
  };

  std::vector<Individual> pop(cfg.population);
  for (auto& ind : pop) {
    ind.genes.resize(n_genes);
    for (Eigen::Index g = 0; g < n_genes; ++g) {
      const auto& b = bounds[static_cast<std::size_t>(g)];
      ind.genes(g) = clamp_gene(g, b.lo + (b.hi - b.lo) * uniform01(rng));
    }
    ind.fitness = evaluate(ind.genes);
  }

  Individual best = *std::max_element(pop.begin(), pop.end(),
                                      [](const auto& a, const auto& b) { return a.fitness < b.fitness; });
  result.history.push_back(best.fitness);

  std::uniform_int_distribution<std::size_t> pick(0, cfg.population - 1);
  auto tournament = [&]() -> const Individual& {
    std::size_t winner = pick(rng);
    for (std::size_t t = 1; t < cfg.tournament; ++t) {
      const std::size_t challenger = pick(rng);
      if (pop[challenger].fitness > pop[winner].fitness) winner = challenger;
    }
    return pop[winner];
  };

  std::vector<std::size_t> order(cfg.population);
  for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].fitness > pop[b].fitness; });

    std::vector<Individual> next;
    next.reserve(cfg.population);
    for (std::size_t e = 0; e < cfg.elitism; ++e) next.push_back(pop[order[e]]);

    while (next.size() < cfg.population) {
      const Individual& a = tournament();
      const Individual& b = tournament();
      Eigen::VectorXd child = a.genes;
      if (uniform01(rng) < cfg.crossover_rate) {
        for (Eigen::Index g = 0; g < n_genes; ++g) {
          const double lo = std::min(a.genes(g), b.genes(g));
          const double hi = std::max(a.genes(g), b.genes(g));
          const double spread = 0.5 * (hi - lo);
          child(g) = clamp_gene(g, (lo - spread) + (hi - lo + 2.0 * spread) * uniform01(rng));
        }
      }
      for (Eigen::Index g = 0; g < n_genes; ++g) {
        const auto& bd = bounds[static_cast<std::size_t>(g)];
        if (bd.hi == bd.lo) continue;
        if (uniform01(rng) < cfg.mutation_rate) child(g) = clamp_gene(g, child(g) + 0.1 * (bd.hi - bd.lo) * gauss(rng));
      }
      const double f = evaluate(child);
      next.push_back({std::move(child), f});
    }
    pop = std::move(next);

    for (const auto& ind : pop)
      if (ind.fitness > best.fitness) best = ind;
    result.history.push_back(best.fitness);
  }

  result.best_genes = best.genes;
  result.best_fitness = best.fitness;
  return result;
}

}  // namespace imputekit
