#include "imputekit/data_model.hpp"
#include "imputekit/error.hpp"
#include "imputekit/random.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace imputekit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

Marginal default_marginal(const ColumnKind& kind) {
  return std::visit(overloaded{
                        [](const NumericKind& k) -> Marginal {
                          return ShapedMarginal{0.5 * (k.min + k.max), (k.max - k.min) / 6.0, 0.0, false};
                        },
                        [](const OrdinalKind& k) -> Marginal {
                          const double top = k.levels - 1;
                          return ShapedMarginal{0.5 * top, top / 6.0, 0.0, true};
                        },
                        [](const CategoricalKind& k) -> Marginal {
                          return CategoricalMarginal{std::vector<double>(k.labels.size(), 1.0 / k.labels.size())};
                        },
                        [](const BinaryKind&) -> Marginal { return BernoulliMarginal{0.5}; },
                    },
                    kind);
}

void check_marginal(const Column& column, const Marginal& marginal) {
  auto bad = [&](const std::string& why) {
    return Error(ErrorCode::BadCorrelationSpec, fmt::format("marginal for '{}': {}", column.name, why));
  };
  const bool numeric =
      std::holds_alternative<NumericKind>(column.kind) || std::holds_alternative<OrdinalKind>(column.kind);
  std::visit(overloaded{
                 [&](const ShapedMarginal& m) {
                   if (!numeric) throw bad("shaped marginal needs a numeric or ordinal column");
                   if (!(m.scale > 0.0) || !std::isfinite(m.location) || !std::isfinite(m.skew))
                     throw bad("scale must be positive and parameters finite");
                 },
                 [&](const FractionOfMarginal&) {
                   if (!numeric) throw bad("fraction marginal needs a numeric or ordinal column");
                 },
                 [&](const BernoulliMarginal& m) {
                   if (!std::holds_alternative<BinaryKind>(column.kind)) throw bad("bernoulli needs a binary column");
                   if (!(m.prevalence >= 0.0 && m.prevalence <= 1.0)) throw bad("prevalence outside [0,1]");
                 },
                 [&](const CategoricalMarginal& m) {
                   const auto* k = std::get_if<CategoricalKind>(&column.kind);
                   if (!k) throw bad("label probabilities need a categorical column");
                   if (m.probabilities.size() != k->labels.size()) throw bad("one probability per label required");
                   const double total = std::accumulate(m.probabilities.begin(), m.probabilities.end(), 0.0);
                   if (std::any_of(m.probabilities.begin(), m.probabilities.end(), [](double p) { return p < 0; }) ||
                       std::abs(total - 1.0) > 1e-9)
                     throw bad("probabilities must be non-negative and sum to 1");
                 },
             },
             marginal);
}

std::pair<double, double> value_range(const ColumnKind& kind) {
  if (const auto* k = std::get_if<NumericKind>(&kind)) return {k->min, k->max};
  if (const auto* k = std::get_if<OrdinalKind>(&kind)) return {0.0, static_cast<double>(k->levels - 1)};
  return {0.0, 1.0};
}

}  // namespace

SynthesisSpec default_synthesis_spec() {
  SynthesisSpec spec;
  spec.marginals = {
      {"age", ShapedMarginal{25.0, 6.3, 0.2, true}},
      {"education", ShapedMarginal{10.0, 2.8, -0.25, true}},
      {"gravidity", ShapedMarginal{2.2, 1.1, 0.45, true}},
      {"parity", FractionOfMarginal{"gravidity"}},
      {"hiv", BernoulliMarginal{0.21}},
      {"race", CategoricalMarginal{{0.75, 0.12, 0.08, 0.05}}},
      {"province", CategoricalMarginal{{0.4, 0.35, 0.25}}},
      {"clinic", BernoulliMarginal{0.6}},
  };
  spec.correlations = {
      {"age", "gravidity", 0.7},       {"age", "parity", 0.5},          {"gravidity", "parity", 0.3},
      {"age", "education", -0.2},      {"education", "parity", -0.3},   {"education", "race", 0.35},
      {"education", "province", 0.25}, {"hiv", "province", 0.3},        {"hiv", "education", -0.15},
      {"hiv", "race", -0.3},           {"clinic", "education", 0.3},
  };
  return spec;
}

SurveyTable synthesize(const Schema& schema, std::size_t n, std::uint64_t seed, const SynthesisSpec& spec) {
  const auto d = static_cast<Eigen::Index>(schema.size());
  auto bad = [](const std::string& why) { return Error(ErrorCode::BadCorrelationSpec, why); };
  auto column_index = [&](const std::string& name) -> std::size_t {
    if (auto i = schema.find(name)) return *i;
    throw bad(fmt::format("unknown column '{}'", name));
  };

  Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(d, d);
  for (const auto& p : spec.correlations) {
    const auto a = static_cast<Eigen::Index>(column_index(p.a));
    const auto b = static_cast<Eigen::Index>(column_index(p.b));
    if (a == b) throw bad(fmt::format("self-correlation for '{}'", p.a));
    if (!(std::abs(p.rho) <= 1.0)) throw bad(fmt::format("|rho| > 1 for '{}'/'{}'", p.a, p.b));
    corr(a, b) = corr(b, a) = p.rho;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw bad(fmt::format("correlation matrix not positive semidefinite (min eigenvalue {})",
                          eig.eigenvalues().minCoeff()));
  const Eigen::MatrixXd factor =
      eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::vector<Marginal> marginals;
  for (const auto& c : schema.columns()) marginals.push_back(default_marginal(c.kind));
  for (const auto& [name, m] : spec.marginals) {
    const auto c = column_index(name);
    check_marginal(schema.column(c), m);
    marginals[c] = m;
  }
  // FractionOf columns are filled after every column they may reference.
  std::vector<std::size_t> order;
  std::vector<std::size_t> deferred;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (const auto* f = std::get_if<FractionOfMarginal>(&marginals[c])) {
      const auto cap = column_index(f->cap_column);
      if (std::holds_alternative<FractionOfMarginal>(marginals[cap]) || is_categorical(schema.column(cap)))
        throw bad(fmt::format("'{}' must be capped by a plain numeric column", schema.column(c).name));
      deferred.push_back(c);
    } else {
      order.push_back(c);
    }
  }
  order.insert(order.end(), deferred.begin(), deferred.end());

  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SurveyTable table{schema, {}};
  table.rows.reserve(n);
  Eigen::VectorXd e(d);
  for (std::size_t r = 0; r < n; ++r) {
    for (Eigen::Index k = 0; k < d; ++k) e(k) = gauss(rng);
    const Eigen::VectorXd z = factor * e;
    std::vector<Cell> row(schema.size());
    for (auto c : order) {
      const Column& col = schema.column(c);
      const double zc = z(static_cast<Eigen::Index>(c));
      const double u = normal_cdf(zc);
      const auto [lo, hi] = value_range(col.kind);
      const bool ordinal = std::holds_alternative<OrdinalKind>(col.kind);
      row[c] = std::visit(
          overloaded{
              [&](const ShapedMarginal& m) -> Cell {
                const double shaped = m.skew == 0.0 ? zc : std::expm1(m.skew * zc) / m.skew;
                double v = std::clamp(m.location + m.scale * shaped, lo, hi);
                if (m.integer || ordinal) v = std::clamp(std::round(v), std::ceil(lo), std::floor(hi));
                return v;
              },
              [&](const FractionOfMarginal& m) -> Cell {
                const double cap = std::get<double>(row[schema.index_of(m.cap_column)]);
                return std::clamp(std::floor(u * cap), std::ceil(lo), std::floor(hi));
              },
              [&](const BernoulliMarginal& m) -> Cell { return u > 1.0 - m.prevalence ? 1.0 : 0.0; },
              [&](const CategoricalMarginal& m) -> Cell {
                const auto& labels = std::get<CategoricalKind>(col.kind).labels;
                double cumulative = 0.0;
                for (std::size_t k = 0; k + 1 < labels.size(); ++k) {
                  cumulative += m.probabilities[k];
                  if (u < cumulative) return labels[k];
                }
                return labels.back();
              },
          },
          marginals[c]);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace imputekit
