#include "imputekit/data_model.hpp"

#include "imputekit/error.hpp"
#include "imputekit/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace imputekit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool scaled_from_data(const ColumnKind& kind) {
  return std::holds_alternative<NumericKind>(kind) || std::holds_alternative<OrdinalKind>(kind);
}

double number_of(const Cell& cell, const Column& column) {
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  throw Error(ErrorCode::SchemaMismatch, fmt::format("column '{}' holds a label, expected a number", column.name));
}

std::size_t label_index(const Cell& cell, const Column& column) {
  const auto& labels = std::get<CategoricalKind>(column.kind).labels;
  const auto* s = std::get_if<std::string>(&cell);
  if (!s) throw Error(ErrorCode::UnknownLabel, fmt::format("column '{}' holds a number, expected a label", column.name));
  const auto it = std::find(labels.begin(), labels.end(), *s);
  if (it == labels.end())
    throw Error(ErrorCode::UnknownLabel, fmt::format("'{}' is not a label of column '{}'", *s, column.name));
  return static_cast<std::size_t>(it - labels.begin());
}

NormParams fit_norm(const SurveyTable& table) {
  const Schema& schema = table.schema;
  NormParams norm(schema.encoded_width(), ScaleRange{0.0, 1.0});
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const Column& col = schema.column(c);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    std::size_t observed = 0;
    for (const auto& row : table.rows) {
      if (is_missing(row[c])) continue;
      ++observed;
      if (scaled_from_data(col.kind)) {
        const double v = number_of(row[c], col);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (observed == 0) throw Error(ErrorCode::EmptyData, fmt::format("column '{}' has no observed values", col.name));
    if (!scaled_from_data(col.kind)) continue;
    if (!(lo < hi)) throw Error(ErrorCode::ColumnConstant, fmt::format("column '{}' is constant ({})", col.name, lo));
    norm[schema.slots(c).first] = {lo, hi};
  }
  return norm;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> SurveyTable::numeric_column(std::size_t column) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    const auto* d = std::get_if<double>(&row.at(column));
    out.push_back(d ? *d : kNaN);
  }
  return out;
}

void validate(const SurveyTable& table) {
  const Schema& schema = table.schema;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != schema.size())
      throw Error(ErrorCode::ShapeMismatch, fmt::format("row {} has {} cells, schema has {}", r, row.size(), schema.size()));
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const Cell& cell = row[c];
      if (is_missing(cell)) continue;
      const Column& col = schema.column(c);
      std::visit(overloaded{
                     [&](const NumericKind&) {
                       if (!std::isfinite(number_of(cell, col)))
                         throw Error(ErrorCode::SchemaMismatch, fmt::format("row {}: '{}' is not finite", r, col.name));
                     },
                     [&](const OrdinalKind& k) {
                       const double v = number_of(cell, col);
                       if (v != std::floor(v) || v < 0 || v >= k.levels)
                         throw Error(ErrorCode::SchemaMismatch,
                                     fmt::format("row {}: '{}' = {} is not a level in [0,{})", r, col.name, v, k.levels));
                     },
                     [&](const CategoricalKind&) { label_index(cell, col); },
                     [&](const BinaryKind&) {
                       const double v = number_of(cell, col);
                       if (v != 0.0 && v != 1.0)
                         throw Error(ErrorCode::SchemaMismatch, fmt::format("row {}: '{}' = {} is not 0/1", r, col.name, v));
                     },
                 },
                 col.kind);
    }
  }
}

SurveyTable select_rows(const SurveyTable& table, std::span<const std::size_t> rows) {
  SurveyTable out{table.schema, {}};
  out.rows.reserve(rows.size());
  for (auto r : rows) out.rows.push_back(table.rows.at(r));
  return out;
}

// ---------------------------------------------------------------------------
// encode / decode

EncodedMatrix encode(const SurveyTable& table) {
  if (table.n_rows() < 2) throw Error(ErrorCode::TooFewRows, "encode needs at least 2 rows");
  return encode(table, fit_norm(table));
}

EncodedMatrix encode(const SurveyTable& table, const NormParams& norm) {
  const Schema& schema = table.schema;
  const std::size_t width = schema.encoded_width();
  if (norm.size() != width)
    throw Error(ErrorCode::ShapeMismatch, fmt::format("{} norm params for {} encoded slots", norm.size(), width));
  validate(table);

  const auto n = static_cast<Eigen::Index>(table.n_rows());
  EncodedMatrix m{schema, Eigen::MatrixXd::Constant(n, static_cast<Eigen::Index>(width), kMaskedPlaceholder),
                  BoolMatrix::Constant(n, static_cast<Eigen::Index>(width), false), norm};
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = table.rows[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (is_missing(row[c])) continue;
      const Column& col = schema.column(c);
      const SlotRange slots = schema.slots(c);
      const auto first = static_cast<Eigen::Index>(slots.first);
      if (is_categorical(col)) {
        const std::size_t hot = label_index(row[c], col);
        for (std::size_t s = 0; s < slots.count; ++s) {
          m.values(r, first + static_cast<Eigen::Index>(s)) = s == hot ? 1.0 : 0.0;
          m.mask(r, first + static_cast<Eigen::Index>(s)) = true;
        }
        continue;
      }
      const ScaleRange range = norm[slots.first];
      const double scaled = (number_of(row[c], col) - range.min) / (range.max - range.min);
      m.values(r, first) = std::clamp(scaled, 0.0, 1.0);
      m.mask(r, first) = true;
    }
  }
  return m;
}

SurveyTable decode(const EncodedMatrix& matrix, const Schema& schema) {
  if (matrix.cols() != schema.encoded_width() || matrix.norm.size() != schema.encoded_width() ||
      matrix.mask.rows() != matrix.values.rows() || matrix.mask.cols() != matrix.values.cols())
    throw Error(ErrorCode::ShapeMismatch, fmt::format("matrix width {} does not fit schema width {}", matrix.cols(),
                                                      schema.encoded_width()));
  SurveyTable table{schema, {}};
  table.rows.reserve(matrix.rows());
  for (Eigen::Index r = 0; r < matrix.values.rows(); ++r) {
    std::vector<Cell> row;
    row.reserve(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const Column& col = schema.column(c);
      const SlotRange slots = schema.slots(c);
      const auto first = static_cast<Eigen::Index>(slots.first);
      const auto count = static_cast<Eigen::Index>(slots.count);
      if (!matrix.mask.row(r).segment(first, count).all()) {
        row.emplace_back(std::monostate{});
        continue;
      }
      const double v = matrix.values(r, first);
      const ScaleRange range = matrix.norm[slots.first];
      row.push_back(std::visit(overloaded{
                                   [&](const NumericKind&) -> Cell { return range.min + v * (range.max - range.min); },
                                   [&](const OrdinalKind& k) -> Cell {
                                     const double level = std::round(range.min + v * (range.max - range.min));
                                     return std::clamp(level, 0.0, static_cast<double>(k.levels - 1));
                                   },
                                   [&](const CategoricalKind& k) -> Cell {
                                     Eigen::Index best = 0;
                                     matrix.values.row(r).segment(first, count).maxCoeff(&best);
                                     return k.labels[static_cast<std::size_t>(best)];
                                   },
                                   [&](const BinaryKind&) -> Cell { return v >= 0.5 ? 1.0 : 0.0; },
                               },
                               col.kind));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

SurveyTable decode(const EncodedMatrix& matrix) { return decode(matrix, matrix.schema); }

EncodedMatrix select_rows(const EncodedMatrix& matrix, std::span<const std::size_t> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  EncodedMatrix out{matrix.schema, Eigen::MatrixXd(n, matrix.values.cols()), BoolMatrix(n, matrix.mask.cols()),
                    matrix.norm};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
    if (src >= matrix.values.rows()) throw Error(ErrorCode::ShapeMismatch, fmt::format("row {} out of range", src));
    out.values.row(i) = matrix.values.row(src);
    out.mask.row(i) = matrix.mask.row(src);
  }
  return out;
}

std::vector<std::size_t> complete_rows(const EncodedMatrix& matrix) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < matrix.rows(); ++r)
    if (matrix.row_complete(r)) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------
// Outlier rules

namespace {

constexpr std::pair<std::string_view, Comparison> kOperators[] = {
    {"<=", Comparison::LessEqual}, {">=", Comparison::GreaterEqual}, {"==", Comparison::Equal},
    {"!=", Comparison::NotEqual},  {"<", Comparison::Less},          {">", Comparison::Greater},
};

std::string_view op_text(Comparison op) {
  for (const auto& [text, c] : kOperators)
    if (c == op) return text;
  return "?";
}

bool holds(double lhs, Comparison op, double rhs) {
  switch (op) {
    case Comparison::Less: return lhs < rhs;
    case Comparison::LessEqual: return lhs <= rhs;
    case Comparison::Greater: return lhs > rhs;
    case Comparison::GreaterEqual: return lhs >= rhs;
    case Comparison::Equal: return lhs == rhs;
    case Comparison::NotEqual: return lhs != rhs;
  }
  return true;
}

std::string strip(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  return std::string(s.substr(first, s.find_last_not_of(" \t") - first + 1));
}

}  // namespace

std::string OutlierRule::to_string() const {
  std::string out = lhs + " " + std::string(op_text(op)) + " ";
  if (const auto* col = std::get_if<std::string>(&rhs)) return out + *col;
  return out + fmt::format("{}", std::get<double>(rhs));
}

OutlierRule parse_rule(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    for (const auto& [sym, op] : kOperators) {
      if (text.substr(i, sym.size()) != sym) continue;
      OutlierRule rule;
      rule.lhs = strip(text.substr(0, i));
      rule.op = op;
      const std::string rhs = strip(text.substr(i + sym.size()));
      if (rule.lhs.empty() || rhs.empty()) throw Error(ErrorCode::Parse, fmt::format("incomplete rule '{}'", text));
      try {
        std::size_t used = 0;
        const double v = std::stod(rhs, &used);
        if (used != rhs.size()) throw std::invalid_argument(rhs);
        rule.rhs = v;
      } catch (const std::exception&) {
        rule.rhs = rhs;
      }
      return rule;
    }
  }
  throw Error(ErrorCode::Parse, fmt::format("rule '{}' has no comparison operator", text));
}

std::vector<OutlierRule> default_rules() {
  return {parse_rule("parity <= gravidity"), parse_rule("age >= 0"), parse_rule("gravidity >= 0"),
          parse_rule("parity >= 0")};
}

std::vector<Violation> check_outliers(const SurveyTable& table, std::span<const OutlierRule> rules) {
  const Schema& schema = table.schema;
  struct Resolved {
    std::size_t lhs;
    std::optional<std::size_t> rhs_column;
    double rhs_value;
  };
  std::vector<Resolved> resolved;
  for (const auto& rule : rules) {
    Resolved r{schema.index_of(rule.lhs), std::nullopt, 0.0};
    if (const auto* col = std::get_if<std::string>(&rule.rhs))
      r.rhs_column = schema.index_of(*col);
    else
      r.rhs_value = std::get<double>(rule.rhs);
    for (auto c : {std::optional<std::size_t>(r.lhs), r.rhs_column})
      if (c && is_categorical(schema.column(*c)))
        throw Error(ErrorCode::BadSchema, fmt::format("rule '{}' compares a categorical column", rule.to_string()));
    resolved.push_back(r);
  }

  std::vector<Violation> out;
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const auto& cells = table.rows[row];
    for (std::size_t k = 0; k < resolved.size(); ++k) {
      const auto& r = resolved[k];
      const auto* lhs = std::get_if<double>(&cells.at(r.lhs));
      if (!lhs) continue;
      double rhs = r.rhs_value;
      if (r.rhs_column) {
        const auto* v = std::get_if<double>(&cells.at(*r.rhs_column));
        if (!v) continue;
        rhs = *v;
      }
      if (!holds(*lhs, rules[k].op, rhs)) out.push_back({row, k});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// split

double SplitDataset::max_mean_gap() const {
  double gap = 0.0;
  for (Eigen::Index c = 0; c < partition_means.cols(); ++c) {
    const auto col = partition_means.col(c);
    if (!col.allFinite()) continue;
    gap = std::max(gap, col.maxCoeff() - col.minCoeff());
  }
  return gap;
}

SplitDataset split(const EncodedMatrix& matrix, std::uint64_t seed) {
  const std::size_t n = matrix.rows();
  if (n < 8) throw Error(ErrorCode::TooFewRows, fmt::format("split needs at least 8 rows, got {}", n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  const std::size_t n_train = (n + 1) / 2;
  const std::size_t n_val = (n - n_train) / 2;

  SplitDataset out;
  out.seed = seed;
  out.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.validation_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                             order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  out.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  out.train = select_rows(matrix, out.train_rows);
  out.validation = select_rows(matrix, out.validation_rows);
  out.test = select_rows(matrix, out.test_rows);

  out.partition_means = Eigen::MatrixXd::Constant(3, matrix.values.cols(), kNaN);
  const EncodedMatrix* parts[] = {&out.train, &out.validation, &out.test};
  for (Eigen::Index p = 0; p < 3; ++p) {
    const auto& part = *parts[p];
    for (Eigen::Index c = 0; c < part.values.cols(); ++c) {
      const auto observed = part.mask.col(c);
      const auto count = observed.count();
      if (count == 0) continue;
      out.partition_means(p, c) = observed.select(part.values.col(c).array(), 0.0).sum() / static_cast<double>(count);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// inject_missing

EncodedMatrix inject_missing(const EncodedMatrix& matrix, const MissingnessMechanism& mechanism,
                             std::span<const std::string> target_columns, std::uint64_t seed,
                             MaskGranularity granularity) {
  const Schema& schema = matrix.schema;
  std::vector<std::size_t> targets;
  for (const auto& name : target_columns) targets.push_back(schema.index_of(name));

  auto check_probability = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::BadConfig, fmt::format("{} {} outside [0,1]", what, p));
  };
  std::optional<std::size_t> driver;
  std::visit(overloaded{
                 [&](const Mcar& m) { check_probability(m.rate, "MCAR rate"); },
                 [&](const Mnar& m) { check_probability(m.rate, "MNAR rate"); },
                 [&](const Mar& m) {
                   check_probability(m.base_rate, "MAR base rate");
                   if (!std::isfinite(m.logistic_slope)) throw Error(ErrorCode::BadConfig, "MAR slope not finite");
                   driver = schema.index_of(m.driver_column);
                   if (std::find(targets.begin(), targets.end(), *driver) != targets.end())
                     throw Error(ErrorCode::DriverIsTarget,
                                 fmt::format("driver column '{}' is also a target", m.driver_column));
                 },
             },
             mechanism);

  EncodedMatrix out = matrix;
  Rng rng(seed);

  auto mask_column = [&](Eigen::Index r, std::size_t column) {
    const SlotRange slots = schema.slots(column);
    for (std::size_t s = 0; s < slots.count; ++s) {
      const auto slot = static_cast<Eigen::Index>(slots.first + s);
      out.mask(r, slot) = false;
      out.values(r, slot) = kMaskedPlaceholder;
    }
  };
  auto observed_value = [&](Eigen::Index r, std::size_t column) -> std::optional<double> {
    const auto slot = static_cast<Eigen::Index>(schema.slots(column).first);
    if (!matrix.mask(r, slot)) return std::nullopt;
    return matrix.values(r, slot);
  };
  auto probability = [&](Eigen::Index r, std::size_t column) -> double {
    return std::visit(overloaded{
                          [](const Mcar& m) { return m.rate; },
                          [&](const Mnar& m) {
                            const auto v = observed_value(r, column);
                            return v ? std::clamp(2.0 * m.rate * *v, 0.0, 1.0) : 0.0;
                          },
                          [&](const Mar& m) {
                            const auto v = observed_value(r, *driver);
                            if (!v || m.base_rate <= 0.0 || m.base_rate >= 1.0) return m.base_rate;
                            const double logit = std::log(m.base_rate / (1.0 - m.base_rate));
                            return 1.0 / (1.0 + std::exp(-(logit + m.logistic_slope * (*v - 0.5))));
                          },
                      },
                      mechanism);
  };

  for (Eigen::Index r = 0; r < matrix.values.rows(); ++r) {
    if (granularity == MaskGranularity::PerRow) {
      if (targets.empty()) continue;
      const double u = uniform01(rng);
      if (u < probability(r, targets.front()))
        for (auto c : targets) mask_column(r, c);
      continue;
    }
    for (auto c : targets) {
      const double u = uniform01(rng);
      if (u < probability(r, c)) mask_column(r, c);
    }
  }
  return out;
}

}  // namespace imputekit
