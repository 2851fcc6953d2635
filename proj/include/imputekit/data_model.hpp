#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace imputekit {

// ---------------------------------------------------------------------------
// Schema

struct NumericKind {
  double min = 0.0;
  double max = 1.0;
};

/// Integer levels 0 .. levels-1.
struct OrdinalKind {
  int levels = 2;
};

struct CategoricalKind {
  std::vector<std::string> labels;
};

/// Values 0 or 1.
struct BinaryKind {};

using ColumnKind = std::variant<NumericKind, OrdinalKind, CategoricalKind, BinaryKind>;

struct Column {
  std::string name;
  ColumnKind kind;
};

/// Encoded slots occupied by one raw column: [first, first + count).
struct SlotRange {
  std::size_t first = 0;
  std::size_t count = 0;
};

class Schema {
 public:
  Schema() = default;
  /// Validates kinds (Numeric min < max, Ordinal levels >= 2, Categorical
  /// >= 2 distinct labels) and unique column names. Throws BadSchema.
  explicit Schema(std::vector<Column> columns);

  const std::vector<Column>& columns() const noexcept { return columns_; }
  const Column& column(std::size_t i) const { return columns_.at(i); }
  std::size_t size() const noexcept { return columns_.size(); }
  std::size_t encoded_width() const noexcept { return width_; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws UnknownColumn.
  std::size_t index_of(std::string_view name) const;

  SlotRange slots(std::size_t column) const { return slots_.at(column); }
  std::size_t column_of_slot(std::size_t slot) const { return slot_owner_.at(slot); }

  bool operator==(const Schema& other) const;

 private:
  std::vector<Column> columns_;
  std::vector<SlotRange> slots_;
  std::vector<std::size_t> slot_owner_;
  std::size_t width_ = 0;
};

bool is_categorical(const Column& column);
std::string kind_name(const ColumnKind& kind);

/// Stand-in for the antenatal survey layout: 8 columns, 13 encoded slots.
Schema default_schema();

// ---------------------------------------------------------------------------
// Raw table

/// A raw cell: missing, a number (numeric/ordinal/binary) or a label.
using Cell = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

struct SurveyTable {
  Schema schema;
  std::vector<std::vector<Cell>> rows;

  std::size_t n_rows() const noexcept { return rows.size(); }
  /// Numeric view of one column; missing cells and labels become NaN.
  std::vector<double> numeric_column(std::size_t column) const;
};

/// Checks every non-missing cell against its column kind (finite numbers,
/// integer ordinal levels in range, 0/1 binaries, known labels).
void validate(const SurveyTable& table);

SurveyTable select_rows(const SurveyTable& table, std::span<const std::size_t> rows);

// ---------------------------------------------------------------------------
// Encoded matrix

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using BoolVector = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Per-slot min-max scaling parameters.
struct ScaleRange {
  double min = 0.0;
  double max = 1.0;
};
using NormParams = std::vector<ScaleRange>;

/// Placeholder written into masked slots. Never data.
inline constexpr double kMaskedPlaceholder = 0.5;

struct EncodedMatrix {
  Schema schema;
  Eigen::MatrixXd values;  // n_rows x encoded_width, observed entries in [0,1]
  BoolMatrix mask;         // true = observed
  NormParams norm;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }
  bool row_complete(std::size_t r) const { return mask.row(static_cast<Eigen::Index>(r)).all(); }
  std::size_t masked_count() const { return static_cast<std::size_t>((!mask).count()); }
};

/// Encodes with normalization fitted on the table's own observed values.
/// Throws ColumnConstant, UnknownLabel, TooFewRows, EmptyData.
EncodedMatrix encode(const SurveyTable& table);
/// Encodes with existing normalization; values outside the fitted range are
/// clamped into [0,1].
EncodedMatrix encode(const SurveyTable& table, const NormParams& norm);

/// Inverse of encode. Masked slots decode to missing cells; one-hot groups
/// decode by argmax, ordinal levels round to the nearest level and binaries
/// threshold at 0.5.
SurveyTable decode(const EncodedMatrix& matrix, const Schema& schema);
SurveyTable decode(const EncodedMatrix& matrix);

EncodedMatrix select_rows(const EncodedMatrix& matrix, std::span<const std::size_t> rows);

/// Rows that are observed in every slot.
std::vector<std::size_t> complete_rows(const EncodedMatrix& matrix);

// ---------------------------------------------------------------------------
// Outlier rules

enum class Comparison { Less, LessEqual, Greater, GreaterEqual, Equal, NotEqual };

struct OutlierRule {
  std::string lhs;
  Comparison op = Comparison::LessEqual;
  std::variant<std::string, double> rhs;  // column name or constant

  std::string to_string() const;
};

/// Parses "parity <= gravidity" or "age >= 0". Throws Parse.
OutlierRule parse_rule(std::string_view text);

std::vector<OutlierRule> default_rules();

struct Violation {
  std::size_t row = 0;
  std::size_t rule = 0;  // index into the rule list
  bool operator==(const Violation&) const = default;
};

/// Rows that break a rule. Cells that are missing never violate. Throws
/// UnknownColumn when a rule names a column absent from the schema.
std::vector<Violation> check_outliers(const SurveyTable& table, std::span<const OutlierRule> rules);

// ---------------------------------------------------------------------------
// Splitting

struct SplitDataset {
  EncodedMatrix train;
  EncodedMatrix validation;
  EncodedMatrix test;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> validation_rows;
  std::vector<std::size_t> test_rows;
  /// 3 x width: observed-value means of train, validation, test.
  Eigen::MatrixXd partition_means;
  std::uint64_t seed = 0;

  /// Largest absolute difference between any two partition means.
  double max_mean_gap() const;
};

/// Shuffles deterministically by seed and partitions 2:1:1
/// (train = ceil(n/2), validation = floor(rest/2), test gets the remainder).
/// Throws TooFewRows for fewer than 8 rows.
SplitDataset split(const EncodedMatrix& matrix, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Missingness

struct Mcar {
  double rate = 0.0;
};

/// P(missing) = logistic(logit(base_rate) + logistic_slope * (driver - 0.5)),
/// with driver the observed normalized value of driver_column.
struct Mar {
  std::string driver_column;
  double logistic_slope = 0.0;
  double base_rate = 0.0;
};

/// P(missing) = clamp(2 * rate * v) where v is the cell's own normalized value.
struct Mnar {
  double rate = 0.0;
};

using MissingnessMechanism = std::variant<Mcar, Mar, Mnar>;

enum class MaskGranularity {
  PerCell,  // independent draw for every targeted column
  PerRow,   // one draw per row masks all targeted columns together
};

/// Returns a copy with mask entries cleared per mechanism. A masked raw column
/// clears all of its encoded slots. Throws DriverIsTarget, UnknownColumn.
EncodedMatrix inject_missing(const EncodedMatrix& matrix, const MissingnessMechanism& mechanism,
                             std::span<const std::string> target_columns, std::uint64_t seed,
                             MaskGranularity granularity = MaskGranularity::PerCell);

// ---------------------------------------------------------------------------
// Synthetic survey generator (Gaussian copula)

struct CorrelationPair {
  std::string a;
  std::string b;
  double rho = 0.0;
};

/// Marginal for numeric and ordinal columns:
///   value = location + scale * (exp(skew * z) - 1) / skew   (linear when skew = 0)
/// clamped into the column's range and optionally rounded.
struct ShapedMarginal {
  double location = 0.0;
  double scale = 1.0;
  double skew = 0.0;
  bool integer = false;
};

/// Column drawn as floor(u * cap) where cap is another column's value in the
/// same row and u = Phi(z); keeps e.g. parity strictly below gravidity.
struct FractionOfMarginal {
  std::string cap_column;
};

/// Binary columns: P(1) = prevalence.
struct BernoulliMarginal {
  double prevalence = 0.5;
};

/// Categorical columns: label probabilities in label order.
struct CategoricalMarginal {
  std::vector<double> probabilities;
};

using Marginal = std::variant<ShapedMarginal, FractionOfMarginal, BernoulliMarginal, CategoricalMarginal>;

struct SynthesisSpec {
  std::vector<CorrelationPair> correlations;
  /// Keyed by column name; columns without an entry get a kind-based default.
  std::vector<std::pair<std::string, Marginal>> marginals;
};

SynthesisSpec default_synthesis_spec();

/// Throws BadCorrelationSpec (unknown column, |rho| > 1, not positive
/// semidefinite, FractionOf cycle).
SurveyTable synthesize(const Schema& schema, std::size_t n, std::uint64_t seed, const SynthesisSpec& spec);

}  // namespace imputekit
