#include "imputekit/data_model.hpp"
#include "imputekit/error.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace imputekit;

namespace {

Schema single_numeric() { return Schema({Column{"x", NumericKind{0.0, 100.0}}}); }

SurveyTable numeric_table(const std::vector<double>& xs) {
  SurveyTable t{single_numeric(), {}};
  for (double x : xs) t.rows.push_back({Cell{x}});
  return t;
}

double column_mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = column_mean(a), mb = column_mean(b);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sxy += (a[i] - ma) * (b[i] - mb);
    sxx += (a[i] - ma) * (a[i] - ma);
    syy += (b[i] - mb) * (b[i] - mb);
  }
  return sxy / std::sqrt(sxx * syy);
}

void expect_code(ErrorCode code, const std::function<void()>& f) {
  try {
    f();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Schema, DefaultLayoutHasThirteenSlots) {
  const Schema s = default_schema();
  EXPECT_EQ(s.size(), 8u);
  // 6 scalar columns + 4 race labels + 3 province labels
  std::size_t width = 0;
  for (const auto& c : s.columns())
    width += std::holds_alternative<CategoricalKind>(c.kind) ? std::get<CategoricalKind>(c.kind).labels.size() : 1;
  EXPECT_EQ(width, 13u);
  EXPECT_EQ(s.encoded_width(), 13u);
}

TEST(Schema, RejectsInvalidKinds) {
  expect_code(ErrorCode::BadSchema, [] { Schema({Column{"x", NumericKind{1.0, 1.0}}}); });
  expect_code(ErrorCode::BadSchema, [] { Schema({Column{"x", OrdinalKind{1}}}); });
  expect_code(ErrorCode::BadSchema, [] { Schema({Column{"x", CategoricalKind{{"a", "a"}}}}); });
  expect_code(ErrorCode::BadSchema, [] { Schema({Column{"x", BinaryKind{}}, Column{"x", BinaryKind{}}}); });
}

TEST(Encode, MinMaxEndpoints) {
  const EncodedMatrix m = encode(numeric_table({10, 20, 30}));
  ASSERT_EQ(m.cols(), 1u);
  EXPECT_DOUBLE_EQ(m.values(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(m.values(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(m.values(2, 0), 1.0);
  EXPECT_TRUE(m.mask.all());
}

TEST(Encode, OneHotForCategorical) {
  const Schema s({Column{"c", CategoricalKind{{"A", "B", "C"}}}});
  SurveyTable t{s, {{Cell{std::string("B")}}, {Cell{std::string("A")}}}};
  const EncodedMatrix m = encode(t);
  ASSERT_EQ(m.cols(), 3u);
  EXPECT_EQ(m.values(0, 0), 0.0);
  EXPECT_EQ(m.values(0, 1), 1.0);
  EXPECT_EQ(m.values(0, 2), 0.0);
}

TEST(Encode, DefaultSchemaRowHasWidth13) {
  const SurveyTable t = synthesize(default_schema(), 50, 3, default_synthesis_spec());
  const EncodedMatrix m = encode(t);
  EXPECT_EQ(m.cols(), 13u);
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
    for (const char* name : {"race", "province"}) {
      const SlotRange s = t.schema.slots(t.schema.index_of(name));
      EXPECT_EQ(m.values.row(r).segment(s.first, s.count).sum(), 1.0);
    }
  }
}

TEST(Encode, ConstantColumnRejected) { expect_code(ErrorCode::ColumnConstant, [] { encode(numeric_table({5, 5, 5})); }); }

TEST(Encode, MissingCellsMaskAllSlotsWithPlaceholder) {
  const Schema s({Column{"x", NumericKind{0, 10}}, Column{"c", CategoricalKind{{"A", "B"}}}});
  SurveyTable t{s, {{Cell{1.0}, Cell{}}, {Cell{2.0}, Cell{std::string("A")}}, {Cell{}, Cell{std::string("B")}}}};
  const EncodedMatrix m = encode(t);
  EXPECT_FALSE(m.mask(0, 1));
  EXPECT_FALSE(m.mask(0, 2));
  EXPECT_EQ(m.values(0, 1), kMaskedPlaceholder);
  EXPECT_FALSE(m.mask(2, 0));
  EXPECT_EQ(m.masked_count(), 3u);
}

TEST(Encode, ObservedValuesInUnitInterval) {
  const EncodedMatrix m = encode(synthesize(default_schema(), 500, 11, default_synthesis_spec()));
  EXPECT_GE(m.values.minCoeff(), 0.0);
  EXPECT_LE(m.values.maxCoeff(), 1.0);
}

TEST(Decode, ArgmaxAndInverseScaling) {
  const Schema s({Column{"x", NumericKind{0, 100}}, Column{"c", CategoricalKind{{"A", "B", "C"}}}});
  SurveyTable t{s, {{Cell{10.0}, Cell{std::string("A")}}, {Cell{30.0}, Cell{std::string("C")}}}};
  EncodedMatrix m = encode(t);
  m.values(0, 0) = 0.5;
  m.values.row(0).segment(1, 3) << 0.2, 0.7, 0.1;
  const SurveyTable d = decode(m);
  EXPECT_DOUBLE_EQ(std::get<double>(d.rows[0][0]), 20.0);
  EXPECT_EQ(std::get<std::string>(d.rows[0][1]), "B");
}

TEST(Decode, RoundTripOnFullyObservedTable) {
  const SurveyTable t = synthesize(default_schema(), 300, 5, default_synthesis_spec());
  const SurveyTable d = decode(encode(t));
  ASSERT_EQ(d.n_rows(), t.n_rows());
  for (std::size_t r = 0; r < t.n_rows(); ++r) {
    for (std::size_t c = 0; c < t.schema.size(); ++c) {
      if (const auto* v = std::get_if<double>(&t.rows[r][c]))
        EXPECT_NEAR(std::get<double>(d.rows[r][c]), *v, 1e-9);
      else
        EXPECT_EQ(d.rows[r][c], t.rows[r][c]);
    }
  }
}

TEST(Decode, WidthMismatchRejected) {
  EncodedMatrix m = encode(numeric_table({1, 2, 3}));
  expect_code(ErrorCode::ShapeMismatch, [&] { decode(m, default_schema()); });
}

TEST(Outliers, ParityAboveGravidityFlagged) {
  const Schema s({Column{"gravidity", NumericKind{0, 12}}, Column{"parity", NumericKind{0, 12}},
                  Column{"age", NumericKind{-10, 50}}});
  SurveyTable t{s, {{Cell{2.0}, Cell{3.0}, Cell{20.0}}, {Cell{2.0}, Cell{1.0}, Cell{20.0}}, {Cell{1.0}, Cell{0.0}, Cell{-4.0}}}};
  const std::vector<OutlierRule> rules{parse_rule("parity <= gravidity"), parse_rule("age >= 0")};
  const auto v = check_outliers(t, rules);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], (Violation{0, 0}));
  EXPECT_EQ(v[1], (Violation{2, 1}));
}

TEST(Outliers, MissingCellsNeverViolate) {
  const Schema s({Column{"gravidity", NumericKind{0, 12}}, Column{"parity", NumericKind{0, 12}}});
  SurveyTable t{s, {{Cell{}, Cell{3.0}}}};
  const std::vector<OutlierRule> rules{parse_rule("parity <= gravidity")};
  EXPECT_TRUE(check_outliers(t, rules).empty());
}

TEST(Outliers, UnknownColumn) {
  const auto t = numeric_table({1, 2});
  const std::vector<OutlierRule> rules{parse_rule("y >= 0")};
  expect_code(ErrorCode::UnknownColumn, [&] { check_outliers(t, rules); });
}

TEST(Outliers, ParseRuleForms) {
  const auto r = parse_rule("  age>=0 ");
  EXPECT_EQ(r.lhs, "age");
  EXPECT_EQ(r.op, Comparison::GreaterEqual);
  EXPECT_EQ(std::get<double>(r.rhs), 0.0);
  expect_code(ErrorCode::Parse, [] { parse_rule("age 0"); });
}

TEST(Split, TwelveRowsGiveSixThreeThree) {
  std::vector<double> xs(12);
  std::iota(xs.begin(), xs.end(), 0.0);
  const auto s = split(encode(numeric_table(xs)), 1);
  EXPECT_EQ(s.train.rows(), 6u);
  EXPECT_EQ(s.validation.rows(), 3u);
  EXPECT_EQ(s.test.rows(), 3u);
}

TEST(Split, PartitionSizesForFullSurvey) {
  const std::size_t n = 12089;
  const std::size_t train = (n + 1) / 2;
  const std::size_t validation = (n - train) / 2;
  EXPECT_EQ(train, 6045u);
  EXPECT_EQ(validation, 3022u);
  EXPECT_EQ(n - train - validation, 3022u);
  std::vector<double> xs(n);
  std::iota(xs.begin(), xs.end(), 0.0);
  SurveyTable t{Schema({Column{"x", NumericKind{0, 20000}}}), {}};
  for (double x : xs) t.rows.push_back({Cell{x}});
  const auto s = split(encode(t), 9);
  EXPECT_EQ(s.train.rows(), 6045u);
  EXPECT_EQ(s.validation.rows(), 3022u);
  EXPECT_EQ(s.test.rows(), 3022u);
}

TEST(Split, DisjointCoverAndDeterministic) {
  std::vector<double> xs(101);
  std::iota(xs.begin(), xs.end(), 0.0);
  const EncodedMatrix m = encode(numeric_table(xs));
  const auto a = split(m, 42);
  const auto b = split(m, 42);
  EXPECT_EQ(a.train_rows, b.train_rows);
  EXPECT_EQ(a.test_rows, b.test_rows);
  std::set<std::size_t> all;
  for (const auto* part : {&a.train_rows, &a.validation_rows, &a.test_rows}) all.insert(part->begin(), part->end());
  EXPECT_EQ(all.size(), 101u);
  EXPECT_EQ(a.train_rows.size() + a.validation_rows.size() + a.test_rows.size(), 101u);
  EXPECT_EQ(a.partition_means.rows(), 3);
  EXPECT_GE(a.max_mean_gap(), 0.0);
}

TEST(Split, TooFewRows) {
  expect_code(ErrorCode::TooFewRows, [] { split(encode(numeric_table({1, 2, 3, 4, 5, 6, 7})), 0); });
}

TEST(Synthesize, SingleRowObeysRules) {
  const SurveyTable t = synthesize(default_schema(), 1, 17, default_synthesis_spec());
  ASSERT_EQ(t.n_rows(), 1u);
  EXPECT_NO_THROW(validate(t));
  EXPECT_TRUE(check_outliers(t, default_rules()).empty());
}

TEST(Synthesize, DeterministicPerSeed) {
  const auto a = synthesize(default_schema(), 200, 5, default_synthesis_spec());
  const auto b = synthesize(default_schema(), 200, 5, default_synthesis_spec());
  const auto c = synthesize(default_schema(), 200, 6, default_synthesis_spec());
  EXPECT_EQ(a.rows, b.rows);
  EXPECT_NE(a.rows, c.rows);
}

TEST(Synthesize, ParityNeverExceedsGravidity) {
  const auto t = synthesize(default_schema(), 5000, 8, default_synthesis_spec());
  EXPECT_TRUE(check_outliers(t, default_rules()).empty());
}

TEST(Synthesize, RequestedCorrelationIsReproduced) {
  SynthesisSpec spec;
  spec.correlations = {{"age", "education", 0.6}};
  const auto t = synthesize(default_schema(), 5000, 21, spec);
  const double r = pearson(t.numeric_column(0), t.numeric_column(1));
  EXPECT_NEAR(r, 0.6, 0.1);
}

TEST(Synthesize, AgeIsRightSkewed) {
  const auto t = synthesize(default_schema(), 12089, 1, default_synthesis_spec());
  auto age = t.numeric_column(0);
  const double mean = column_mean(age);
  std::nth_element(age.begin(), age.begin() + age.size() / 2, age.end());
  EXPECT_GT(mean, age[age.size() / 2]);
}

TEST(Synthesize, DefaultCorrelationMatrixIsValid) {
  EXPECT_NO_THROW(synthesize(default_schema(), 10, 1, default_synthesis_spec()));
}

TEST(Synthesize, RejectsNonPsdSpec) {
  SynthesisSpec spec;
  spec.correlations = {{"age", "education", 0.9}, {"age", "gravidity", 0.9}, {"education", "gravidity", -0.9}};
  expect_code(ErrorCode::BadCorrelationSpec, [&] { synthesize(default_schema(), 10, 1, spec); });
  spec.correlations = {{"age", "nope", 0.1}};
  expect_code(ErrorCode::BadCorrelationSpec, [&] { synthesize(default_schema(), 10, 1, spec); });
}

class MissingTest : public ::testing::Test {
 protected:
  EncodedMatrix base = encode(synthesize(default_schema(), 10000, 4, default_synthesis_spec()));
  std::vector<std::string> age{"age"};
};

TEST_F(MissingTest, ZeroRateLeavesMaskUnchanged) {
  const auto m = inject_missing(base, Mcar{0.0}, age, 1);
  EXPECT_TRUE((m.mask == base.mask).all());
}

TEST_F(MissingTest, UnitRateMasksWholeColumn) {
  const auto m = inject_missing(base, Mcar{1.0}, age, 1);
  EXPECT_FALSE(m.mask.col(0).any());
  EXPECT_TRUE(m.mask.rightCols(12).all());
  EXPECT_TRUE(base.mask.all());  // original untouched
}

TEST_F(MissingTest, McarFractionWithinThreeSigma) {
  const double r = 0.3;
  const auto m = inject_missing(base, Mcar{r}, age, 2);
  const double n = static_cast<double>(base.rows());
  const double frac = static_cast<double>((!m.mask.col(0)).count()) / n;
  EXPECT_NEAR(frac, r, 3.0 * std::sqrt(r * (1 - r) / n));
}

TEST_F(MissingTest, MarPositiveSlopeRaisesDriverMean) {
  const std::vector<std::string> target{"education"};
  const auto m = inject_missing(base, Mar{"age", 6.0, 0.3}, target, 3);
  const auto edu = static_cast<Eigen::Index>(base.schema.slots(1).first);
  double masked = 0, unmasked = 0;
  int nm = 0, nu = 0;
  for (Eigen::Index r = 0; r < m.values.rows(); ++r) {
    if (m.mask(r, edu)) {
      unmasked += base.values(r, 0);
      ++nu;
    } else {
      masked += base.values(r, 0);
      ++nm;
    }
  }
  ASSERT_GT(nm, 100);
  EXPECT_GT(masked / nm, unmasked / nu);
}

TEST_F(MissingTest, MaskedCategoricalClearsAllSlots) {
  const std::vector<std::string> target{"race"};
  const auto m = inject_missing(base, Mcar{1.0}, target, 3);
  const SlotRange s = base.schema.slots(base.schema.index_of("race"));
  for (std::size_t k = 0; k < s.count; ++k) EXPECT_FALSE(m.mask.col(s.first + k).any());
}

TEST_F(MissingTest, PerRowGranularityMasksTogether) {
  const std::vector<std::string> targets{"age", "education", "hiv"};
  const auto m = inject_missing(base, Mcar{0.4}, targets, 5, MaskGranularity::PerRow);
  for (Eigen::Index r = 0; r < m.mask.rows(); ++r) {
    EXPECT_EQ(m.mask(r, 0), m.mask(r, 1));
    EXPECT_EQ(m.mask(r, 0), m.mask(r, 4));
  }
}

TEST_F(MissingTest, DriverMayNotBeTarget) {
  expect_code(ErrorCode::DriverIsTarget, [&] { inject_missing(base, Mar{"age", 1.0, 0.2}, age, 1); });
}

TEST_F(MissingTest, ProbabilitiesValidated) {
  expect_code(ErrorCode::BadConfig, [&] { inject_missing(base, Mcar{1.5}, age, 1); });
}
