#pragma once

#include "imputekit/data_model.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imputekit {

/// One parsed CSV field. `quoted` distinguishes `""` from an empty field.
struct CsvField {
  std::string text;
  bool quoted = false;
};
using CsvRecord = std::vector<CsvField>;

/// RFC-4180 reader: quoted fields, doubled quotes, embedded separators and
/// line breaks, LF or CRLF endings. Throws Parse on unterminated quotes.
std::vector<CsvRecord> parse_csv(std::istream& in);

/// Quotes a field only when it needs quoting.
std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Header row names the columns (any order, every schema column required);
/// an empty field is a missing cell. Throws Io, Parse, SchemaMismatch,
/// UnknownLabel.
SurveyTable read_survey_csv(const std::filesystem::path& path, const Schema& schema);
SurveyTable read_survey_csv(std::istream& in, const Schema& schema);

void write_survey_csv(const std::filesystem::path& path, const SurveyTable& table);
void write_survey_csv(std::ostream& out, const SurveyTable& table);

/// Shortest round-trip decimal text for a double.
std::string format_number(double value);

// ---------------------------------------------------------------------------
// Schema file
//
//   # comment
//   version = 1
//   age = numeric 12 50
//   education = ordinal 14
//   hiv = binary
//   race = categorical A B C D
//   rule = parity <= gravidity
//
// Column order follows line order.

struct SchemaFile {
  Schema schema;
  std::vector<OutlierRule> rules;
};

SchemaFile parse_schema(std::istream& in);
SchemaFile read_schema_file(const std::filesystem::path& path);
void write_schema(std::ostream& out, const SchemaFile& file);
void write_schema_file(const std::filesystem::path& path, const SchemaFile& file);

}  // namespace imputekit
