#include "imputekit/csv.hpp"
#include "imputekit/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

namespace imputekit {

std::vector<CsvRecord> parse_csv(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::vector<CsvRecord> records;
  CsvRecord record;
  CsvField field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field = {};
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // a blank line is not a record
    if (!(record.size() == 1 && record[0].text.empty() && !record[0].quoted)) records.push_back(std::move(record));
    record = {};
  };

  std::size_t i = 0;
  // UTF-8 byte order mark
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.text.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.quoted)
          throw Error(ErrorCode::Parse, fmt::format("stray quote at byte {}", i));
        in_quotes = true;
        field.quoted = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.text.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw Error(ErrorCode::Parse, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  return fmt::format("{}", value);
}

namespace {

Cell parse_cell(const CsvField& field, const Column& column, std::size_t line) {
  if (field.text.empty()) return std::monostate{};
  if (const auto* cat = std::get_if<CategoricalKind>(&column.kind)) {
    for (const auto& l : cat->labels)
      if (l == field.text) return field.text;
    throw Error(ErrorCode::UnknownLabel,
                fmt::format("line {}: '{}' is not a label of column '{}'", line, field.text, column.name));
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(field.text, &used);
    if (used == field.text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::Parse,
              fmt::format("line {}: '{}' is not a number (column '{}')", line, field.text, column.name));
}

}  // namespace

SurveyTable read_survey_csv(std::istream& in, const Schema& schema) {
  const auto records = parse_csv(in);
  if (records.empty()) throw Error(ErrorCode::Parse, "CSV has no header row");
  const auto& header = records.front();
  std::vector<std::size_t> source(schema.size(), header.size());
  for (std::size_t h = 0; h < header.size(); ++h) {
    const auto idx = schema.find(header[h].text);
    if (!idx) throw Error(ErrorCode::SchemaMismatch, fmt::format("CSV column '{}' not in schema", header[h].text));
    source[*idx] = h;
  }
  for (std::size_t c = 0; c < schema.size(); ++c)
    if (source[c] == header.size())
      throw Error(ErrorCode::SchemaMismatch, fmt::format("CSV lacks column '{}'", schema.column(c).name));

  SurveyTable table{schema, {}};
  table.rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size())
      throw Error(ErrorCode::Parse,
                  fmt::format("record {} has {} fields, header has {}", r + 1, rec.size(), header.size()));
    std::vector<Cell> row;
    row.reserve(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) row.push_back(parse_cell(rec[source[c]], schema.column(c), r + 1));
    table.rows.push_back(std::move(row));
  }
  validate(table);
  return table;
}

SurveyTable read_survey_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open '{}'", path.string()));
  return read_survey_csv(in, schema);
}

void write_survey_csv(std::ostream& out, const SurveyTable& table) {
  std::vector<std::string> fields;
  for (const auto& c : table.schema.columns()) fields.push_back(c.name);
  write_csv_row(out, fields);
  for (const auto& row : table.rows) {
    if (row.size() == 1 && is_missing(row[0])) {
      // a lone empty field would read back as a blank line
      out << "\"\"\n";
      continue;
    }
    fields.clear();
    for (const auto& cell : row) {
      if (is_missing(cell))
        fields.emplace_back();
      else if (const auto* d = std::get_if<double>(&cell))
        fields.push_back(format_number(*d));
      else
        fields.push_back(std::get<std::string>(cell));
    }
    write_csv_row(out, fields);
  }
}

void write_survey_csv(const std::filesystem::path& path, const SurveyTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path.string()));
  write_survey_csv(out, table);
}

}  // namespace imputekit
