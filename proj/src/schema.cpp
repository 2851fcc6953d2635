#include "imputekit/csv.hpp"
#include "imputekit/data_model.hpp"
#include "imputekit/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace imputekit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t slot_count(const ColumnKind& kind) {
  if (const auto* cat = std::get_if<CategoricalKind>(&kind)) return cat->labels.size();
  return 1;
}

void validate_column(const Column& c) {
  if (c.name.empty()) throw Error(ErrorCode::BadSchema, "column with empty name");
  std::visit(overloaded{
                 [&](const NumericKind& k) {
                   if (!(k.min < k.max))
                     throw Error(ErrorCode::BadSchema, fmt::format("numeric column '{}' needs min < max", c.name));
                 },
                 [&](const OrdinalKind& k) {
                   if (k.levels < 2)
                     throw Error(ErrorCode::BadSchema, fmt::format("ordinal column '{}' needs >= 2 levels", c.name));
                 },
                 [&](const CategoricalKind& k) {
                   std::set<std::string> distinct(k.labels.begin(), k.labels.end());
                   if (k.labels.size() < 2 || distinct.size() != k.labels.size())
                     throw Error(ErrorCode::BadSchema,
                                 fmt::format("categorical column '{}' needs >= 2 distinct labels", c.name));
                 },
                 [](const BinaryKind&) {},
             },
             c.kind);
}

bool same_kind(const ColumnKind& a, const ColumnKind& b) {
  if (a.index() != b.index()) return false;
  return std::visit(overloaded{
                        [&](const NumericKind& k) {
                          const auto& o = std::get<NumericKind>(b);
                          return k.min == o.min && k.max == o.max;
                        },
                        [&](const OrdinalKind& k) { return k.levels == std::get<OrdinalKind>(b).levels; },
                        [&](const CategoricalKind& k) { return k.labels == std::get<CategoricalKind>(b).labels; },
                        [](const BinaryKind&) { return true; },
                    },
                    a);
}

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& token, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Parse, fmt::format("schema line {}: '{}' is not a number", line, token));
  }
}

}  // namespace

Schema::Schema(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::set<std::string> names;
  for (const auto& c : columns_) {
    validate_column(c);
    if (!names.insert(c.name).second)
      throw Error(ErrorCode::BadSchema, fmt::format("duplicate column '{}'", c.name));
  }
  std::size_t next = 0;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const std::size_t n = slot_count(columns_[i].kind);
    slots_.push_back({next, n});
    for (std::size_t s = 0; s < n; ++s) slot_owner_.push_back(i);
    next += n;
  }
  width_ = next;
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorCode::UnknownColumn, fmt::format("no column named '{}'", name));
}

bool Schema::operator==(const Schema& other) const {
  if (columns_.size() != other.columns_.size()) return false;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name != other.columns_[i].name) return false;
    if (!same_kind(columns_[i].kind, other.columns_[i].kind)) return false;
  }
  return true;
}

bool is_categorical(const Column& column) { return std::holds_alternative<CategoricalKind>(column.kind); }

std::string kind_name(const ColumnKind& kind) {
  return std::visit(overloaded{
                        [](const NumericKind&) { return std::string("numeric"); },
                        [](const OrdinalKind&) { return std::string("ordinal"); },
                        [](const CategoricalKind&) { return std::string("categorical"); },
                        [](const BinaryKind&) { return std::string("binary"); },
                    },
                    kind);
}

Schema default_schema() {
  return Schema({
      {"age", NumericKind{12.0, 50.0}},
      {"education", OrdinalKind{14}},
      {"gravidity", NumericKind{0.0, 12.0}},
      {"parity", NumericKind{0.0, 12.0}},
      {"hiv", BinaryKind{}},
      {"race", CategoricalKind{{"A", "B", "C", "D"}}},
      {"province", CategoricalKind{{"north", "central", "south"}}},
      {"clinic", BinaryKind{}},
  });
}

// ---------------------------------------------------------------------------
// Schema file

SchemaFile parse_schema(std::istream& in) {
  std::vector<Column> columns;
  std::vector<OutlierRule> rules;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos || text.compare(eq, 2, "==") == 0)
      throw Error(ErrorCode::Parse, fmt::format("schema line {}: expected 'key = value'", line));
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key == "version") {
      if (value != "1") throw Error(ErrorCode::Parse, fmt::format("unsupported schema version '{}'", value));
      continue;
    }
    if (key == "rule") {
      rules.push_back(parse_rule(value));
      continue;
    }
    std::istringstream tokens(value);
    std::vector<std::string> parts;
    for (std::string t; tokens >> t;) parts.push_back(t);
    if (parts.empty()) throw Error(ErrorCode::Parse, fmt::format("schema line {}: missing kind", line));
    const std::string& kind = parts[0];
    if (kind == "numeric") {
      if (parts.size() != 3)
        throw Error(ErrorCode::Parse, fmt::format("schema line {}: numeric needs min and max", line));
      columns.push_back({key, NumericKind{parse_double(parts[1], line), parse_double(parts[2], line)}});
    } else if (kind == "ordinal") {
      if (parts.size() != 2) throw Error(ErrorCode::Parse, fmt::format("schema line {}: ordinal needs levels", line));
      columns.push_back({key, OrdinalKind{static_cast<int>(parse_double(parts[1], line))}});
    } else if (kind == "binary") {
      if (parts.size() != 1) throw Error(ErrorCode::Parse, fmt::format("schema line {}: binary takes no bounds", line));
      columns.push_back({key, BinaryKind{}});
    } else if (kind == "categorical") {
      columns.push_back({key, CategoricalKind{{parts.begin() + 1, parts.end()}}});
    } else {
      throw Error(ErrorCode::Parse, fmt::format("schema line {}: unknown kind '{}'", line, kind));
    }
  }
  if (columns.empty()) throw Error(ErrorCode::BadSchema, "schema declares no columns");
  SchemaFile file{Schema(std::move(columns)), std::move(rules)};
  for (const auto& r : file.rules) {
    file.schema.index_of(r.lhs);
    if (const auto* col = std::get_if<std::string>(&r.rhs)) file.schema.index_of(*col);
  }
  return file;
}

SchemaFile read_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open schema file '{}'", path.string()));
  return parse_schema(in);
}

void write_schema(std::ostream& out, const SchemaFile& file) {
  out << "# imputekit schema\nversion = 1\n";
  for (const auto& c : file.schema.columns()) {
    out << c.name << " = ";
    std::visit(overloaded{
                   [&](const NumericKind& k) { out << "numeric " << format_number(k.min) << ' ' << format_number(k.max); },
                   [&](const OrdinalKind& k) { out << "ordinal " << k.levels; },
                   [&](const CategoricalKind& k) {
                     out << "categorical";
                     for (const auto& l : k.labels) out << ' ' << l;
                   },
                   [&](const BinaryKind&) { out << "binary"; },
               },
               c.kind);
    out << '\n';
  }
  for (const auto& r : file.rules) out << "rule = " << r.to_string() << '\n';
}

void write_schema_file(const std::filesystem::path& path, const SchemaFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write schema file '{}'", path.string()));
  write_schema(out, file);
}

}  // namespace imputekit
