#include "stoplab/table.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "stoplab/types.hpp"

namespace stoplab {
namespace {

bool kind_matches(const Cell& cell, ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kInteger: return std::holds_alternative<std::int64_t>(cell);
    case ColumnKind::kReal: return std::holds_alternative<double>(cell);
    case ColumnKind::kBoolean: return std::holds_alternative<bool>(cell);
    case ColumnKind::kText: return std::holds_alternative<std::string>(cell);
  }
  return false;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

std::string quote(const std::string& text) {
  // Empty strings are quoted so they read back as text rather than as a missing cell.
  if (!text.empty() && text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_cell(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return "";
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, double>) return format_real(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return quote(v);
      },
      cell);
}

struct Field {
  std::string text;
  bool quoted = false;
};

// Splits one CSV record starting at pos; advances pos past the line break.
std::vector<Field> split_record(std::string_view text, std::size_t& pos) {
  std::vector<Field> fields;
  Field field;
  bool quoted = false;
  while (pos < text.size()) {
    const char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          field.text += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        field.text += c;
      }
    } else if (c == '"') {
      quoted = true;
      field.quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field = Field{};
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      field.text += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

Cell parse_cell(const Field& raw, ColumnKind kind) {
  const std::string& field = raw.text;
  if (field.empty() && !raw.quoted) return std::monostate{};
  switch (kind) {
    case ColumnKind::kInteger: {
      std::int64_t value = 0;
      const auto r = std::from_chars(field.data(), field.data() + field.size(), value);
      if (r.ec != std::errc() || r.ptr != field.data() + field.size())
        throw InvalidArgument("csv: bad integer '" + field + "'");
      return value;
    }
    case ColumnKind::kReal: {
      double value = 0.0;
      const auto r = std::from_chars(field.data(), field.data() + field.size(), value);
      if (r.ec != std::errc() || r.ptr != field.data() + field.size())
        throw InvalidArgument("csv: bad real '" + field + "'");
      return value;
    }
    case ColumnKind::kBoolean:
      if (field == "true") return true;
      if (field == "false") return false;
      throw InvalidArgument("csv: bad boolean '" + field + "'");
    case ColumnKind::kText: return field;
  }
  return std::monostate{};
}

bool same_cell(const Cell& a, const Cell& b) {
  if (a.index() != b.index()) return false;
  if (const double* x = std::get_if<double>(&a)) {
    const double y = std::get<double>(b);
    return (std::isnan(*x) && std::isnan(y)) || *x == y;
  }
  return a == b;
}

}  // namespace

Table::Table(std::vector<Column> columns) : columns_(std::move(columns)) {}

std::size_t Table::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i)
    if (columns_[i].name == name) return i;
  throw InvalidArgument("table: unknown column '" + std::string(name) + "'");
}

void Table::add_row(std::vector<Cell> row) {
  require(row.size() == columns_.size(), "table: row width does not match the header");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (std::holds_alternative<std::monostate>(row[i])) continue;
    require(kind_matches(row[i], columns_[i].kind),
            "table: cell kind does not match column '" + columns_[i].name + "'");
  }
  rows_.push_back(std::move(row));
}

void Table::append(const Table& other) {
  require(other.columns_.size() == columns_.size(), "table: appended layout differs");
  for (std::size_t i = 0; i < columns_.size(); ++i)
    require(other.columns_[i].name == columns_[i].name && other.columns_[i].kind == columns_[i].kind,
            "table: appended layout differs");
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

const Cell& Table::at(std::size_t row, std::string_view column) const {
  return rows_.at(row).at(column_index(column));
}

double Table::real(std::size_t row, std::string_view column) const {
  const Cell& cell = at(row, column);
  if (const double* v = std::get_if<double>(&cell)) return *v;
  if (const std::int64_t* v = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*v);
  return std::nan("");
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += quote(columns_[i].name);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json Table::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows_) {
    nlohmann::json object = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string& key = columns_[i].name;
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) object[key] = nullptr;
            else if constexpr (std::is_same_v<T, double>) {
              if (std::isfinite(v)) object[key] = v;
              else object[key] = nullptr;
            } else object[key] = v;
          },
          row[i]);
    }
    out.push_back(std::move(object));
  }
  return out;
}

Table Table::from_csv(std::string_view text, const std::vector<Column>& columns) {
  std::size_t pos = 0;
  const auto header = split_record(text, pos);
  require(header.size() == columns.size(), "csv: header width does not match");
  for (std::size_t i = 0; i < header.size(); ++i)
    require(header[i].text == columns[i].name, "csv: unexpected column '" + header[i].text + "'");
  Table table(columns);
  while (pos < text.size()) {
    const auto fields = split_record(text, pos);
    if (fields.size() == 1 && fields[0].text.empty() && !fields[0].quoted) continue;
    require(fields.size() == columns.size(), "csv: row width does not match the header");
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i)
      row.push_back(parse_cell(fields[i], columns[i].kind));
    table.add_row(std::move(row));
  }
  return table;
}

bool operator==(const Table& a, const Table& b) {
  if (a.columns_.size() != b.columns_.size() || a.rows_.size() != b.rows_.size()) return false;
  for (std::size_t i = 0; i < a.columns_.size(); ++i)
    if (a.columns_[i].name != b.columns_[i].name || a.columns_[i].kind != b.columns_[i].kind)
      return false;
  for (std::size_t r = 0; r < a.rows_.size(); ++r)
    for (std::size_t c = 0; c < a.columns_.size(); ++c)
      if (!same_cell(a.rows_[r][c], b.rows_[r][c])) return false;
  return true;
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::kCsv;
  if (text == "json") return OutputFormat::kJson;
  throw InvalidArgument("unknown output format '" + text + "' (expected csv or json)");
}

std::string render(const Table& table, OutputFormat format) {
  if (format == OutputFormat::kCsv) return table.to_csv();
  return table.to_json().dump(2) + "\n";
}

}  // namespace stoplab
