#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "stoplab/types.hpp"

namespace stoplab {

// Every emitted table starts with this column.
inline constexpr std::int64_t kSchemaVersion = 1;
inline constexpr const char* kSchemaColumn = "schema_version";

enum class ColumnKind { kInteger, kReal, kBoolean, kText };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kReal;
};

// Empty cells (std::monostate) serialize as an empty CSV field and JSON null.
using Cell = std::variant<std::monostate, std::int64_t, double, bool, std::string>;

class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns);

  [[nodiscard]] const std::vector<Column>& columns() const { return columns_; }
  [[nodiscard]] const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  [[nodiscard]] std::size_t column_index(std::string_view name) const;

  // Cells must match the column kinds (or be empty).
  void add_row(std::vector<Cell> row);
  void append(const Table& other);

  [[nodiscard]] const Cell& at(std::size_t row, std::string_view column) const;
  [[nodiscard]] double real(std::size_t row, std::string_view column) const;

  // Header row then one line per row, "\n" terminated. Reals use the
  // shortest representation that reads back to the same double.
  [[nodiscard]] std::string to_csv() const;
  [[nodiscard]] nlohmann::json to_json() const;

  // Inverse of to_csv for a known column layout; the header must match.
  static Table from_csv(std::string_view text, const std::vector<Column>& columns);

  friend bool operator==(const Table& a, const Table& b);

 private:
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
};

enum class OutputFormat { kCsv, kJson };

OutputFormat parse_format(const std::string& text);
std::string render(const Table& table, OutputFormat format);

}  // namespace stoplab
