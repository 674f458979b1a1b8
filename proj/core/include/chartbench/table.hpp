#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chartbench {

// One table cell. `numeric` is derived from `raw` at construction time and is
// present exactly when parse_numeric(raw) succeeds. Equality compares `raw`
// only, since `numeric` is a function of it.
struct Cell {
  std::string raw;
  std::optional<double> numeric;

  Cell() = default;
  static Cell of(std::string raw);
  static Cell of_number(double value);

  bool is_numeric() const { return numeric.has_value(); }

  friend bool operator==(const Cell& a, const Cell& b) { return a.raw == b.raw; }
};

struct TableRow {
  std::string label;
  std::vector<Cell> cells;

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

// Canonical in-memory form of a chart's data grid. Every row carries exactly
// col_headers.size() cells. The corner label is the cell above the row-label
// column and defaults to "Entity" (the shape extracted tables conventionally
// carry). `source_id` is identity metadata and does not take part in
// structural equality.
struct Table {
  std::optional<std::string> title;
  std::string corner_label = "Entity";
  std::vector<std::string> col_headers;
  std::vector<TableRow> rows;
  std::optional<std::string> source_id;

  std::size_t col_count() const { return col_headers.size(); }
  std::size_t row_count() const { return rows.size(); }
  bool empty_grid() const { return col_headers.empty() && rows.empty(); }

  friend bool operator==(const Table& a, const Table& b) {
    return a.title == b.title && a.corner_label == b.corner_label &&
           a.col_headers == b.col_headers && a.rows == b.rows;
  }
};

// One (row-header, column-header, value) triple. Tables are evaluated as
// unordered sets of these.
struct EntityMapping {
  std::string row;
  std::string col;
  Cell value;

  // Matching key: row and column text concatenated with no separator.
  std::string key() const { return row + col; }

  friend bool operator==(const EntityMapping&, const EntityMapping&) = default;
};

// Total function: trims whitespace, strips one leading currency symbol
// ($, euro, pound), a trailing "%", and thousands commas; understands signed
// decimals, scientific notation, and trailing magnitude words
// thousand/million/billion/trillion (case-insensitive). Anything else is
// absent.
std::optional<double> parse_numeric(std::string_view raw);

// Shortest decimal rendering that parses back to exactly `value`.
std::string format_number(double value);

// Linearized text format: cells joined by " | ", lines joined by the literal
// six-character token "<0x0A>" padded with single spaces. A real newline byte
// is not a line separator.
Table parse_linearized(std::string_view text);
std::string serialize_linearized(const Table& table);

// RFC-4180 CSV, UTF-8, first row headers, first column row labels.
Table from_csv(std::string_view bytes);

// Row-major entity view, one mapping per (row, column) cell.
std::vector<EntityMapping> to_entity_mappings(const Table& table);

}  // namespace chartbench
