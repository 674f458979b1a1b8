#include "chartbench/table.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

#include "chartbench/error.hpp"

namespace chartbench {
namespace {

constexpr std::string_view kLineToken = "<0x0A>";

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool strip_prefix(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) == prefix) {
    s.remove_prefix(prefix.size());
    return true;
  }
  return false;
}

bool strip_suffix_ci(std::string_view& s, std::string_view word) {
  if (s.size() < word.size()) return false;
  std::string_view tail = s.substr(s.size() - word.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(tail[i])) != word[i]) return false;
  }
  s.remove_suffix(word.size());
  return true;
}

std::vector<std::string_view> split_on_token(std::string_view s, std::string_view token) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = s.find(token, pos);
    if (hit == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, hit - pos));
    pos = hit + token.size();
  }
}

std::vector<std::string> split_cells(std::string_view line) {
  std::vector<std::string> out;
  for (std::string_view field : split_on_token(line, "|")) {
    out.emplace_back(trim_view(field));
  }
  return out;
}

void check_serializable(std::string_view text, const char* what) {
  if (text.find('|') != std::string_view::npos ||
      text.find(kLineToken) != std::string_view::npos) {
    raise(Errc::ForbiddenCharacter,
          std::string(what) + " contains a cell or line separator: \"" + std::string(text) + "\"");
  }
}

}  // namespace

Cell Cell::of(std::string raw) {
  Cell c;
  c.numeric = parse_numeric(raw);
  c.raw = std::move(raw);
  return c;
}

Cell Cell::of_number(double value) { return Cell::of(format_number(value)); }

std::optional<double> parse_numeric(std::string_view raw) {
  std::string_view s = trim_view(raw);
  if (s.empty()) return std::nullopt;

  // At most one leading currency symbol. Euro and pound are multi-byte UTF-8.
  for (std::string_view currency : {"$", "\xe2\x82\xac", "\xc2\xa3"}) {
    if (strip_prefix(s, currency)) break;
  }
  s = trim_view(s);

  double multiplier = 1.0;
  if (!s.empty() && s.back() == '%') {
    s.remove_suffix(1);
    s = trim_view(s);
  } else {
    static constexpr std::array<std::pair<std::string_view, double>, 4> kUnits{{
        {"trillion", 1e12},
        {"billion", 1e9},
        {"million", 1e6},
        {"thousand", 1e3},
    }};
    for (const auto& [word, mult] : kUnits) {
      if (strip_suffix_ci(s, word)) {
        multiplier = mult;
        s = trim_view(s);
        break;
      }
    }
  }
  if (s.empty()) return std::nullopt;

  std::string digits;
  digits.reserve(s.size());
  for (char c : s) {
    if (c != ',') digits.push_back(c);
  }
  // std::from_chars accepts only '-'; tolerate an explicit plus sign.
  if (digits.size() > 1 && digits[0] == '+' &&
      (std::isdigit(static_cast<unsigned char>(digits[1])) || digits[1] == '.')) {
    digits.erase(digits.begin());
  }
  if (digits.empty()) return std::nullopt;

  double value = 0.0;
  const char* first = digits.data();
  const char* last = first + digits.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value * multiplier;
}

std::string format_number(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return "0";
  return std::string(buf, end);
}

std::string serialize_linearized(const Table& table) {
  if (table.empty_grid() && !table.title) return "";

  if (table.title) check_serializable(*table.title, "title");
  check_serializable(table.corner_label, "corner label");
  for (const std::string& h : table.col_headers) check_serializable(h, "column header");
  for (const TableRow& row : table.rows) {
    check_serializable(row.label, "row label");
    for (const Cell& cell : row.cells) check_serializable(cell.raw, "cell");
  }

  auto join = [](const std::vector<std::string>& fields, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += sep;
      out += fields[i];
    }
    return out;
  };

  std::vector<std::string> lines;
  if (table.title) lines.push_back("TITLE | " + *table.title);
  if (!table.empty_grid()) {
    std::vector<std::string> header{table.corner_label};
    header.insert(header.end(), table.col_headers.begin(), table.col_headers.end());
    lines.push_back(join(header, " | "));
    for (const TableRow& row : table.rows) {
      std::vector<std::string> fields{row.label};
      for (const Cell& cell : row.cells) fields.push_back(cell.raw);
      lines.push_back(join(fields, " | "));
    }
  }
  return join(lines, " <0x0A> ");
}

Table parse_linearized(std::string_view text) {
  Table table;
  if (trim_view(text).empty()) return table;

  std::vector<std::vector<std::string>> lines;
  for (std::string_view raw_line : split_on_token(text, kLineToken)) {
    lines.push_back(split_cells(raw_line));
  }
  // Trailing line separators leave empty tail lines; ignore them.
  while (!lines.empty() && lines.back().size() == 1 && lines.back()[0].empty()) {
    lines.pop_back();
  }
  if (lines.empty()) return table;

  std::size_t first_grid_line = 0;
  if (lines[0].size() == 1 && lines.size() > 1 && lines[1].size() > 1) {
    table.title = lines[0][0];
    first_grid_line = 1;
  } else if (lines[0].size() == 2 && lines[0][0] == "TITLE") {
    // Deplot-style explicit title line.
    table.title = lines[0][1];
    first_grid_line = 1;
  }
  if (first_grid_line >= lines.size()) return table;

  const std::vector<std::string>& header = lines[first_grid_line];
  table.corner_label = header[0];
  table.col_headers.assign(header.begin() + 1, header.end());

  for (std::size_t i = first_grid_line + 1; i < lines.size(); ++i) {
    const std::vector<std::string>& fields = lines[i];
    if (fields.size() != header.size()) {
      raise(Errc::RaggedRow, "line " + std::to_string(i) + " has " +
                                 std::to_string(fields.size()) + " cells, expected " +
                                 std::to_string(header.size()));
    }
    TableRow row;
    row.label = fields[0];
    row.cells.reserve(fields.size() - 1);
    for (std::size_t j = 1; j < fields.size(); ++j) {
      row.cells.push_back(Cell::of(fields[j]));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table from_csv(std::string_view bytes) {
  // Strip a UTF-8 BOM if present.
  strip_prefix(bytes, "\xef\xbb\xbf");

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool any_char = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < bytes.size(); ++i) {
    char c = bytes[i];
    any_char = true;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      if (!field.empty() || field_was_quoted) {
        raise(Errc::MalformedCsv, "quote inside unquoted field at byte " + std::to_string(i));
      }
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) raise(Errc::MalformedCsv, "unbalanced quote at end of input");
  if (!field.empty() || !record.empty() || (any_char && bytes.back() != '\n')) {
    end_record();
  }
  // A file ending in a newline yields no dangling record; an entirely empty
  // trailing line would have been one empty field.
  while (!records.empty() && records.back().size() == 1 && records.back()[0].empty()) {
    records.pop_back();
  }

  Table table;
  if (records.empty()) return table;

  const std::vector<std::string>& header = records[0];
  table.corner_label = header[0];
  table.col_headers.assign(header.begin() + 1, header.end());
  for (std::size_t i = 1; i < records.size(); ++i) {
    const std::vector<std::string>& fields = records[i];
    if (fields.size() != header.size()) {
      raise(Errc::RaggedRow, "record " + std::to_string(i) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(header.size()));
    }
    TableRow row;
    row.label = fields[0];
    for (std::size_t j = 1; j < fields.size(); ++j) {
      row.cells.push_back(Cell::of(fields[j]));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<EntityMapping> to_entity_mappings(const Table& table) {
  std::vector<EntityMapping> out;
  out.reserve(table.row_count() * table.col_count());
  for (const TableRow& row : table.rows) {
    for (std::size_t j = 0; j < row.cells.size(); ++j) {
      out.push_back(EntityMapping{row.label, table.col_headers[j], row.cells[j]});
    }
  }
  return out;
}

}  // namespace chartbench
