#include "ccsv/format/csv.hpp"

#include <set>

#include "ccsv/error.hpp"

namespace ccsv {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void csv_error(const std::string& message, std::size_t line) {
  throw FormatError("CsvSyntax", "CSV line " + std::to_string(line) + ": " + message);
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::size_t> record_lines;

  std::size_t pos = 0;
  std::size_t line = 1;
  while (pos < text.size()) {
    // Blank physical line.
    if (text[pos] == '\n') {
      ++pos;
      ++line;
      continue;
    }
    if (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') {
      pos += 2;
      ++line;
      continue;
    }

    const std::size_t record_line = line;
    std::vector<std::string> record;
    std::string cell;
    for (;;) {
      if (pos < text.size() && text[pos] == '"') {
        ++pos;
        for (;;) {
          if (pos >= text.size()) csv_error("unterminated quoted field", record_line);
          const char c = text[pos];
          if (c == '"') {
            if (pos + 1 < text.size() && text[pos + 1] == '"') {
              cell += '"';
              pos += 2;
              continue;
            }
            ++pos;
            break;
          }
          if (c == '\n') ++line;
          cell += c;
          ++pos;
        }
        if (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          csv_error("unexpected character after closing quote", line);
        }
      } else {
        while (pos < text.size() && text[pos] != ',' && text[pos] != '\n' && text[pos] != '\r') {
          if (text[pos] == '"') csv_error("quote inside unquoted field", line);
          cell += text[pos++];
        }
      }
      record.push_back(std::move(cell));
      cell.clear();

      if (pos >= text.size()) break;
      if (text[pos] == ',') {
        ++pos;
        continue;
      }
      if (text[pos] == '\r') {
        if (pos + 1 < text.size() && text[pos + 1] == '\n') {
          pos += 2;
        } else {
          csv_error("bare carriage return", line);
        }
      } else {
        ++pos;
      }
      ++line;
      break;
    }
    records.push_back(std::move(record));
    record_lines.push_back(record_line);
  }

  if (records.empty()) throw FormatError("CsvSyntax", "CSV body has no header row");

  CsvTable table;
  std::set<std::string> seen;
  for (const auto& name : records.front()) {
    std::string trimmed = trim(name);
    if (trimmed.empty()) csv_error("empty column name in header", record_lines.front());
    if (!seen.insert(trimmed).second) csv_error("duplicate column name '" + trimmed + "'", record_lines.front());
    table.header.push_back(std::move(trimmed));
  }
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != table.header.size()) {
      csv_error("expected " + std::to_string(table.header.size()) + " cells, found " +
                    std::to_string(records[i].size()),
                record_lines[i]);
    }
    table.rows.push_back(std::move(records[i]));
  }
  return table;
}

namespace {

void write_cell(std::string& out, const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) {
    out += cell;
    return;
  }
  out += '"';
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
}

void write_record(std::string& out, const std::vector<std::string>& record) {
  for (std::size_t i = 0; i < record.size(); ++i) {
    if (i) out += ',';
    write_cell(out, record[i]);
  }
  out += '\n';
}

}  // namespace

std::string write_csv(const CsvTable& table) {
  std::string out;
  write_record(out, table.header);
  for (const auto& row : table.rows) {
    // A single empty cell would read back as a blank line; quote it.
    if (row.size() == 1 && row.front().empty()) {
      out += "\"\"\n";
      continue;
    }
    write_record(out, row);
  }
  return out;
}

}  // namespace ccsv
