#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ccsv {

/// A header row plus data rows; every row has exactly header.size() cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_count() const noexcept { return header.size(); }
  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

/// RFC 4180 reader: comma separator, double-quote quoting with "" escapes,
/// LF or CRLF line ends, first record is the header. Empty physical lines
/// between records are ignored. Header names are trimmed and must be unique.
/// Throws FormatError("CsvSyntax") with the 1-based line number.
CsvTable parse_csv(std::string_view text);

/// Writes `table` with LF line ends, quoting only cells that need it.
std::string write_csv(const CsvTable& table);

}  // namespace ccsv
