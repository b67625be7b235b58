#pragma once

#include <stdexcept>
#include <string>

namespace ccsv {

/// Base of every error the library throws. `code()` is a stable identifier
/// (e.g. "MissingDelimiter", "UnknownDeployment") suitable for exit-code and
/// API-error mapping; `subject()` names the offending IRI or term if any.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, std::string subject = {})
      : std::runtime_error(message), code_(std::move(code)), subject_(std::move(subject)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  std::string code_;
  std::string subject_;
};

/// Turtle reader failure. Codes: "TurtleSyntax", "UnknownPrefix", "Unsupported".
class TurtleError : public Error {
 public:
  TurtleError(std::string code, const std::string& message, std::size_t line, std::size_t column)
      : Error(std::move(code),
              message + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// CCSV structure errors: "MissingDelimiter", "CsvSyntax", "PreambleIncomplete",
/// "PreambleInvalid", "ColumnOutOfRange", "DuplicateNode".
class FormatError : public Error {
  using Error::Error;
};

/// Deployment resolution: "UnknownDeployment", "MissingInstrument", "MissingPlatform",
/// "MultipleInstruments", "MultiplePlatforms", "NotAnInstrument", "NotAPlatform",
/// "InvalidCoordinate".
class ResolutionError : public Error {
  using Error::Error;
};

/// Index and query errors: "UnknownField", "NotFacetable", "InvalidQuery", "SchemaMismatch".
class IndexError : public Error {
  using Error::Error;
};

/// Snapshot persistence: "VersionMismatch", "CorruptSnapshot", "SnapshotIO".
class SnapshotError : public Error {
  using Error::Error;
};

/// Configuration file problems: "ConfigSyntax", "ConfigInvalid", "ConfigIO".
class ConfigError : public Error {
  using Error::Error;
};

}  // namespace ccsv
