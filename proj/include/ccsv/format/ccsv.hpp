#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ccsv/format/csv.hpp"
#include "ccsv/rdf/graph.hpp"
#include "ccsv/rdf/vocab.hpp"
#include "ccsv/time.hpp"

namespace ccsv {

using rdf::Iri;

/// The delimiter line separating preamble from body: exactly "---",
/// optionally followed by spaces/tabs (and a CR before the LF).
inline constexpr std::string_view kDelimiter = "---";

/// Pieces of a CCSV source. `preamble + delimiter_line + body` reproduces the
/// source byte for byte; `delimiter_line` includes its line ending, if any.
struct SplitDocument {
  std::string preamble;
  std::string body;
  std::string delimiter_line;
};

/// Splits at the first delimiter line. Throws FormatError("MissingDelimiter").
SplitDocument split_document(std::string_view source);

struct MeasurementTypeSpec {
  Iri id;
  std::size_t column;
  Iri characteristic;
  Iri standard;
  Iri timestamp_ref;

  friend bool operator==(const MeasurementTypeSpec&, const MeasurementTypeSpec&) = default;
};

struct TimestampSpec {
  Iri id;
  std::size_t column;

  friend bool operator==(const TimestampSpec&, const TimestampSpec&) = default;
};

struct KnowledgeBaseRef {
  Iri id;
  std::string connection_url;
  friend bool operator==(const KnowledgeBaseRef&, const KnowledgeBaseRef&) = default;
};

struct ActivityRef {
  Iri id;
  Instant started_at;
  friend bool operator==(const ActivityRef&, const ActivityRef&) = default;
};

/// Typed view of a validated preamble graph. Measurement types and timestamps
/// are ordered by IRI.
struct PreambleModel {
  KnowledgeBaseRef knowledge_base;
  ActivityRef deployment;
  ActivityRef data_collection;
  Iri dataset;
  std::vector<MeasurementTypeSpec> measurement_types;
  std::vector<TimestampSpec> timestamps;

  /// The TimestampSpec a measurement type refers to.
  const TimestampSpec& timestamp_for(const MeasurementTypeSpec& mt) const;

  friend bool operator==(const PreambleModel&, const PreambleModel&) = default;
};

/// Lifts a preamble graph into a PreambleModel and checks every structural
/// invariant. `column_count` bounds the atColumn values.
///
/// Throws FormatError with codes PreambleIncomplete (subject = the missing
/// class or property as a prefixed name), DuplicateNode, PreambleInvalid,
/// ColumnOutOfRange.
PreambleModel build_preamble_model(const rdf::Graph& preamble, std::size_t column_count);

struct CcsvDocument {
  rdf::Graph preamble_graph;
  PreambleModel model;
  CsvTable body;
  std::string source_name;
};

struct CcsvOptions {
  /// Base for relative IRIs in the preamble; shared with the knowledge base
  /// so that `<deployment-x>` names the same resource in both.
  std::string base{rdf::kDefaultResourceBase};
};

/// Splits, parses and validates a whole CCSV document. Errors propagate as
/// FormatError or TurtleError.
CcsvDocument parse_ccsv(std::string_view source, std::string name, const CcsvOptions& options = {});

}  // namespace ccsv
