#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccsv/format/ccsv.hpp"
#include "ccsv/kb/knowledge_base.hpp"
#include "ccsv/time.hpp"

namespace ccsv {

/// One observation with its full context; the unit of indexing. IRI fields
/// hold absolute IRIs. `entity` is empty when the characteristic has no
/// associated entity; platform fields and coordinates are empty when the
/// deployment has no platform (degraded load).
struct MeasurementRecord {
  std::string record_id;
  std::string value;
  Instant timestamp;
  std::string entity;
  std::string characteristic;
  std::string unit;
  std::string instrument;
  std::string instrument_label;
  std::string platform;
  std::string platform_label;
  std::string latitude;
  std::string longitude;
  std::string data_collection;
  std::string dataset;
  std::string source;

  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

/// Deterministic identity: hex of the first 16 bytes of
/// SHA-256(dataset 0x1F measurement_type 0x1F row_index).
std::string make_record_id(std::string_view dataset, std::string_view measurement_type, std::size_t row_index);

inline constexpr std::string_view kSkipBadTimestamp = "unparseable timestamp";
inline constexpr std::string_view kSkipEmptyValue = "empty value";

struct LoadReport {
  std::string source;
  std::string dataset;
  std::size_t rows = 0;
  std::size_t measurement_types = 0;
  std::size_t records_emitted = 0;
  /// Skip reason -> number of (row, measurement type) pairs skipped.
  std::map<std::string, std::size_t> skipped;
  std::vector<std::string> warnings;
  std::string normalized_csv_path;
  std::chrono::microseconds duration{0};

  std::size_t total_skipped() const;
};

/// Metadata columns appended by normalize(), in order. `_entity` follows them
/// when any measurement type has an associated entity.
inline constexpr std::array<std::string_view, 9> kMetadataColumns = {
    "_instrument", "_instrument_label", "_platform", "_platform_label", "_lat",
    "_long",       "_characteristic",   "_unit",     "_data_collection",
};
inline constexpr std::string_view kEntityColumn = "_entity";

/// Body plus metadata columns. Original cells are copied verbatim. With more
/// than one measurement type, `_characteristic`, `_unit` and `_entity` hold the
/// per-type values joined with '|' in measurement-type order.
/// `entities` is indexed like doc.model.measurement_types; pass {} to omit `_entity`.
CsvTable normalize(const CcsvDocument& doc, const DeploymentContext& ctx,
                   const std::vector<std::optional<Iri>>& entities = {});

struct LoadResult {
  std::vector<MeasurementRecord> records;
  CsvTable normalized;
  LoadReport report;
};

/// Resolves the document's deployment, emits one record per (row, measurement
/// type) and builds the normalized table. Rows whose timestamp cell does not
/// parse, or whose value cell is empty, are skipped and counted.
///
/// Throws ResolutionError for an unknown deployment or a deployment without
/// instrument. A missing platform degrades the load (warning, empty location).
LoadResult load(const CcsvDocument& doc, const KnowledgeBase& kb);

/// `<dir>/<stem>.normalized.csv` next to `source`.
std::filesystem::path normalized_path_for(const std::filesystem::path& source);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace ccsv
