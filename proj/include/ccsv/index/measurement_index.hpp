#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ccsv/loader/loader.hpp"
#include "ccsv/time.hpp"

namespace ccsv {

enum class FieldKind { Keyword, Instant, Decimal, Text };

std::string_view to_string(FieldKind kind) noexcept;

/// Record fields known to the index, in MeasurementRecord declaration order.
enum class FieldId : std::uint8_t {
  RecordId,
  Value,
  Timestamp,
  Entity,
  Characteristic,
  Unit,
  Instrument,
  InstrumentLabel,
  Platform,
  PlatformLabel,
  Latitude,
  Longitude,
  DataCollection,
  Dataset,
  Source,
};
inline constexpr std::size_t kFieldCount = 15;

std::string_view field_name(FieldId id) noexcept;
std::optional<FieldId> field_id(std::string_view name) noexcept;

/// The field value as text: timestamps in ISO 8601, everything else verbatim.
std::string field_value(const MeasurementRecord& record, FieldId id);

struct FieldSpec {
  std::string name;
  FieldKind kind;
  bool facetable = false;
  bool stored = true;
};

/// Per-field kinds and flags. Invariants (checked on construction): names are
/// unique record fields; facetable implies keyword.
class FieldSchema {
 public:
  explicit FieldSchema(std::vector<FieldSpec> fields);

  /// Every record field; facetable: instrument, platform, characteristic,
  /// unit, data_collection unless `facets` overrides the list.
  static FieldSchema standard(const std::vector<std::string>& facets = {});

  const std::vector<FieldSpec>& fields() const noexcept { return fields_; }
  const FieldSpec* find(std::string_view name) const noexcept;
  bool contains(FieldId id) const noexcept { return present_[static_cast<std::size_t>(id)]; }
  std::vector<std::string> facetable() const;

  /// Stable fingerprint of names, kinds and flags; snapshots carry it.
  std::uint64_t fingerprint() const;

 private:
  std::vector<FieldSpec> fields_;
  std::array<bool, kFieldCount> present_{};
};

struct SortSpec {
  std::string field = "timestamp";
  bool descending = false;
};

struct FacetedQuery {
  /// Equality terms, all of which must hold.
  std::vector<std::pair<std::string, std::string>> filters;
  /// Half-open [from, to) on the record timestamp.
  std::optional<Instant> from;
  std::optional<Instant> to;
  std::vector<std::string> facets;
  std::size_t offset = 0;
  std::size_t limit = 20;
  SortSpec sort;

  static constexpr std::size_t kMaxLimit = 1000;
};

struct FacetCount {
  std::string value;
  std::size_t count;
  friend bool operator==(const FacetCount&, const FacetCount&) = default;
};

struct SearchResult {
  std::size_t total = 0;
  std::size_t offset = 0;
  std::size_t limit = 0;
  std::vector<MeasurementRecord> records;
  /// Per requested facet field: counts over the whole filtered set, ordered by
  /// count descending, then value ascending.
  std::map<std::string, std::vector<FacetCount>> facets;
};

/// In-memory inverted index over MeasurementRecords with exact-match filters,
/// time ranges, sorting, paging and facet counts.
///
/// Readers (search, size, snapshot) run concurrently; writers (index_records,
/// restore) are exclusive and publish a whole batch at once.
class MeasurementIndex {
 public:
  explicit MeasurementIndex(FieldSchema schema = FieldSchema::standard());

  MeasurementIndex(const MeasurementIndex&) = delete;
  MeasurementIndex& operator=(const MeasurementIndex&) = delete;

  const FieldSchema& schema() const noexcept { return schema_; }

  /// Adds or replaces (by record_id) every record. Validates the whole batch
  /// first; on IndexError("SchemaMismatch" / "InvalidRecord") nothing changes.
  /// Returns the number of records added or replaced.
  std::size_t index_records(const std::vector<MeasurementRecord>& records);

  /// Throws IndexError("UnknownField" / "NotFacetable" / "InvalidQuery").
  SearchResult search(const FacetedQuery& query) const;

  std::size_t size() const;

  /// Serialized snapshot (see docs/snapshot-format.md).
  std::string snapshot_bytes() const;
  /// Replaces the contents from snapshot bytes. Throws SnapshotError
  /// ("CorruptSnapshot" / "VersionMismatch"); the index is untouched on error.
  void restore_bytes(std::string_view bytes);

  /// Writes via a temporary file and rename.
  void snapshot(const std::filesystem::path& path) const;
  void restore(const std::filesystem::path& path);

  static constexpr std::uint32_t kSnapshotVersion = 1;

 private:
  struct Data {
    std::vector<MeasurementRecord> docs;
    std::unordered_map<std::string, std::uint32_t> by_id;
    // Keyed by FieldId; timestamp is served from `by_time`.
    std::array<std::unordered_map<std::string, std::vector<std::uint32_t>>, kFieldCount> postings;
    std::vector<std::pair<std::int64_t, std::uint32_t>> by_time;  // sorted

    void add(const MeasurementRecord& record, const FieldSchema& schema);
    void replace(std::uint32_t doc, const MeasurementRecord& record, const FieldSchema& schema);
    void rebuild_time_index();
  };

  void validate_batch(const std::vector<MeasurementRecord>& records) const;

  FieldSchema schema_;
  mutable std::shared_mutex mutex_;
  Data data_;
};

}  // namespace ccsv
