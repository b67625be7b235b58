#include "ccsv/index/measurement_index.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "ccsv/digest.hpp"
#include "ccsv/error.hpp"

namespace ccsv {

namespace {

constexpr std::array<std::string_view, kFieldCount> kFieldNames = {
    "record_id", "value",           "timestamp", "entity",   "characteristic",
    "unit",      "instrument",      "instrument_label", "platform", "platform_label",
    "latitude",  "longitude",       "data_collection",  "dataset",  "source",
};

constexpr std::size_t idx(FieldId id) { return static_cast<std::size_t>(id); }

const std::string* string_field(const MeasurementRecord& r, FieldId id) {
  switch (id) {
    case FieldId::RecordId: return &r.record_id;
    case FieldId::Value: return &r.value;
    case FieldId::Timestamp: return nullptr;
    case FieldId::Entity: return &r.entity;
    case FieldId::Characteristic: return &r.characteristic;
    case FieldId::Unit: return &r.unit;
    case FieldId::Instrument: return &r.instrument;
    case FieldId::InstrumentLabel: return &r.instrument_label;
    case FieldId::Platform: return &r.platform;
    case FieldId::PlatformLabel: return &r.platform_label;
    case FieldId::Latitude: return &r.latitude;
    case FieldId::Longitude: return &r.longitude;
    case FieldId::DataCollection: return &r.data_collection;
    case FieldId::Dataset: return &r.dataset;
    case FieldId::Source: return &r.source;
  }
  return nullptr;
}

std::string* mutable_string_field(MeasurementRecord& r, FieldId id) {
  return const_cast<std::string*>(string_field(r, id));
}

std::optional<double> parse_decimal(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

void insert_sorted(std::vector<std::uint32_t>& list, std::uint32_t doc) {
  const auto it = std::lower_bound(list.begin(), list.end(), doc);
  if (it == list.end() || *it != doc) list.insert(it, doc);
}

void erase_sorted(std::vector<std::uint32_t>& list, std::uint32_t doc) {
  const auto it = std::lower_bound(list.begin(), list.end(), doc);
  if (it != list.end() && *it == doc) list.erase(it);
}

}  // namespace

std::string_view to_string(FieldKind kind) noexcept {
  switch (kind) {
    case FieldKind::Keyword: return "keyword";
    case FieldKind::Instant: return "instant";
    case FieldKind::Decimal: return "decimal";
    case FieldKind::Text: return "text";
  }
  return "keyword";
}

std::string_view field_name(FieldId id) noexcept { return kFieldNames[idx(id)]; }

std::optional<FieldId> field_id(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    if (kFieldNames[i] == name) return static_cast<FieldId>(i);
  }
  return std::nullopt;
}

std::string field_value(const MeasurementRecord& record, FieldId id) {
  if (id == FieldId::Timestamp) return record.timestamp.to_iso8601();
  return *string_field(record, id);
}

// -- schema --------------------------------------------------------------------

FieldSchema::FieldSchema(std::vector<FieldSpec> fields) : fields_(std::move(fields)) {
  for (const auto& f : fields_) {
    const auto id = field_id(f.name);
    if (!id) throw IndexError("SchemaInvalid", "'" + f.name + "' is not a record field", f.name);
    if (present_[idx(*id)]) throw IndexError("SchemaInvalid", "duplicate field '" + f.name + "'", f.name);
    if (f.facetable && f.kind != FieldKind::Keyword) {
      throw IndexError("SchemaInvalid", "facetable field '" + f.name + "' must be a keyword field", f.name);
    }
    if (*id == FieldId::Timestamp && f.kind != FieldKind::Instant) {
      throw IndexError("SchemaInvalid", "timestamp must be an instant field", f.name);
    }
    present_[idx(*id)] = true;
  }
  if (!present_[idx(FieldId::RecordId)] || !present_[idx(FieldId::Timestamp)]) {
    throw IndexError("SchemaInvalid", "schema must contain record_id and timestamp");
  }
}

FieldSchema FieldSchema::standard(const std::vector<std::string>& facets) {
  const std::vector<std::string> defaults = {"instrument", "platform", "characteristic", "unit", "data_collection"};
  const auto& facet_list = facets.empty() ? defaults : facets;
  std::vector<FieldSpec> fields;
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const auto id = static_cast<FieldId>(i);
    FieldKind kind = FieldKind::Keyword;
    if (id == FieldId::Timestamp) kind = FieldKind::Instant;
    if (id == FieldId::Latitude || id == FieldId::Longitude) kind = FieldKind::Decimal;
    if (id == FieldId::Value) kind = FieldKind::Text;
    const std::string name(kFieldNames[i]);
    const bool facetable = std::find(facet_list.begin(), facet_list.end(), name) != facet_list.end();
    fields.push_back(FieldSpec{name, kind, facetable, true});
  }
  for (const auto& f : facet_list) {
    if (!field_id(f)) throw IndexError("SchemaInvalid", "unknown facet field '" + f + "'", f);
  }
  return FieldSchema(std::move(fields));
}

const FieldSpec* FieldSchema::find(std::string_view name) const noexcept {
  for (const auto& f : fields_) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

std::vector<std::string> FieldSchema::facetable() const {
  std::vector<std::string> out;
  for (const auto& f : fields_) {
    if (f.facetable) out.push_back(f.name);
  }
  return out;
}

std::uint64_t FieldSchema::fingerprint() const {
  std::string description;
  for (const auto& f : fields_) {
    description += f.name;
    description += ':';
    description += to_string(f.kind);
    description += f.facetable ? ":f" : ":-";
    description += f.stored ? ":s;" : ":-;";
  }
  const Sha256 digest = sha256(description);
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out = (out << 8) | digest[static_cast<std::size_t>(i)];
  return out;
}

// -- data ----------------------------------------------------------------------

void MeasurementIndex::Data::add(const MeasurementRecord& record, const FieldSchema& schema) {
  const auto doc = static_cast<std::uint32_t>(docs.size());
  docs.push_back(record);
  by_id.emplace(record.record_id, doc);
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const auto id = static_cast<FieldId>(i);
    if (id == FieldId::Timestamp || !schema.contains(id)) continue;
    insert_sorted(postings[i][*string_field(record, id)], doc);
  }
  by_time.emplace_back(record.timestamp.epoch_millis(), doc);
}

void MeasurementIndex::Data::replace(std::uint32_t doc, const MeasurementRecord& record, const FieldSchema& schema) {
  MeasurementRecord& old = docs[doc];
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const auto id = static_cast<FieldId>(i);
    if (id == FieldId::Timestamp || !schema.contains(id)) continue;
    const std::string& before = *string_field(old, id);
    const std::string& after = *string_field(record, id);
    if (before == after) continue;
    auto it = postings[i].find(before);
    if (it != postings[i].end()) {
      erase_sorted(it->second, doc);
      if (it->second.empty()) postings[i].erase(it);
    }
    insert_sorted(postings[i][after], doc);
  }
  if (old.timestamp != record.timestamp) {
    for (auto& entry : by_time) {
      if (entry.second == doc) entry.first = record.timestamp.epoch_millis();
    }
  }
  old = record;
}

void MeasurementIndex::Data::rebuild_time_index() { std::sort(by_time.begin(), by_time.end()); }

// -- index ---------------------------------------------------------------------

MeasurementIndex::MeasurementIndex(FieldSchema schema) : schema_(std::move(schema)) {}

void MeasurementIndex::validate_batch(const std::vector<MeasurementRecord>& records) const {
  for (const auto& r : records) {
    for (std::size_t i = 0; i < kFieldCount; ++i) {
      const auto id = static_cast<FieldId>(i);
      if (id == FieldId::Timestamp || schema_.contains(id)) continue;
      if (!string_field(r, id)->empty()) {
        throw IndexError("SchemaMismatch",
                         "record " + r.record_id + " has field '" + std::string(field_name(id)) +
                             "' which is not in the index schema",
                         std::string(field_name(id)));
      }
    }
    if (r.record_id.empty()) throw IndexError("InvalidRecord", "record without record_id");
    for (const FieldId required : {FieldId::Characteristic, FieldId::Unit, FieldId::Instrument,
                                   FieldId::DataCollection, FieldId::Dataset}) {
      if (string_field(r, required)->empty()) {
        throw IndexError("InvalidRecord",
                         "record " + r.record_id + " has an empty " + std::string(field_name(required)),
                         r.record_id);
      }
    }
    const auto check_coord = [&](const std::string& lex, double limit, const char* name) {
      if (lex.empty()) return;
      const auto v = parse_decimal(lex);
      if (!v || *v < -limit || *v > limit) {
        throw IndexError("InvalidRecord", "record " + r.record_id + " has invalid " + name + " '" + lex + "'",
                         r.record_id);
      }
    };
    check_coord(r.latitude, 90.0, "latitude");
    check_coord(r.longitude, 180.0, "longitude");
  }
}

std::size_t MeasurementIndex::index_records(const std::vector<MeasurementRecord>& records) {
  validate_batch(records);
  std::unique_lock lock(mutex_);
  std::size_t changed = 0;
  for (const auto& r : records) {
    const auto it = data_.by_id.find(r.record_id);
    if (it == data_.by_id.end()) {
      data_.add(r, schema_);
    } else {
      data_.replace(it->second, r, schema_);
    }
    ++changed;
  }
  data_.rebuild_time_index();
  return changed;
}

std::size_t MeasurementIndex::size() const {
  std::shared_lock lock(mutex_);
  return data_.docs.size();
}

SearchResult MeasurementIndex::search(const FacetedQuery& q) const {
  if (q.limit < 1 || q.limit > FacetedQuery::kMaxLimit) {
    throw IndexError("InvalidQuery", "limit must be between 1 and " + std::to_string(FacetedQuery::kMaxLimit));
  }
  if (q.from && q.to && *q.to < *q.from) throw IndexError("InvalidQuery", "time range ends before it starts");

  struct ResolvedFilter {
    FieldId id;
    FieldKind kind;
    std::string value;
    std::optional<Instant> instant;
  };
  std::vector<ResolvedFilter> filters;
  for (const auto& [name, value] : q.filters) {
    const FieldSpec* spec = schema_.find(name);
    if (!spec) throw IndexError("UnknownField", "unknown field '" + name + "'", name);
    ResolvedFilter f{*field_id(name), spec->kind, value, std::nullopt};
    if (spec->kind == FieldKind::Instant) {
      f.instant = parse_timestamp_cell(value);
      if (!f.instant) throw IndexError("InvalidQuery", "'" + value + "' is not a timestamp", name);
    }
    filters.push_back(std::move(f));
  }
  std::vector<FieldId> facet_ids;
  for (const auto& name : q.facets) {
    const FieldSpec* spec = schema_.find(name);
    if (!spec) throw IndexError("UnknownField", "unknown field '" + name + "'", name);
    if (!spec->facetable) throw IndexError("NotFacetable", "field '" + name + "' is not facetable", name);
    const auto id = *field_id(name);
    if (std::find(facet_ids.begin(), facet_ids.end(), id) == facet_ids.end()) facet_ids.push_back(id);
  }
  const FieldSpec* sort_spec = schema_.find(q.sort.field);
  if (!sort_spec) throw IndexError("UnknownField", "unknown sort field '" + q.sort.field + "'", q.sort.field);
  const FieldId sort_id = *field_id(q.sort.field);

  std::shared_lock lock(mutex_);
  const auto& d = data_;

  // Candidate set: intersection of posting lists, smallest first.
  std::vector<std::uint32_t> matches;
  bool constrained = false;
  std::vector<const std::vector<std::uint32_t>*> lists;
  std::vector<std::uint32_t> instant_list;
  for (const auto& f : filters) {
    if (f.kind == FieldKind::Instant) {
      const auto ms = f.instant->epoch_millis();
      auto lo = std::lower_bound(d.by_time.begin(), d.by_time.end(), std::pair{ms, std::uint32_t{0}});
      std::vector<std::uint32_t> ids;
      for (; lo != d.by_time.end() && lo->first == ms; ++lo) ids.push_back(lo->second);
      std::sort(ids.begin(), ids.end());
      if (constrained || !instant_list.empty()) {
        std::vector<std::uint32_t> merged;
        std::set_intersection(instant_list.begin(), instant_list.end(), ids.begin(), ids.end(),
                              std::back_inserter(merged));
        instant_list = std::move(merged);
      } else {
        instant_list = std::move(ids);
      }
      constrained = true;
      continue;
    }
    const auto& map = d.postings[idx(f.id)];
    const auto it = map.find(f.value);
    static const std::vector<std::uint32_t> kEmpty;
    lists.push_back(it == map.end() ? &kEmpty : &it->second);
  }
  const bool has_instant_filter =
      std::any_of(filters.begin(), filters.end(), [](const ResolvedFilter& f) { return f.kind == FieldKind::Instant; });
  if (has_instant_filter) lists.push_back(&instant_list);

  if (!lists.empty()) {
    std::sort(lists.begin(), lists.end(), [](auto* a, auto* b) { return a->size() < b->size(); });
    matches = *lists.front();
    for (std::size_t i = 1; i < lists.size() && !matches.empty(); ++i) {
      std::vector<std::uint32_t> next;
      std::set_intersection(matches.begin(), matches.end(), lists[i]->begin(), lists[i]->end(),
                            std::back_inserter(next));
      matches = std::move(next);
    }
    if (q.from || q.to) {
      std::erase_if(matches, [&](std::uint32_t doc) {
        const Instant ts = d.docs[doc].timestamp;
        return (q.from && ts < *q.from) || (q.to && !(ts < *q.to));
      });
    }
  } else if (q.from || q.to) {
    auto lo = q.from ? std::lower_bound(d.by_time.begin(), d.by_time.end(),
                                        std::pair{q.from->epoch_millis(), std::uint32_t{0}})
                     : d.by_time.begin();
    auto hi = q.to ? std::lower_bound(d.by_time.begin(), d.by_time.end(),
                                      std::pair{q.to->epoch_millis(), std::uint32_t{0}})
                   : d.by_time.end();
    for (auto it = lo; it < hi; ++it) matches.push_back(it->second);
    std::sort(matches.begin(), matches.end());
  } else {
    matches.resize(d.docs.size());
    for (std::uint32_t i = 0; i < matches.size(); ++i) matches[i] = i;
  }

  SearchResult result;
  result.total = matches.size();
  result.offset = q.offset;
  result.limit = q.limit;

  for (const FieldId id : facet_ids) {
    std::unordered_map<std::string_view, std::size_t> counts;
    for (const auto doc : matches) ++counts[*string_field(d.docs[doc], id)];
    std::vector<FacetCount> values;
    values.reserve(counts.size());
    for (const auto& [value, count] : counts) values.push_back({std::string(value), count});
    std::sort(values.begin(), values.end(), [](const FacetCount& a, const FacetCount& b) {
      return a.count != b.count ? a.count > b.count : a.value < b.value;
    });
    result.facets.emplace(std::string(field_name(id)), std::move(values));
  }

  // Order: sort field, then record_id ascending.
  const auto less = [&](std::uint32_t a, std::uint32_t b) {
    const MeasurementRecord& ra = d.docs[a];
    const MeasurementRecord& rb = d.docs[b];
    int cmp = 0;
    if (sort_id == FieldId::Timestamp) {
      cmp = ra.timestamp < rb.timestamp ? -1 : rb.timestamp < ra.timestamp ? 1 : 0;
    } else if (sort_spec->kind == FieldKind::Decimal) {
      const auto va = parse_decimal(*string_field(ra, sort_id));
      const auto vb = parse_decimal(*string_field(rb, sort_id));
      // Missing values sort first.
      if (va != vb) cmp = !va ? -1 : !vb ? 1 : (*va < *vb ? -1 : 1);
    } else {
      const std::string& sa = *string_field(ra, sort_id);
      const std::string& sb = *string_field(rb, sort_id);
      if (sort_spec->kind == FieldKind::Text) {
        // Numeric text orders by value and ahead of non-numeric text.
        const auto va = parse_decimal(sa);
        const auto vb = parse_decimal(sb);
        if (va && vb && *va != *vb) cmp = *va < *vb ? -1 : 1;
        else if (va.has_value() != vb.has_value()) cmp = va ? -1 : 1;
      }
      if (cmp == 0) {
        cmp = sa.compare(sb);
        cmp = cmp < 0 ? -1 : cmp > 0 ? 1 : 0;
      }
    }
    if (cmp != 0) return q.sort.descending ? cmp > 0 : cmp < 0;
    return ra.record_id < rb.record_id;
  };
  const std::size_t begin = std::min(q.offset, matches.size());
  const std::size_t end = std::min(matches.size(), begin + q.limit);
  if (begin < end) {
    std::partial_sort(matches.begin(), matches.begin() + static_cast<std::ptrdiff_t>(end), matches.end(), less);
    result.records.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) result.records.push_back(d.docs[matches[i]]);
  }
  return result;
}

// -- snapshots -----------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'C', 'C', 'S', 'V', 'S', 'N', 'A', 'P'};
constexpr std::size_t kHeaderSize = 8 + 4 + 8 + 8 + 8;
constexpr std::size_t kChecksumSize = 32;

template <typename T>
void put(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

void put_string(std::string& out, std::string_view s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string get_string() {
    const auto len = get<std::uint32_t>();
    need(len);
    std::string s(bytes_.substr(pos_, len));
    pos_ += len;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw SnapshotError("CorruptSnapshot", "snapshot is truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string MeasurementIndex::snapshot_bytes() const {
  std::shared_lock lock(mutex_);
  std::vector<const MeasurementRecord*> ordered;
  ordered.reserve(data_.docs.size());
  for (const auto& r : data_.docs) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->record_id < b->record_id; });

  std::string payload;
  for (const MeasurementRecord* r : ordered) {
    for (std::size_t i = 0; i < kFieldCount; ++i) {
      const auto id = static_cast<FieldId>(i);
      if (id == FieldId::Timestamp) {
        put<std::int64_t>(payload, r->timestamp.epoch_millis());
      } else {
        put_string(payload, *string_field(*r, id));
      }
    }
  }

  std::string out(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint64_t>(out, schema_.fingerprint());
  put<std::uint64_t>(out, ordered.size());
  put<std::uint64_t>(out, payload.size());
  out += payload;
  const Sha256 checksum = sha256(out);
  out.append(reinterpret_cast<const char*>(checksum.data()), checksum.size());
  return out;
}

void MeasurementIndex::restore_bytes(std::string_view bytes) {
  if (bytes.size() < kHeaderSize + kChecksumSize || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw SnapshotError("CorruptSnapshot", "not a snapshot file or truncated header");
  }
  Reader header(bytes.substr(sizeof kMagic));
  const auto version = header.get<std::uint32_t>();
  if (version != kSnapshotVersion) {
    throw SnapshotError("VersionMismatch", "snapshot format version " + std::to_string(version) +
                                               ", expected " + std::to_string(kSnapshotVersion));
  }
  const auto fingerprint = header.get<std::uint64_t>();
  const auto count = header.get<std::uint64_t>();
  const auto payload_size = header.get<std::uint64_t>();
  if (bytes.size() != kHeaderSize + payload_size + kChecksumSize) {
    throw SnapshotError("CorruptSnapshot", "snapshot length does not match its header");
  }
  const std::string_view body = bytes.substr(0, kHeaderSize + payload_size);
  const Sha256 checksum = sha256(body);
  if (std::memcmp(checksum.data(), bytes.data() + body.size(), kChecksumSize) != 0) {
    throw SnapshotError("CorruptSnapshot", "snapshot checksum mismatch");
  }
  if (fingerprint != schema_.fingerprint()) {
    throw SnapshotError("VersionMismatch", "snapshot was written with a different field schema");
  }

  Reader payload(bytes.substr(kHeaderSize, payload_size));
  Data fresh;
  for (std::uint64_t n = 0; n < count; ++n) {
    MeasurementRecord r;
    for (std::size_t i = 0; i < kFieldCount; ++i) {
      const auto id = static_cast<FieldId>(i);
      if (id == FieldId::Timestamp) {
        r.timestamp = Instant::from_epoch_millis(payload.get<std::int64_t>());
      } else {
        *mutable_string_field(r, id) = payload.get_string();
      }
    }
    if (fresh.by_id.contains(r.record_id)) throw SnapshotError("CorruptSnapshot", "duplicate record in snapshot");
    fresh.add(r, schema_);
  }
  if (payload.remaining() != 0) throw SnapshotError("CorruptSnapshot", "trailing bytes in snapshot payload");
  fresh.rebuild_time_index();

  std::unique_lock lock(mutex_);
  data_ = std::move(fresh);
}

void MeasurementIndex::snapshot(const std::filesystem::path& path) const {
  const std::string bytes = snapshot_bytes();
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError("SnapshotIO", "cannot write " + tmp.string(), tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw SnapshotError("SnapshotIO", "failed writing " + tmp.string(), tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw SnapshotError("SnapshotIO", "cannot replace " + path.string() + ": " + ec.message(), path.string());
}

void MeasurementIndex::restore(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SnapshotError("SnapshotIO", "cannot open " + path.string(), path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  restore_bytes(buffer.str());
}

}  // namespace ccsv
