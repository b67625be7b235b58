#include "ccsv/loader/loader.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "ccsv/digest.hpp"
#include "ccsv/error.hpp"

namespace ccsv {

std::string make_record_id(std::string_view dataset, std::string_view measurement_type, std::size_t row_index) {
  std::string key;
  key.reserve(dataset.size() + measurement_type.size() + 24);
  key.append(dataset).push_back('\x1f');
  key.append(measurement_type).push_back('\x1f');
  key.append(std::to_string(row_index));
  const Sha256 digest = sha256(key);
  return to_hex(std::span(digest).first(16));
}

std::size_t LoadReport::total_skipped() const {
  return std::accumulate(skipped.begin(), skipped.end(), std::size_t{0},
                         [](std::size_t acc, const auto& kv) { return acc + kv.second; });
}

namespace {

bool is_blank(std::string_view cell) { return cell.find_first_not_of(" \t") == std::string_view::npos; }

std::string join_per_type(const CcsvDocument& doc, auto&& field) {
  std::string out;
  for (std::size_t i = 0; i < doc.model.measurement_types.size(); ++i) {
    if (i) out += '|';
    out += field(i);
  }
  return out;
}

}  // namespace

CsvTable normalize(const CcsvDocument& doc, const DeploymentContext& ctx,
                   const std::vector<std::optional<Iri>>& entities) {
  const auto& types = doc.model.measurement_types;
  const bool with_entity =
      std::any_of(entities.begin(), entities.end(), [](const std::optional<Iri>& e) { return e.has_value(); });

  std::vector<std::string> meta{
      ctx.instrument.iri.str(),
      ctx.instrument.label,
      ctx.platform ? ctx.platform->iri.str() : std::string(),
      ctx.platform ? ctx.platform->label : std::string(),
      ctx.platform && ctx.platform->latitude ? ctx.platform->latitude->lexical : std::string(),
      ctx.platform && ctx.platform->longitude ? ctx.platform->longitude->lexical : std::string(),
      join_per_type(doc, [&](std::size_t i) { return types[i].characteristic.str(); }),
      join_per_type(doc, [&](std::size_t i) { return types[i].standard.str(); }),
      doc.model.data_collection.id.str(),
  };
  if (with_entity) {
    meta.push_back(join_per_type(doc, [&](std::size_t i) {
      return i < entities.size() && entities[i] ? entities[i]->str() : std::string();
    }));
  }

  CsvTable out;
  out.header = doc.body.header;
  for (auto col : kMetadataColumns) out.header.emplace_back(col);
  if (with_entity) out.header.emplace_back(kEntityColumn);
  out.rows.reserve(doc.body.rows.size());
  for (const auto& row : doc.body.rows) {
    auto& r = out.rows.emplace_back(row);
    r.insert(r.end(), meta.begin(), meta.end());
  }
  return out;
}

LoadResult load(const CcsvDocument& doc, const KnowledgeBase& kb) {
  const auto started = std::chrono::steady_clock::now();
  LoadResult result;
  LoadReport& report = result.report;
  report.source = doc.source_name;
  report.dataset = doc.model.dataset.str();
  report.rows = doc.body.rows.size();
  report.measurement_types = doc.model.measurement_types.size();

  // Instrument and platform from the deployment.
  const DeploymentContext ctx =
      kb.resolve_deployment(doc.model.deployment.id, ResolveOptions{.allow_missing_platform = true});
  if (!ctx.platform) {
    report.warnings.push_back("deployment " + ctx.deployment.str() +
                              " has no platform; location fields are empty");
  }

  std::vector<std::optional<Iri>> entities;
  entities.reserve(doc.model.measurement_types.size());
  for (const auto& mt : doc.model.measurement_types) entities.push_back(kb.entity_of(mt.characteristic));

  // Normalized table.
  result.normalized = normalize(doc, ctx, entities);

  MeasurementRecord base;
  base.instrument = ctx.instrument.iri.str();
  base.instrument_label = ctx.instrument.label;
  if (ctx.platform) {
    base.platform = ctx.platform->iri.str();
    base.platform_label = ctx.platform->label;
    if (ctx.platform->latitude) base.latitude = ctx.platform->latitude->lexical;
    if (ctx.platform->longitude) base.longitude = ctx.platform->longitude->lexical;
  }
  base.data_collection = doc.model.data_collection.id.str();
  base.dataset = doc.model.dataset.str();
  base.source = doc.source_name;

  result.records.reserve(doc.body.rows.size() * doc.model.measurement_types.size());
  for (std::size_t t = 0; t < doc.model.measurement_types.size(); ++t) {
    const auto& mt = doc.model.measurement_types[t];
    const auto& ts = doc.model.timestamp_for(mt);
    for (std::size_t r = 0; r < doc.body.rows.size(); ++r) {
      const auto& row = doc.body.rows[r];
      const auto instant = parse_timestamp_cell(row[ts.column]);
      if (!instant) {
        ++report.skipped[std::string(kSkipBadTimestamp)];
        continue;
      }
      if (is_blank(row[mt.column])) {
        ++report.skipped[std::string(kSkipEmptyValue)];
        continue;
      }
      MeasurementRecord rec = base;
      rec.record_id = make_record_id(base.dataset, mt.id.str(), r);
      rec.value = row[mt.column];
      rec.timestamp = *instant;
      rec.characteristic = mt.characteristic.str();
      rec.unit = mt.standard.str();
      if (entities[t]) rec.entity = entities[t]->str();
      result.records.push_back(std::move(rec));
    }
  }
  report.records_emitted = result.records.size();
  report.duration =
      std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - started);
  return result;
}

std::filesystem::path normalized_path_for(const std::filesystem::path& source) {
  auto out = source;
  out.replace_filename(source.stem().string() + ".normalized.csv");
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("IO", "cannot write " + path.string(), path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("IO", "failed writing " + path.string(), path.string());
}

}  // namespace ccsv
