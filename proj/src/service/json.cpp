#include "ccsv/service/json.hpp"

#include <algorithm>
#include <charconv>

#include "ccsv/error.hpp"

namespace ccsv {

Json to_json(const MeasurementRecord& r) {
  Json j = Json::object();
  for (std::size_t i = 0; i < kFieldCount; ++i) {
    const auto id = static_cast<FieldId>(i);
    j[std::string(field_name(id))] = field_value(r, id);
  }
  return j;
}

Json to_json(const SearchResult& result) {
  Json records = Json::array();
  for (const auto& r : result.records) records.push_back(to_json(r));
  Json facets = Json::object();
  for (const auto& [field, counts] : result.facets) {
    Json list = Json::array();
    for (const auto& c : counts) list.push_back({{"value", c.value}, {"count", c.count}});
    facets[field] = std::move(list);
  }
  return {{"total", result.total},
          {"offset", result.offset},
          {"limit", result.limit},
          {"records", std::move(records)},
          {"facets", std::move(facets)}};
}

Json to_json(const LoadReport& report) {
  return {{"source", report.source},
          {"dataset", report.dataset},
          {"rows", report.rows},
          {"measurement_types", report.measurement_types},
          {"records_emitted", report.records_emitted},
          {"skipped", report.skipped},
          {"warnings", report.warnings},
          {"normalized_csv", report.normalized_csv_path},
          {"duration_ms", static_cast<double>(report.duration.count()) / 1000.0}};
}

Json to_json(const DeploymentContext& ctx) {
  Json j = {{"deployment", ctx.deployment.str()},
            {"instrument",
             {{"iri", ctx.instrument.iri.str()},
              {"label", ctx.instrument.label},
              {"class", ctx.instrument.instrument_class.str()}}},
            {"platform", nullptr},
            {"started_at", nullptr}};
  if (ctx.platform) {
    const auto& p = *ctx.platform;
    j["platform"] = {{"iri", p.iri.str()},
                     {"label", p.label},
                     {"class", p.platform_class.str()},
                     {"latitude", p.latitude ? Json(p.latitude->lexical) : Json(nullptr)},
                     {"longitude", p.longitude ? Json(p.longitude->lexical) : Json(nullptr)}};
  }
  if (ctx.started_at) j["started_at"] = ctx.started_at->to_iso8601();
  return j;
}

Json to_json(const Diagnostic& d) {
  return {{"severity", std::string(to_string(d.severity))}, {"subject", d.subject}, {"message", d.message}};
}

Json to_json(const FieldSchema& schema) {
  Json fields = Json::array();
  for (const auto& f : schema.fields()) {
    fields.push_back(
        {{"name", f.name}, {"kind", std::string(to_string(f.kind))}, {"facetable", f.facetable}, {"stored", f.stored}});
  }
  return {{"fields", std::move(fields)}, {"facetable", schema.facetable()}};
}

const std::vector<std::string>& api_error_codes() {
  static const std::vector<std::string> codes = {
      // requests
      "BadRequest", "NotFound", "UnsupportedMediaType", "Internal",
      // queries
      "UnknownField", "NotFacetable", "InvalidQuery", "SchemaMismatch", "InvalidRecord",
      // documents
      "MissingDelimiter", "CsvSyntax", "PreambleIncomplete", "PreambleInvalid", "ColumnOutOfRange",
      "DuplicateNode", "TurtleSyntax", "UnknownPrefix", "Unsupported",
      // resolution
      "UnknownDeployment", "MissingInstrument", "MissingPlatform", "MultipleInstruments",
      "MultiplePlatforms", "NotAnInstrument", "NotAPlatform", "InvalidCoordinate", "ValidationFailed",
  };
  return codes;
}

std::string closed_error_code(std::string_view code) {
  const auto& codes = api_error_codes();
  return std::find(codes.begin(), codes.end(), code) != codes.end() ? std::string(code) : "Internal";
}

Json error_json(std::string_view code, std::string_view message, std::string_view subject) {
  Json err = {{"code", closed_error_code(code)}, {"message", std::string(message)}};
  if (!subject.empty()) err["subject"] = std::string(subject);
  return {{"error", std::move(err)}};
}

namespace {

std::size_t parse_count(const std::string& name, const std::string& text) {
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw IndexError("InvalidQuery", "'" + name + "' must be a non-negative integer", name);
  }
  return n;
}

Instant parse_instant(const std::string& name, const std::string& text) {
  const auto t = parse_iso8601(text);
  if (!t) throw IndexError("InvalidQuery", "'" + name + "' must be an ISO 8601 timestamp", name);
  return *t;
}

}  // namespace

FacetedQuery query_from_params(const std::vector<std::pair<std::string, std::string>>& params,
                               std::size_t default_limit) {
  FacetedQuery q;
  q.limit = default_limit;
  for (const auto& [name, value] : params) {
    if (name == "filter") {
      const auto colon = value.find(':');
      if (colon == std::string::npos || colon == 0) {
        throw IndexError("InvalidQuery", "filter must look like <field>:<value>", value);
      }
      q.filters.emplace_back(value.substr(0, colon), value.substr(colon + 1));
    } else if (name == "facet") {
      q.facets.push_back(value);
    } else if (name == "from") {
      q.from = parse_instant(name, value);
    } else if (name == "to") {
      q.to = parse_instant(name, value);
    } else if (name == "offset") {
      q.offset = parse_count(name, value);
    } else if (name == "limit") {
      q.limit = parse_count(name, value);
    } else if (name == "sort") {
      q.sort.descending = !value.empty() && value.front() == '-';
      q.sort.field = q.sort.descending ? value.substr(1) : value;
    } else {
      throw IndexError("InvalidQuery", "unknown query parameter '" + name + "'", name);
    }
  }
  return q;
}

}  // namespace ccsv
