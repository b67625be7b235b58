#include "ccsv/format/ccsv.hpp"

#include <algorithm>
#include <charconv>

#include "ccsv/error.hpp"
#include "ccsv/rdf/turtle.hpp"

namespace ccsv {

SplitDocument split_document(std::string_view source) {
  std::size_t start = 0;
  while (start <= source.size()) {
    const auto nl = source.find('\n', start);
    const std::size_t end = nl == std::string_view::npos ? source.size() : nl;
    std::string_view line = source.substr(start, end - start);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    if (line == kDelimiter) {
      const std::size_t after = nl == std::string_view::npos ? source.size() : nl + 1;
      return SplitDocument{std::string(source.substr(0, start)), std::string(source.substr(after)),
                           std::string(source.substr(start, after - start))};
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  throw FormatError("MissingDelimiter",
                    "no preamble/body delimiter line '" + std::string(kDelimiter) + "' found");
}

const TimestampSpec& PreambleModel::timestamp_for(const MeasurementTypeSpec& mt) const {
  const auto it = std::find_if(timestamps.begin(), timestamps.end(),
                               [&](const TimestampSpec& ts) { return ts.id == mt.timestamp_ref; });
  if (it == timestamps.end()) throw std::out_of_range("undeclared timestamp " + mt.timestamp_ref.str());
  return *it;
}

namespace {

using rdf::Graph;
using rdf::Term;
namespace v = vocab;

std::string curie(const Iri& iri) { return rdf::compact_iri(iri.str(), rdf::default_prefixes()); }

[[noreturn]] void incomplete(const Iri& what, const std::string& context = {}) {
  const std::string name = curie(what);
  throw FormatError("PreambleIncomplete",
                    "preamble is missing " + name + (context.empty() ? "" : " (" + context + ")"), name);
}

[[noreturn]] void invalid(const std::string& message, const std::string& subject = {}) {
  throw FormatError("PreambleInvalid", message, subject);
}

Iri as_iri(const Term& t, const std::string& role) {
  if (!t.is_iri()) invalid(role + " must be an IRI, found " + t.ntriples());
  return t.iri();
}

std::vector<Term> instances(const Graph& g, const Iri& cls) { return g.subjects(v::rdf::type(), Term(cls)); }

Iri single_instance(const Graph& g, const Iri& cls) {
  const auto found = instances(g, cls);
  if (found.empty()) incomplete(cls);
  if (found.size() > 1) {
    const std::string name = curie(cls);
    throw FormatError("DuplicateNode", "preamble declares " + std::to_string(found.size()) + " " + name + " nodes",
                      name);
  }
  return as_iri(found.front(), curie(cls));
}

Term single_object(const Graph& g, const Iri& subject, const Iri& predicate) {
  const auto objects = g.objects(Term(subject), predicate);
  if (objects.empty()) incomplete(predicate, "on " + subject.str());
  if (objects.size() > 1) invalid(subject.str() + " has more than one " + curie(predicate), subject.str());
  return objects.front();
}

Instant started_at(const Graph& g, const Iri& activity) {
  const Term t = single_object(g, activity, v::prov::started_at_time());
  if (!t.is_literal()) invalid("prov:startedAtTime of " + activity.str() + " must be a literal", activity.str());
  const auto instant = parse_iso8601(t.literal().lexical());
  if (!instant) invalid("prov:startedAtTime of " + activity.str() + " is not an ISO 8601 timestamp", activity.str());
  return *instant;
}

std::size_t column_of(const Graph& g, const Iri& node, std::size_t column_count) {
  const Term t = single_object(g, node, v::ccsv::at_column());
  if (!t.is_literal()) invalid("ccsv:atColumn of " + node.str() + " must be an integer", node.str());
  const std::string& lex = t.literal().lexical();
  long long value = -1;
  const char* first = lex.data();
  if (!lex.empty() && lex.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, lex.data() + lex.size(), value);
  if (ec != std::errc{} || ptr != lex.data() + lex.size()) {
    invalid("ccsv:atColumn of " + node.str() + " must be an integer, found '" + lex + "'", node.str());
  }
  if (value < 0 || static_cast<unsigned long long>(value) >= column_count) {
    throw FormatError("ColumnOutOfRange",
                      "ccsv:atColumn " + lex + " of " + node.str() + " is outside the body's " +
                          std::to_string(column_count) + " columns",
                      node.str());
  }
  return static_cast<std::size_t>(value);
}

void expect_link(const Graph& g, const Iri& from, const Iri& predicate, const Iri& to) {
  const Iri target = as_iri(single_object(g, from, predicate), curie(predicate));
  if (target != to) {
    invalid(from.str() + " " + curie(predicate) + " points to " + target.str() + ", expected " + to.str(), from.str());
  }
}

}  // namespace

PreambleModel build_preamble_model(const rdf::Graph& g, std::size_t column_count) {
  const Iri kb = single_instance(g, v::ccsv::knowledge_base());
  const Term url = single_object(g, kb, v::ccsv::has_connection_url());
  const std::string connection_url = url.is_literal() ? url.literal().lexical() : url.is_iri() ? url.iri().str() : "";
  if (connection_url.empty()) invalid("ccsv:hasConnectionURL must be a literal or IRI", kb.str());

  const Iri deployment = single_instance(g, v::vstoi::deployment());
  const Iri collection = single_instance(g, v::hasneto::data_collection());
  const Iri dataset = single_instance(g, v::vstoi::dataset());

  expect_link(g, deployment, v::hasneto::has_data_collection(), collection);
  expect_link(g, dataset, v::prov::was_generated_by(), collection);

  PreambleModel model{
      .knowledge_base = {kb, connection_url},
      .deployment = {deployment, started_at(g, deployment)},
      .data_collection = {collection, started_at(g, collection)},
      .dataset = dataset,
      .measurement_types = {},
      .timestamps = {},
  };
  if (model.data_collection.started_at < model.deployment.started_at) {
    invalid("data collection " + collection.str() + " starts before its deployment", collection.str());
  }

  // Timestamp columns: time:Instant nodes with a column that are not measurements.
  const Term measurement_class(v::oboe::measurement());
  for (const Term& node : instances(g, v::time::instant())) {
    if (!node.is_iri()) continue;
    if (g.contains(rdf::Triple(node, v::rdf::type(), measurement_class))) continue;
    if (g.objects(node, v::ccsv::at_column()).empty()) continue;
    model.timestamps.push_back({node.iri(), column_of(g, node.iri(), column_count)});
  }

  const auto mt_nodes = g.objects(Term(dataset), v::hasneto::has_measurement_type());
  if (mt_nodes.empty()) incomplete(v::hasneto::has_measurement_type(), "on " + dataset.str());
  for (const Term& node : mt_nodes) {
    const Iri id = as_iri(node, "measurement type");
    if (!g.contains(rdf::Triple(node, v::rdf::type(), measurement_class))) {
      incomplete(v::oboe::measurement(), "type of " + id.str());
    }
    MeasurementTypeSpec spec{
        .id = id,
        .column = column_of(g, id, column_count),
        .characteristic = as_iri(single_object(g, id, v::oboe::of_characteristic()), "oboe:ofCharacteristic"),
        .standard = as_iri(single_object(g, id, v::oboe::uses_standard()), "oboe:usesStandard"),
        .timestamp_ref = as_iri(single_object(g, id, v::time::in_date_time()), "time:inDateTime"),
    };
    const auto ts = std::find_if(model.timestamps.begin(), model.timestamps.end(),
                                 [&](const TimestampSpec& t) { return t.id == spec.timestamp_ref; });
    if (ts == model.timestamps.end()) {
      invalid("measurement type " + id.str() + " refers to undeclared timestamp " + spec.timestamp_ref.str(), id.str());
    }
    if (ts->column == spec.column) {
      invalid("measurement type " + id.str() + " shares column " + std::to_string(spec.column) +
                  " with its timestamp",
              id.str());
    }
    model.measurement_types.push_back(std::move(spec));
  }
  return model;
}

CcsvDocument parse_ccsv(std::string_view source, std::string name, const CcsvOptions& options) {
  SplitDocument parts = split_document(source);
  rdf::Graph preamble = rdf::parse_turtle(parts.preamble, options.base);
  CsvTable body = parse_csv(parts.body);
  PreambleModel model = build_preamble_model(preamble, body.column_count());
  return CcsvDocument{std::move(preamble), std::move(model), std::move(body), std::move(name)};
}

}  // namespace ccsv
