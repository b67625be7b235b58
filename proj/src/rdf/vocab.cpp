#include "ccsv/rdf/vocab.hpp"

#include <stdexcept>

namespace ccsv::rdf {

const std::map<std::string, std::string>& default_prefixes() {
  static const std::map<std::string, std::string> prefixes = {
      {"rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"},
      {"rdfs", "http://www.w3.org/2000/01/rdf-schema#"},
      {"xsd", "http://www.w3.org/2001/XMLSchema#"},
      {"owl", "http://www.w3.org/2002/07/owl#"},
      {"prov", "http://www.w3.org/ns/prov#"},
      {"time", "http://www.w3.org/2006/time#"},
      {"geo", "http://www.w3.org/2003/01/geo/wgs84_pos#"},
      {"oboe", "http://ecoinformatics.org/oboe/oboe.1.0/oboe-core.owl#"},
      {"vstoi", "http://hadatac.org/ont/vstoi#"},
      {"hasneto", "http://hadatac.org/ont/hasneto#"},
      // Placeholders: no published namespace.
      {"hasneto-sc", "http://ccsv.example.org/ns/hasneto-sc#"},
      {"ccsv", "http://ccsv.example.org/ns/ccsv#"},
      {"pmf", "http://ccsv.example.org/ns/pmf#"},
  };
  return prefixes;
}

std::string compact_iri(const std::string& iri, const std::map<std::string, std::string>& prefixes) {
  const std::pair<const std::string, std::string>* best = nullptr;
  for (const auto& entry : prefixes) {
    if (iri.starts_with(entry.second) && (!best || entry.second.size() > best->second.size())) {
      best = &entry;
    }
  }
  if (!best) return iri;
  return best->first + ":" + iri.substr(best->second.size());
}

Iri expand(std::string_view curie) {
  const auto colon = curie.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("not a prefixed name: " + std::string(curie));
  const auto& prefixes = default_prefixes();
  const auto it = prefixes.find(std::string(curie.substr(0, colon)));
  if (it == prefixes.end()) throw std::invalid_argument("unknown prefix in " + std::string(curie));
  return Iri(it->second + std::string(curie.substr(colon + 1)));
}

}  // namespace ccsv::rdf

#define CCSV_TERM(fn, curie)               \
  const Iri& fn() {                        \
    static const Iri iri = ::ccsv::rdf::expand(curie); \
    return iri;                            \
  }

namespace ccsv::vocab {

namespace rdf {
CCSV_TERM(type, "rdf:type")
}
namespace rdfs {
CCSV_TERM(label, "rdfs:label")
CCSV_TERM(sub_class_of, "rdfs:subClassOf")
CCSV_TERM(class_, "rdfs:Class")
}  // namespace rdfs
namespace geo {
CCSV_TERM(lat, "geo:lat")
CCSV_TERM(long_, "geo:long")
}  // namespace geo
namespace prov {
CCSV_TERM(started_at_time, "prov:startedAtTime")
CCSV_TERM(was_generated_by, "prov:wasGeneratedBy")
CCSV_TERM(activity, "prov:Activity")
}  // namespace prov
namespace time {
CCSV_TERM(instant, "time:Instant")
CCSV_TERM(interval, "time:Interval")
CCSV_TERM(in_date_time, "time:inDateTime")
}  // namespace time
namespace oboe {
CCSV_TERM(measurement, "oboe:Measurement")
CCSV_TERM(characteristic, "oboe:Characteristic")
CCSV_TERM(entity, "oboe:Entity")
CCSV_TERM(base_unit, "oboe:BaseUnit")
CCSV_TERM(of_characteristic, "oboe:ofCharacteristic")
CCSV_TERM(uses_standard, "oboe:usesStandard")
CCSV_TERM(of_entity, "oboe:ofEntity")
}  // namespace oboe
namespace vstoi {
CCSV_TERM(deployment, "vstoi:Deployment")
CCSV_TERM(dataset, "vstoi:Dataset")
CCSV_TERM(instrument, "vstoi:Instrument")
CCSV_TERM(platform, "vstoi:Platform")
CCSV_TERM(has_instrument, "vstoi:hasInstrument")
CCSV_TERM(has_platform, "vstoi:hasPlatform")
}  // namespace vstoi
namespace hasneto {
CCSV_TERM(data_collection, "hasneto:DataCollection")
CCSV_TERM(has_data_collection, "hasneto:hasDataCollection")
CCSV_TERM(has_measurement_type, "hasneto:hasMeasurementType")
}  // namespace hasneto
namespace ccsv {
CCSV_TERM(knowledge_base, "ccsv:KnowledgeBase")
CCSV_TERM(has_connection_url, "ccsv:hasConnectionURL")
CCSV_TERM(at_column, "ccsv:atColumn")
}  // namespace ccsv

}  // namespace ccsv::vocab

#undef CCSV_TERM
