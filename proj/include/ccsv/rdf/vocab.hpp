#pragma once

#include <map>
#include <string>

#include "ccsv/rdf/term.hpp"

namespace ccsv::rdf {

/// Prefixes preloaded before every parse: rdf, rdfs, xsd, owl, prov, time, geo,
/// oboe, vstoi, hasneto, hasneto-sc, ccsv, pmf. Documents may redeclare any of them.
const std::map<std::string, std::string>& default_prefixes();

/// Base used for relative IRIs in kb files and CCSV preambles unless configured otherwise.
inline constexpr std::string_view kDefaultResourceBase = "http://ccsv.example.org/resource/";

/// Compacts `iri` to "prefix:local" using `prefixes` (longest namespace wins),
/// or returns it unchanged.
std::string compact_iri(const std::string& iri, const std::map<std::string, std::string>& prefixes);

/// Expands "prefix:local" against the default prefixes. Throws std::invalid_argument
/// on an unknown prefix.
Iri expand(std::string_view curie);

}  // namespace ccsv::rdf

namespace ccsv::vocab {

using rdf::Iri;

namespace rdf {
const Iri& type();
}
namespace rdfs {
const Iri& label();
const Iri& sub_class_of();
const Iri& class_();
}
namespace geo {
const Iri& lat();
const Iri& long_();
}
namespace prov {
const Iri& started_at_time();
const Iri& was_generated_by();
const Iri& activity();
}
namespace time {
const Iri& instant();
const Iri& interval();
const Iri& in_date_time();
}
namespace oboe {
const Iri& measurement();
const Iri& characteristic();
const Iri& entity();
const Iri& base_unit();
const Iri& of_characteristic();
const Iri& uses_standard();
const Iri& of_entity();
}
namespace vstoi {
const Iri& deployment();
const Iri& dataset();
const Iri& instrument();
const Iri& platform();
const Iri& has_instrument();
const Iri& has_platform();
}
namespace hasneto {
const Iri& data_collection();
const Iri& has_data_collection();
const Iri& has_measurement_type();
}
namespace ccsv {
const Iri& knowledge_base();
const Iri& has_connection_url();
const Iri& at_column();
}

}  // namespace ccsv::vocab
