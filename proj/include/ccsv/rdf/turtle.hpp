#pragma once

#include <map>
#include <string>
#include <string_view>

#include "ccsv/rdf/graph.hpp"
#include "ccsv/rdf/vocab.hpp"

namespace ccsv::rdf {

struct TurtleOptions {
  /// Base for relative IRI references. Must be absolute.
  std::string base{kDefaultResourceBase};
  /// Prefixes in scope before the first directive.
  std::map<std::string, std::string> prefixes;

  /// Options preloaded with default_prefixes() and the given base.
  static TurtleOptions with_defaults(std::string_view base);
};

/// Reads a document in the supported Turtle subset:
///   @prefix / PREFIX, @base / BASE (before the first statement only),
///   prefixed names, `a`, <IRI> (relative ones resolved against the base),
///   short and long strings with escapes, ^^datatype, @lang,
///   integer / decimal / double shorthand, true / false,
///   predicate lists (;), object lists (,), blank node labels (_:x).
/// Collections `( )`, anonymous blank nodes `[ ]`, quoted triples `<< >>`
/// and graph blocks `{ }` are rejected with code "Unsupported".
///
/// Throws TurtleError with line and column on failure.
Graph parse_turtle(std::string_view source, const TurtleOptions& options);

/// Shorthand using default prefixes and `base`.
Graph parse_turtle(std::string_view source, std::string_view base);

/// Writes `graph` as Turtle: prefix declarations first, then one block per
/// subject. Literals keep their exact lexical form.
std::string serialize_turtle(const Graph& graph);

}  // namespace ccsv::rdf
