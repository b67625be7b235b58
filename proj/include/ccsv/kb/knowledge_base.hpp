#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccsv/rdf/graph.hpp"
#include "ccsv/rdf/vocab.hpp"
#include "ccsv/time.hpp"

namespace ccsv {

using rdf::Iri;

struct KbLoadReport {
  std::size_t triples_read = 0;
  std::size_t triples_added = 0;
  /// rdf:type object (full IRI) -> number of typed subjects in the loaded text.
  std::map<std::string, std::size_t> type_counts;
  std::vector<std::string> warnings;
};

/// A decimal-degree coordinate with the lexical form it was asserted with.
struct Coordinate {
  std::string lexical;
  double degrees = 0.0;
  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

struct InstrumentInfo {
  Iri iri;
  std::string label;
  Iri instrument_class;
  friend bool operator==(const InstrumentInfo&, const InstrumentInfo&) = default;
};

struct PlatformInfo {
  Iri iri;
  std::string label;
  Iri platform_class;
  std::optional<Coordinate> latitude;
  std::optional<Coordinate> longitude;
  friend bool operator==(const PlatformInfo&, const PlatformInfo&) = default;
};

/// deployment -> instrument -> platform -> location.
struct DeploymentContext {
  Iri deployment;
  InstrumentInfo instrument;
  /// Absent only when resolved with allow_missing_platform.
  std::optional<PlatformInfo> platform;
  std::optional<Instant> started_at;
  friend bool operator==(const DeploymentContext&, const DeploymentContext&) = default;
};

struct ResolveOptions {
  /// Return a context without platform instead of throwing MissingPlatform.
  bool allow_missing_platform = false;
};

struct Instance {
  Iri iri;
  std::string label;
  friend bool operator==(const Instance&, const Instance&) = default;
};

/// The metadata collection: sensor network, domain ontology and schema in one
/// graph, with type/label/subclass caches derived from it.
///
/// Thread safety: any number of concurrent readers; load_metadata() builds a
/// new state off to the side and publishes it atomically, so readers see the
/// graph either before or after a load.
class KnowledgeBase {
 public:
  explicit KnowledgeBase(std::string name, std::string base = std::string(rdf::kDefaultResourceBase));

  const std::string& name() const noexcept { return name_; }
  const std::string& base() const noexcept { return base_; }

  /// Parses `turtle` against base() and adds its triples. A parse error or a
  /// subclass cycle leaves the knowledge base unchanged.
  KbLoadReport load_metadata(std::string_view turtle);
  KbLoadReport load_file(const std::filesystem::path& path);

  DeploymentContext resolve_deployment(const Iri& deployment, const ResolveOptions& options = {}) const;

  /// Reflexive, transitive rdfs:subClassOf reachability.
  bool is_subclass_of(const Iri& sub, const Iri& super) const;
  /// True if `iri` has an rdf:type that is a subclass of `cls`.
  bool is_instance_of(const Iri& iri, const Iri& cls) const;
  /// Typed as rdfs:Class / owl:Class or mentioned in an rdfs:subClassOf edge.
  bool is_declared_class(const Iri& iri) const;
  /// Instances ordered by IRI; with `transitive`, instances of subclasses too.
  std::vector<Instance> list_instances(const Iri& cls, bool transitive) const;
  /// Entity associated with a characteristic via oboe:ofEntity, searching superclasses.
  std::optional<Iri> entity_of(const Iri& characteristic) const;
  std::optional<std::string> label_of(const Iri& iri) const;

  std::size_t size() const;
  /// Current graph; the returned pointer stays valid across later loads.
  std::shared_ptr<const rdf::Graph> graph() const;

 private:
  struct State;
  std::shared_ptr<const State> state() const;

  std::string name_;
  std::string base_;
  mutable std::mutex publish_mutex_;
  std::mutex write_mutex_;
  std::shared_ptr<const State> state_;
};

}  // namespace ccsv
