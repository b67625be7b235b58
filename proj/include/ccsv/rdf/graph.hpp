#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccsv/rdf/term.hpp"

namespace ccsv::rdf {

namespace detail {
struct SubjectKey {
  const Term* subject;
};

struct TripleLess {
  using is_transparent = void;
  bool operator()(const Triple& a, const Triple& b) const noexcept { return (a <=> b) < 0; }
  bool operator()(const Triple& a, SubjectKey b) const noexcept { return a.subject < *b.subject; }
  bool operator()(SubjectKey a, const Triple& b) const noexcept { return *a.subject < b.subject; }
};
}  // namespace detail

/// A set of triples plus the prefix map they were read with. Iteration and
/// match() results are ordered by (subject, predicate, object) serialization.
class Graph {
 public:
  using const_iterator = std::set<Triple, detail::TripleLess>::const_iterator;

  /// Returns false if the triple was already present.
  bool insert(Triple triple);
  /// Inserts every triple of `other` and merges its prefixes. Returns the
  /// number of triples that were new.
  std::size_t merge(const Graph& other);

  bool contains(const Triple& triple) const { return triples_.contains(triple); }
  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  const_iterator begin() const noexcept { return triples_.begin(); }
  const_iterator end() const noexcept { return triples_.end(); }

  /// All triples matching the bound positions; std::nullopt matches anything.
  std::vector<Triple> match(const std::optional<Term>& subject, const std::optional<Iri>& predicate,
                            const std::optional<Term>& object) const;

  /// Objects of (subject, predicate, *), in order.
  std::vector<Term> objects(const Term& subject, const Iri& predicate) const;
  /// Subjects of (*, predicate, object), in order.
  std::vector<Term> subjects(const Iri& predicate, const Term& object) const;

  const std::map<std::string, std::string>& prefixes() const noexcept { return prefixes_; }
  void set_prefix(std::string prefix, std::string ns) { prefixes_[std::move(prefix)] = std::move(ns); }

  /// Set equality on triples; prefixes are not compared.
  friend bool operator==(const Graph& a, const Graph& b) { return a.triples_ == b.triples_; }

 private:
  std::set<Triple, detail::TripleLess> triples_;
  std::map<std::string, std::string> prefixes_;
};

}  // namespace ccsv::rdf
