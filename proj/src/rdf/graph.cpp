#include "ccsv/rdf/graph.hpp"

namespace ccsv::rdf {

bool Graph::insert(Triple triple) { return triples_.insert(std::move(triple)).second; }

std::size_t Graph::merge(const Graph& other) {
  std::size_t added = 0;
  for (const auto& t : other) {
    if (triples_.insert(t).second) ++added;
  }
  for (const auto& [prefix, ns] : other.prefixes()) prefixes_.insert_or_assign(prefix, ns);
  return added;
}

std::vector<Triple> Graph::match(const std::optional<Term>& subject, const std::optional<Iri>& predicate,
                                 const std::optional<Term>& object) const {
  std::vector<Triple> out;
  auto accept = [&](const Triple& t) {
    return (!predicate || t.predicate == *predicate) && (!object || t.object == *object);
  };
  if (subject) {
    auto [first, last] = triples_.equal_range(detail::SubjectKey{&*subject});
    for (auto it = first; it != last; ++it) {
      if (accept(*it)) out.push_back(*it);
    }
    return out;
  }
  for (const auto& t : triples_) {
    if (accept(t)) out.push_back(t);
  }
  return out;
}

std::vector<Term> Graph::objects(const Term& subject, const Iri& predicate) const {
  std::vector<Term> out;
  auto [first, last] = triples_.equal_range(detail::SubjectKey{&subject});
  for (auto it = first; it != last; ++it) {
    if (it->predicate == predicate) out.push_back(it->object);
  }
  return out;
}

std::vector<Term> Graph::subjects(const Iri& predicate, const Term& object) const {
  std::vector<Term> out;
  for (const auto& t : triples_) {
    if (t.predicate == predicate && t.object == object) out.push_back(t.subject);
  }
  return out;
}

}  // namespace ccsv::rdf
