#include "ccsv/kb/knowledge_base.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ccsv/error.hpp"
#include "ccsv/rdf/turtle.hpp"

namespace ccsv {

namespace v = vocab;
using rdf::Term;

struct KnowledgeBase::State {
  std::shared_ptr<const rdf::Graph> graph = std::make_shared<rdf::Graph>();
  std::unordered_map<std::string, std::vector<std::string>> types;
  std::map<std::string, std::set<std::string>> instances;
  std::unordered_map<std::string, std::string> labels;
  std::unordered_map<std::string, std::vector<std::string>> supers;
  std::unordered_set<std::string> declared;

  bool subclass(const std::string& sub, const std::string& super) const {
    if (sub == super) return true;
    std::vector<const std::string*> stack{&sub};
    std::unordered_set<std::string> seen{sub};
    while (!stack.empty()) {
      const std::string* cur = stack.back();
      stack.pop_back();
      const auto it = supers.find(*cur);
      if (it == supers.end()) continue;
      for (const auto& s : it->second) {
        if (s == super) return true;
        if (seen.insert(s).second) stack.push_back(&s);
      }
    }
    return false;
  }

  bool instance_of(const std::string& iri, const std::string& cls) const {
    const auto it = types.find(iri);
    if (it == types.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), [&](const std::string& t) { return subclass(t, cls); });
  }

  /// The most specific rdf:type of `iri` under `root`, if any.
  std::optional<std::string> most_specific_type(const std::string& iri, const std::string& root) const {
    const auto it = types.find(iri);
    if (it == types.end()) return std::nullopt;
    std::vector<std::string> candidates;
    for (const auto& t : it->second) {
      if (subclass(t, root)) candidates.push_back(t);
    }
    std::sort(candidates.begin(), candidates.end());
    for (const auto& c : candidates) {
      const bool has_more_specific = std::any_of(candidates.begin(), candidates.end(), [&](const std::string& o) {
        return o != c && subclass(o, c);
      });
      if (!has_more_specific) return c;
    }
    return std::nullopt;
  }
};

namespace {

const std::string& owl_class() {
  static const std::string iri = rdf::default_prefixes().at("owl") + "Class";
  return iri;
}

/// Returns the members of a cycle of length >= 2 in the subclass graph, if any.
std::optional<std::string> find_cycle(const std::unordered_map<std::string, std::vector<std::string>>& supers) {
  enum class Mark { Active, Done };
  std::unordered_map<std::string, Mark> marks;
  for (const auto& [root, _] : supers) {
    if (marks.contains(root)) continue;
    // Iterative DFS with explicit edge cursors.
    std::vector<std::pair<const std::string*, std::size_t>> stack{{&root, 0}};
    marks[root] = Mark::Active;
    while (!stack.empty()) {
      auto& [node, cursor] = stack.back();
      const auto it = supers.find(*node);
      if (it == supers.end() || cursor >= it->second.size()) {
        marks[*node] = Mark::Done;
        stack.pop_back();
        continue;
      }
      const std::string& next = it->second[cursor++];
      if (next == *node) continue;
      const auto m = marks.find(next);
      if (m == marks.end()) {
        marks[next] = Mark::Active;
        stack.emplace_back(&next, 0);
      } else if (m->second == Mark::Active) {
        return next;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

KnowledgeBase::KnowledgeBase(std::string name, std::string base)
    : name_(std::move(name)), base_(std::move(base)), state_(std::make_shared<State>()) {}

std::shared_ptr<const KnowledgeBase::State> KnowledgeBase::state() const {
  std::lock_guard lock(publish_mutex_);
  return state_;
}

KbLoadReport KnowledgeBase::load_metadata(std::string_view turtle) {
  std::lock_guard write_lock(write_mutex_);
  const rdf::Graph incoming = rdf::parse_turtle(turtle, base_);
  const auto current = state();

  KbLoadReport report;
  report.triples_read = incoming.size();
  for (const auto& t : incoming) {
    if (t.predicate == v::rdf::type() && t.object.is_iri()) ++report.type_counts[t.object.iri().str()];
  }

  auto merged = std::make_shared<rdf::Graph>(*current->graph);
  report.triples_added = merged->merge(incoming);

  auto next = std::make_shared<State>();
  const std::string& type = v::rdf::type().str();
  const std::string& label = v::rdfs::label().str();
  const std::string& sub_class_of = v::rdfs::sub_class_of().str();
  const std::string& rdfs_class = v::rdfs::class_().str();
  for (const auto& t : *merged) {
    if (!t.subject.is_iri()) continue;
    const std::string& s = t.subject.iri().str();
    const std::string& p = t.predicate.str();
    if (p == type && t.object.is_iri()) {
      const std::string& o = t.object.iri().str();
      next->types[s].push_back(o);
      next->instances[o].insert(s);
      if (o == rdfs_class || o == owl_class()) next->declared.insert(s);
    } else if (p == sub_class_of && t.object.is_iri()) {
      next->supers[s].push_back(t.object.iri().str());
      next->declared.insert(s);
      next->declared.insert(t.object.iri().str());
    } else if (p == label && t.object.is_literal()) {
      // Smallest lexical form wins so the choice is independent of load order.
      auto [it, inserted] = next->labels.emplace(s, t.object.literal().lexical());
      if (!inserted && t.object.literal().lexical() < it->second) it->second = t.object.literal().lexical();
    }
  }
  if (const auto cyclic = find_cycle(next->supers)) {
    throw Error("SchemaCycle", "rdfs:subClassOf cycle through " + *cyclic, *cyclic);
  }
  next->graph = std::move(merged);

  // Schema warnings for the incoming subjects.
  const std::string& platform = v::vstoi::platform().str();
  std::set<std::string> located;
  for (const auto& t : incoming) {
    if (t.subject.is_iri() && (t.predicate == v::geo::lat() || t.predicate == v::geo::long_())) {
      located.insert(t.subject.iri().str());
    }
  }
  for (const auto& s : located) {
    if (!next->instance_of(s, platform)) {
      report.warnings.push_back(s + " carries geo coordinates but is not typed as a vstoi:Platform");
    }
  }
  std::map<std::string, std::size_t> entity_edges;
  for (const auto& t : *next->graph) {
    if (t.predicate == v::oboe::of_entity() && t.subject.is_iri()) ++entity_edges[t.subject.iri().str()];
  }
  for (const auto& [characteristic, count] : entity_edges) {
    if (count > 1) report.warnings.push_back(characteristic + " has " + std::to_string(count) + " associated entities");
  }

  std::lock_guard publish(publish_mutex_);
  state_ = std::move(next);
  return report;
}

KbLoadReport KnowledgeBase::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("KbIO", "cannot open knowledge-base file " + path.string(), path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return load_metadata(text.str());
}

bool KnowledgeBase::is_subclass_of(const Iri& sub, const Iri& super) const {
  return state()->subclass(sub.str(), super.str());
}

bool KnowledgeBase::is_instance_of(const Iri& iri, const Iri& cls) const {
  return state()->instance_of(iri.str(), cls.str());
}

bool KnowledgeBase::is_declared_class(const Iri& iri) const { return state()->declared.contains(iri.str()); }

std::vector<Instance> KnowledgeBase::list_instances(const Iri& cls, bool transitive) const {
  const auto s = state();
  std::set<std::string> members;
  for (const auto& [c, subjects] : s->instances) {
    if (c == cls.str() || (transitive && s->subclass(c, cls.str()))) members.insert(subjects.begin(), subjects.end());
  }
  std::vector<Instance> out;
  out.reserve(members.size());
  for (const auto& m : members) {
    const auto label = s->labels.find(m);
    out.push_back(Instance{Iri(m), label == s->labels.end() ? std::string() : label->second});
  }
  return out;
}

std::optional<Iri> KnowledgeBase::entity_of(const Iri& characteristic) const {
  const auto s = state();
  // Breadth-first so the nearest association wins.
  std::vector<std::string> frontier{characteristic.str()};
  std::unordered_set<std::string> seen{characteristic.str()};
  while (!frontier.empty()) {
    std::vector<std::string> next;
    for (const auto& c : frontier) {
      for (const Term& o : s->graph->objects(Term(Iri(c)), v::oboe::of_entity())) {
        if (o.is_iri()) return o.iri();
      }
      if (const auto it = s->supers.find(c); it != s->supers.end()) {
        for (const auto& sup : it->second) {
          if (seen.insert(sup).second) next.push_back(sup);
        }
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

std::optional<std::string> KnowledgeBase::label_of(const Iri& iri) const {
  const auto s = state();
  const auto it = s->labels.find(iri.str());
  if (it == s->labels.end()) return std::nullopt;
  return it->second;
}

std::size_t KnowledgeBase::size() const { return state()->graph->size(); }

std::shared_ptr<const rdf::Graph> KnowledgeBase::graph() const { return state()->graph; }

namespace {

std::optional<Coordinate> coordinate(const rdf::Graph& g, const Iri& subject, const Iri& predicate, double limit) {
  const auto objects = g.objects(Term(subject), predicate);
  if (objects.empty()) return std::nullopt;
  const std::string name = rdf::compact_iri(predicate.str(), rdf::default_prefixes());
  if (objects.size() > 1) {
    throw ResolutionError("InvalidCoordinate", subject.str() + " has more than one " + name, subject.str());
  }
  const Term& o = objects.front();
  if (!o.is_literal()) throw ResolutionError("InvalidCoordinate", name + " of " + subject.str() + " is not a literal");
  const std::string& lex = o.literal().lexical();
  double value = 0;
  const char* first = lex.data();
  if (!lex.empty() && lex.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, lex.data() + lex.size(), value);
  if (ec != std::errc{} || ptr != lex.data() + lex.size() || value < -limit || value > limit) {
    throw ResolutionError("InvalidCoordinate", name + " '" + lex + "' of " + subject.str() + " is out of range",
                          subject.str());
  }
  return Coordinate{lex, value};
}

Iri single_link(const rdf::Graph& g, const Iri& deployment, const Iri& predicate, const char* missing_code,
                const char* multiple_code, const char* what) {
  std::vector<Iri> links;
  for (const Term& o : g.objects(Term(deployment), predicate)) {
    if (o.is_iri()) links.push_back(o.iri());
  }
  if (links.empty()) {
    throw ResolutionError(missing_code, "deployment " + deployment.str() + " has no " + what, deployment.str());
  }
  if (links.size() > 1) {
    throw ResolutionError(multiple_code,
                          "deployment " + deployment.str() + " links " + std::to_string(links.size()) + " " + what + "s",
                          deployment.str());
  }
  return links.front();
}

}  // namespace

DeploymentContext KnowledgeBase::resolve_deployment(const Iri& deployment, const ResolveOptions& options) const {
  const auto s = state();
  const rdf::Graph& g = *s->graph;
  if (!s->instance_of(deployment.str(), v::vstoi::deployment().str())) {
    throw ResolutionError("UnknownDeployment", "deployment " + deployment.str() + " not found in knowledge base '" +
                                                   name_ + "'",
                          deployment.str());
  }

  const Iri instrument = single_link(g, deployment, v::vstoi::has_instrument(), "MissingInstrument",
                                     "MultipleInstruments", "instrument");
  const auto instrument_class = s->most_specific_type(instrument.str(), v::vstoi::instrument().str());
  if (!instrument_class) {
    throw ResolutionError("NotAnInstrument", instrument.str() + " is not typed as a vstoi:Instrument",
                          instrument.str());
  }
  const auto label_for = [&](const Iri& iri) {
    const auto it = s->labels.find(iri.str());
    return it == s->labels.end() ? std::string() : it->second;
  };

  DeploymentContext ctx{
      .deployment = deployment,
      .instrument = InstrumentInfo{instrument, label_for(instrument), Iri(*instrument_class)},
      .platform = std::nullopt,
      .started_at = std::nullopt,
  };

  for (const Term& t : g.objects(Term(deployment), v::prov::started_at_time())) {
    if (t.is_literal()) {
      if (auto instant = parse_iso8601(t.literal().lexical())) {
        ctx.started_at = instant;
        break;
      }
    }
  }

  std::optional<Iri> platform;
  try {
    platform = single_link(g, deployment, v::vstoi::has_platform(), "MissingPlatform", "MultiplePlatforms", "platform");
  } catch (const ResolutionError& e) {
    if (e.code() != "MissingPlatform" || !options.allow_missing_platform) throw;
  }
  if (platform) {
    const auto platform_class = s->most_specific_type(platform->str(), v::vstoi::platform().str());
    if (!platform_class) {
      throw ResolutionError("NotAPlatform", platform->str() + " is not typed as a vstoi:Platform", platform->str());
    }
    ctx.platform = PlatformInfo{
        .iri = *platform,
        .label = label_for(*platform),
        .platform_class = Iri(*platform_class),
        .latitude = coordinate(g, *platform, v::geo::lat(), 90.0),
        .longitude = coordinate(g, *platform, v::geo::long_(), 180.0),
    };
  }
  return ctx;
}

}  // namespace ccsv
