#include "ccsv/service/service.hpp"

#include <algorithm>
#include <filesystem>

#include "ccsv/error.hpp"
#include "ccsv/rdf/vocab.hpp"

namespace ccsv {

namespace {

bool is_iri_field(std::string_view field) {
  static constexpr std::string_view kIriFields[] = {"entity",   "characteristic",  "unit",   "instrument",
                                                    "platform", "data_collection", "dataset"};
  return std::find(std::begin(kIriFields), std::end(kIriFields), field) != std::end(kIriFields);
}

}  // namespace

Service::Service(ArtifactConfig config)
    : config_(std::move(config)), index_(FieldSchema::standard(config_.facets)) {
  for (const auto& kc : config_.knowledge_bases) {
    auto kb = std::make_unique<KnowledgeBase>(kc.name, config_.resource_base);
    for (const auto& file : kc.files) {
      const KbLoadReport report = kb->load_file(file);
      for (const auto& w : report.warnings) kb_warnings_.push_back(kc.name + ": " + w);
    }
    kbs_.push_back(std::move(kb));
  }
}

bool Service::restore_snapshot() {
  if (config_.snapshot.empty() || !std::filesystem::exists(config_.snapshot)) return false;
  index_.restore(config_.snapshot);
  return true;
}

void Service::save_snapshot() const {
  if (config_.snapshot.empty()) return;
  if (config_.snapshot.has_parent_path()) std::filesystem::create_directories(config_.snapshot.parent_path());
  index_.snapshot(config_.snapshot);
}

CcsvDocument Service::parse(std::string_view text, std::string source_name) const {
  return parse_ccsv(text, std::move(source_name), CcsvOptions{config_.resource_base});
}

Service::KbChoice Service::select_kb(const CcsvDocument& doc) const {
  const std::string& url = doc.model.knowledge_base.connection_url;
  for (std::size_t i = 0; i < kbs_.size(); ++i) {
    const auto& kc = config_.knowledge_bases[i];
    if (kc.name == url || std::find(kc.urls.begin(), kc.urls.end(), url) != kc.urls.end()) {
      return {kbs_[i].get(), std::nullopt};
    }
  }
  return {kbs_.front().get(), "connection URL '" + url + "' matches no configured knowledge base; using '" +
                                  kbs_.front()->name() + "'"};
}

std::vector<Diagnostic> Service::validate(const CcsvDocument& doc) const {
  const KbChoice choice = select_kb(doc);
  std::vector<Diagnostic> out;
  if (choice.warning) {
    out.push_back({Severity::Warning, doc.model.knowledge_base.id.str(), *choice.warning});
  }
  auto findings = validate_against_kb(doc, *choice.kb);
  out.insert(out.end(), std::make_move_iterator(findings.begin()), std::make_move_iterator(findings.end()));
  return out;
}

LoadResult Service::ingest(const CcsvDocument& doc) {
  const KbChoice choice = select_kb(doc);
  LoadResult result = load(doc, *choice.kb);
  for (const auto& d : validate_against_kb(doc, *choice.kb)) {
    if (d.severity == Severity::Error) throw Error("ValidationFailed", d.subject + ": " + d.message, d.subject);
  }
  if (choice.warning) result.report.warnings.insert(result.report.warnings.begin(), *choice.warning);
  index_.index_records(result.records);
  return result;
}

Iri Service::resolve_reference(std::string_view reference) const {
  const auto colon = reference.find(':');
  if (colon != std::string_view::npos && reference.substr(colon + 1, 2) != "//") {
    const auto& prefixes = rdf::default_prefixes();
    if (prefixes.contains(std::string(reference.substr(0, colon)))) return rdf::expand(reference);
  }
  if (rdf::has_scheme(reference)) return Iri(std::string(reference));
  return Iri(rdf::resolve_iri(config_.resource_base, reference));
}

SearchResult Service::search(FacetedQuery query) const {
  if (query.limit > config_.max_limit) {
    throw IndexError("InvalidQuery", "limit may not exceed " + std::to_string(config_.max_limit));
  }
  for (auto& [field, value] : query.filters) {
    if (!value.empty() && is_iri_field(field)) {
      try {
        value = resolve_reference(value).str();
      } catch (const std::invalid_argument&) {
        // Not expressible as an IRI, so it can only match nothing; keep it verbatim.
      }
    }
  }
  return index_.search(query);
}

std::vector<InstrumentListing> Service::instruments() const {
  std::vector<InstrumentListing> out;
  for (const auto& kb : kbs_) {
    for (auto& inst : kb->list_instances(vocab::vstoi::instrument(), true)) {
      out.push_back({kb->name(), std::move(inst)});
    }
  }
  return out;
}

DeploymentContext Service::deployment(std::string_view reference) const {
  const Iri iri = resolve_reference(reference);
  for (std::size_t i = 0; i < kbs_.size(); ++i) {
    try {
      return kbs_[i]->resolve_deployment(iri, ResolveOptions{.allow_missing_platform = true});
    } catch (const ResolutionError& e) {
      if (e.code() != "UnknownDeployment" || i + 1 == kbs_.size()) throw;
    }
  }
  throw ResolutionError("UnknownDeployment", "deployment not found", iri.str());
}

}  // namespace ccsv
