#include "ccsv/format/validate.hpp"

#include <algorithm>

#include "ccsv/error.hpp"

namespace ccsv {

std::string_view to_string(Severity s) noexcept { return s == Severity::Error ? "error" : "warning"; }

bool has_errors(const std::vector<Diagnostic>& diagnostics) noexcept {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {

void check_class(std::vector<Diagnostic>& out, const KnowledgeBase& kb, const Iri& cls, const Iri& root,
                 std::string_view role) {
  const std::string root_name = rdf::compact_iri(root.str(), rdf::default_prefixes());
  if (!kb.is_declared_class(cls)) {
    out.push_back({Severity::Warning, cls.str(), std::string(role) + " not declared in domain ontology"});
  } else if (!kb.is_subclass_of(cls, root)) {
    out.push_back({Severity::Error, cls.str(), std::string(role) + " is not a subclass of " + root_name});
  }
}

}  // namespace

std::vector<Diagnostic> validate_against_kb(const CcsvDocument& doc, const KnowledgeBase& kb) {
  std::vector<Diagnostic> out;
  const Iri& deployment = doc.model.deployment.id;
  try {
    if (!kb.resolve_deployment(deployment, ResolveOptions{.allow_missing_platform = true}).platform) {
      out.push_back({Severity::Warning, deployment.str(), "deployment has no platform; location will be empty"});
    }
  } catch (const ResolutionError& e) {
    if (e.code() == "UnknownDeployment") {
      out.push_back({Severity::Error, deployment.str(), "deployment not found"});
    } else {
      out.push_back({Severity::Error, e.subject().empty() ? deployment.str() : e.subject(), e.what()});
    }
  }

  std::vector<Iri> seen;
  auto once = [&](const Iri& iri) {
    if (std::find(seen.begin(), seen.end(), iri) != seen.end()) return false;
    seen.push_back(iri);
    return true;
  };
  for (const auto& mt : doc.model.measurement_types) {
    if (once(mt.characteristic)) check_class(out, kb, mt.characteristic, vocab::oboe::characteristic(), "characteristic");
    if (once(mt.standard)) check_class(out, kb, mt.standard, vocab::oboe::base_unit(), "standard");
  }
  return out;
}

}  // namespace ccsv
