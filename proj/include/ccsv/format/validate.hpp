#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ccsv/format/ccsv.hpp"
#include "ccsv/kb/knowledge_base.hpp"

namespace ccsv {

enum class Severity { Error, Warning };

std::string_view to_string(Severity s) noexcept;

struct Diagnostic {
  Severity severity;
  std::string subject;
  std::string message;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Checks a parsed document against a knowledge base:
///  - the deployment exists (error "deployment not found") and resolves to an
///    instrument (error) and a platform (warning when missing);
///  - each characteristic / standard is declared in the domain ontology
///    (warning when not) and its class chain reaches oboe:Characteristic /
///    oboe:BaseUnit (error when it does not).
/// Never throws for findings; an empty result means the document is clean.
std::vector<Diagnostic> validate_against_kb(const CcsvDocument& doc, const KnowledgeBase& kb);

bool has_errors(const std::vector<Diagnostic>& diagnostics) noexcept;

}  // namespace ccsv
