#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccsv/format/ccsv.hpp"
#include "ccsv/format/validate.hpp"
#include "ccsv/index/measurement_index.hpp"
#include "ccsv/kb/knowledge_base.hpp"
#include "ccsv/loader/loader.hpp"
#include "ccsv/service/config.hpp"

namespace ccsv {

struct InstrumentListing {
  std::string knowledge_base;
  Instance instrument;
};

/// Everything the CLI and the HTTP server share: the configured knowledge
/// bases, one measurement index, and the operations on them. Both front ends
/// go through the same calls so their answers cannot drift apart.
class Service {
 public:
  /// Loads every configured knowledge base file. Throws on unreadable or
  /// malformed files.
  explicit Service(ArtifactConfig config);

  const ArtifactConfig& config() const noexcept { return config_; }
  MeasurementIndex& index() noexcept { return index_; }
  const MeasurementIndex& index() const noexcept { return index_; }
  const std::vector<std::unique_ptr<KnowledgeBase>>& knowledge_bases() const noexcept { return kbs_; }
  /// Warnings collected while loading the knowledge bases.
  const std::vector<std::string>& kb_warnings() const noexcept { return kb_warnings_; }

  /// Restores the configured snapshot when the file exists. Returns whether it did.
  bool restore_snapshot();
  /// Writes the configured snapshot; no-op without a snapshot path.
  void save_snapshot() const;

  CcsvDocument parse(std::string_view text, std::string source_name) const;

  /// The knowledge base named by the preamble's connection URL (matched against
  /// each configured name and urls). Unmatched URLs fall back to the first
  /// knowledge base and set `warning`.
  struct KbChoice {
    const KnowledgeBase* kb;
    std::optional<std::string> warning;
  };
  KbChoice select_kb(const CcsvDocument& doc) const;

  std::vector<Diagnostic> validate(const CcsvDocument& doc) const;

  /// Runs the loader and indexes the records; Error("ValidationFailed") when the
  /// document has knowledge-base validation errors. The report's normalized_csv_path
  /// is left for the caller to fill in once the table is written.
  LoadResult ingest(const CcsvDocument& doc);

  /// Expands IRI-valued filters given as CURIEs or relative references, then
  /// searches. Throws IndexError("InvalidQuery") above the configured max_limit.
  SearchResult search(FacetedQuery query) const;

  /// Absolute IRIs pass through; "prefix:local" with a known prefix is expanded;
  /// anything else is resolved against the resource base.
  Iri resolve_reference(std::string_view reference) const;

  std::vector<InstrumentListing> instruments() const;
  /// Resolves against each knowledge base in turn; ResolutionError from the
  /// last one when none knows the deployment.
  DeploymentContext deployment(std::string_view reference) const;

 private:
  ArtifactConfig config_;
  std::vector<std::unique_ptr<KnowledgeBase>> kbs_;
  std::vector<std::string> kb_warnings_;
  MeasurementIndex index_;
};

}  // namespace ccsv
