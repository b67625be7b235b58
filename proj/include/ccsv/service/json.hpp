#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ccsv/format/validate.hpp"
#include "ccsv/index/measurement_index.hpp"
#include "ccsv/kb/knowledge_base.hpp"
#include "ccsv/loader/loader.hpp"

namespace ccsv {

using Json = nlohmann::json;

Json to_json(const MeasurementRecord& record);
Json to_json(const SearchResult& result);
Json to_json(const LoadReport& report);
Json to_json(const DeploymentContext& context);
Json to_json(const Diagnostic& diagnostic);
Json to_json(const FieldSchema& schema);

/// {"error": {"code", "message", "subject"?}}
Json error_json(std::string_view code, std::string_view message, std::string_view subject = {});

/// Codes an API or CLI error may carry. Library error codes map onto
/// themselves; anything else is reported as "Internal".
const std::vector<std::string>& api_error_codes();
std::string closed_error_code(std::string_view code);

/// Builds a query from request parameters, as served by GET /api/search:
/// `filter=<field>:<value>` (repeatable, split at the first ':'), `facet=<field>`
/// (repeatable), `from`/`to` (ISO 8601), `offset`, `limit`, `sort=<field>` with an
/// optional leading '-' for descending order. Unknown parameters are rejected.
/// Throws IndexError("InvalidQuery").
FacetedQuery query_from_params(const std::vector<std::pair<std::string, std::string>>& params,
                               std::size_t default_limit);

}  // namespace ccsv
