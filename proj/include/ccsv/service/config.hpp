#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ccsv {

struct KnowledgeBaseConfig {
  std::string name;
  /// Connection URLs a CCSV preamble may use to select this knowledge base,
  /// in addition to `name` itself.
  std::vector<std::string> urls;
  std::vector<std::filesystem::path> files;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 8080;
  std::string cors_origin = "*";
};

struct ArtifactConfig {
  std::vector<KnowledgeBaseConfig> knowledge_bases;
  /// Empty: the index lives only as long as the process.
  std::filesystem::path snapshot;
  ServerConfig server;
  /// Empty: the index default facets.
  std::vector<std::string> facets;
  std::size_t default_limit = 20;
  std::size_t max_limit = 1000;
  std::string resource_base;
};

/// Reads the TOML subset used by ccsv configs:
///
///   resource_base = "http://..."
///   [server]        host, port, cors_origin
///   [index]         snapshot
///   [search]        facets, default_limit, max_limit
///   [[knowledge_base]]  name, urls, files   (repeatable)
///
/// Values are basic strings, integers, booleans or arrays of strings (arrays may
/// span lines). Relative paths are taken relative to `base_dir`.
/// Throws ConfigError("ConfigSyntax" / "ConfigInvalid").
ArtifactConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);

/// parse_config on a file; ConfigError("ConfigIO") when unreadable.
ArtifactConfig load_config(const std::filesystem::path& path);

}  // namespace ccsv
