#include "ccsv/service/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "ccsv/error.hpp"
#include "ccsv/index/measurement_index.hpp"
#include "ccsv/rdf/term.hpp"
#include "ccsv/rdf/vocab.hpp"

namespace ccsv {

namespace {

using Value = std::variant<std::string, std::int64_t, bool, std::vector<std::string>>;

class ConfigReader {
 public:
  ConfigReader(std::string_view text, std::filesystem::path base_dir) : text_(text), base_dir_(std::move(base_dir)) {}

  ArtifactConfig read() {
    while (!at_end()) {
      skip_blank();
      if (at_end()) break;
      if (peek() == '[') {
        header();
      } else {
        assignment();
      }
    }
    finish();
    return config_;
  }

 private:
  enum class Section { Root, Server, Index, Search, KnowledgeBase };

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("ConfigSyntax", msg + " (line " + std::to_string(line_) + ")");
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  // Whitespace, newlines and comments.
  void skip_blank() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos_;
      } else if (c == '\n') {
        ++pos_;
        ++line_;
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_spaces();
    if (!at_end() && peek() == '#') {
      while (!at_end() && peek() != '\n') ++pos_;
    }
    if (!at_end() && peek() == '\r') ++pos_;
    if (!at_end()) {
      if (peek() != '\n') fail("unexpected text after value");
      ++pos_;
      ++line_;
    }
  }

  std::string bare_key() {
    const std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(text_.substr(start, pos_ - start));
  }

  void header() {
    ++pos_;
    const bool array_table = !at_end() && peek() == '[';
    if (array_table) ++pos_;
    skip_spaces();
    const std::string name = bare_key();
    skip_spaces();
    if (at_end() || peek() != ']') fail("unterminated table header");
    ++pos_;
    if (array_table) {
      if (at_end() || peek() != ']') fail("unterminated table header");
      ++pos_;
      if (name != "knowledge_base") {
        throw ConfigError("ConfigInvalid", "unknown table array [[" + name + "]] (line " + std::to_string(line_) + ")",
                          name);
      }
      config_.knowledge_bases.emplace_back();
      section_ = Section::KnowledgeBase;
    } else if (name == "server") {
      section_ = Section::Server;
    } else if (name == "index") {
      section_ = Section::Index;
    } else if (name == "search") {
      section_ = Section::Search;
    } else {
      throw ConfigError("ConfigInvalid", "unknown table [" + name + "] (line " + std::to_string(line_) + ")", name);
    }
    end_of_line();
  }

  std::string basic_string() {
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      const char c = text_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated string");
      switch (text_[pos_++]) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: fail("unsupported escape in string");
      }
    }
    return out;
  }

  Value value() {
    if (at_end()) fail("missing value");
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '[') {
      ++pos_;
      std::vector<std::string> items;
      while (true) {
        skip_blank();
        if (at_end()) fail("unterminated array");
        if (peek() == ']') {
          ++pos_;
          break;
        }
        if (peek() != '"') fail("arrays may only hold strings");
        items.push_back(basic_string());
        skip_blank();
        if (!at_end() && peek() == ',') {
          ++pos_;
        } else if (at_end() || peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
      return items;
    }
    const std::size_t start = pos_;
    while (!at_end() && peek() != '\n' && peek() != '#' && peek() != ' ' && peek() != '\t' && peek() != '\r') ++pos_;
    const std::string_view word = text_.substr(start, pos_ - start);
    if (word == "true") return true;
    if (word == "false") return false;
    std::int64_t n = 0;
    const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), n);
    if (ec != std::errc{} || ptr != word.data() + word.size() || word.empty()) {
      fail("cannot read value '" + std::string(word) + "'");
    }
    return n;
  }

  void assignment() {
    const std::string key = bare_key();
    skip_spaces();
    if (at_end() || peek() != '=') fail("expected '=' after '" + key + "'");
    ++pos_;
    skip_spaces();
    const std::size_t key_line = line_;
    const Value v = value();
    end_of_line();
    apply(key, v, key_line);
  }

  template <typename T>
  const T& as(const Value& v, const std::string& key, std::size_t line) const {
    if (const T* p = std::get_if<T>(&v)) return *p;
    throw ConfigError("ConfigInvalid", "wrong value type for '" + key + "' (line " + std::to_string(line) + ")", key);
  }

  std::filesystem::path path_value(const std::string& raw) const {
    std::filesystem::path p(raw);
    return p.is_absolute() ? p : base_dir_ / p;
  }

  std::size_t positive(const Value& v, const std::string& key, std::size_t line) const {
    const auto n = as<std::int64_t>(v, key, line);
    if (n < 1) throw ConfigError("ConfigInvalid", "'" + key + "' must be positive", key);
    return static_cast<std::size_t>(n);
  }

  void apply(const std::string& key, const Value& v, std::size_t line) {
    const auto unknown = [&] {
      throw ConfigError("ConfigInvalid", "unknown key '" + key + "' (line " + std::to_string(line) + ")", key);
    };
    switch (section_) {
      case Section::Root:
        if (key == "resource_base") {
          config_.resource_base = as<std::string>(v, key, line);
        } else {
          unknown();
        }
        break;
      case Section::Server:
        if (key == "host") {
          config_.server.host = as<std::string>(v, key, line);
        } else if (key == "port") {
          const auto port = as<std::int64_t>(v, key, line);
          if (port < 0 || port > 65535) throw ConfigError("ConfigInvalid", "port out of range", key);
          config_.server.port = static_cast<std::uint16_t>(port);
        } else if (key == "cors_origin") {
          config_.server.cors_origin = as<std::string>(v, key, line);
        } else {
          unknown();
        }
        break;
      case Section::Index:
        if (key == "snapshot") {
          config_.snapshot = path_value(as<std::string>(v, key, line));
        } else {
          unknown();
        }
        break;
      case Section::Search:
        if (key == "facets") {
          config_.facets = as<std::vector<std::string>>(v, key, line);
        } else if (key == "default_limit") {
          config_.default_limit = positive(v, key, line);
        } else if (key == "max_limit") {
          config_.max_limit = positive(v, key, line);
        } else {
          unknown();
        }
        break;
      case Section::KnowledgeBase: {
        auto& kb = config_.knowledge_bases.back();
        if (key == "name") {
          kb.name = as<std::string>(v, key, line);
        } else if (key == "urls") {
          kb.urls = as<std::vector<std::string>>(v, key, line);
        } else if (key == "files") {
          for (const auto& f : as<std::vector<std::string>>(v, key, line)) kb.files.push_back(path_value(f));
        } else {
          unknown();
        }
        break;
      }
    }
  }

  void finish() {
    if (config_.knowledge_bases.empty()) {
      throw ConfigError("ConfigInvalid", "at least one [[knowledge_base]] is required");
    }
    std::set<std::string> names;
    for (const auto& kb : config_.knowledge_bases) {
      if (kb.name.empty()) throw ConfigError("ConfigInvalid", "knowledge base without a name");
      if (!names.insert(kb.name).second) {
        throw ConfigError("ConfigInvalid", "duplicate knowledge base name '" + kb.name + "'", kb.name);
      }
    }
    if (config_.resource_base.empty()) config_.resource_base = std::string(rdf::kDefaultResourceBase);
    if (!rdf::is_valid_iri(config_.resource_base) || !rdf::has_scheme(config_.resource_base)) {
      throw ConfigError("ConfigInvalid", "resource_base must be an absolute IRI", config_.resource_base);
    }
    if (config_.max_limit > FacetedQuery::kMaxLimit) {
      throw ConfigError("ConfigInvalid", "max_limit may not exceed " + std::to_string(FacetedQuery::kMaxLimit));
    }
    if (config_.default_limit > config_.max_limit) {
      throw ConfigError("ConfigInvalid", "default_limit exceeds max_limit");
    }
  }

  std::string_view text_;
  std::filesystem::path base_dir_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  Section section_ = Section::Root;
  ArtifactConfig config_;
};

}  // namespace

ArtifactConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  return ConfigReader(text, base_dir).read();
}

ArtifactConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("ConfigIO", "cannot read config " + path.string(), path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

}  // namespace ccsv
