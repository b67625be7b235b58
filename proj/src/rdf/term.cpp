#include "ccsv/rdf/term.hpp"

#include <cctype>
#include <cstdio>
#include <stdexcept>

#include "ccsv/time.hpp"

namespace ccsv::rdf {

bool is_valid_iri(std::string_view text) noexcept {
  if (text.empty()) return false;
  for (char c : text) {
    if (c == '<' || c == '>' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
        c == '\v') {
      return false;
    }
  }
  return true;
}

bool has_scheme(std::string_view text) noexcept {
  if (text.empty() || !std::isalpha(static_cast<unsigned char>(text[0]))) return false;
  for (std::size_t i = 1; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ':') return true;
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') return false;
  }
  return false;
}

std::string resolve_iri(std::string_view base, std::string_view reference) {
  if (has_scheme(reference)) return std::string(reference);
  if (reference.empty()) {
    return std::string(base.substr(0, base.find('#')));
  }
  const auto scheme_end = base.find(':');
  if (reference.starts_with("//")) {
    return std::string(base.substr(0, scheme_end + 1)).append(reference);
  }
  if (reference.front() == '#') {
    return std::string(base.substr(0, base.find('#'))).append(reference);
  }
  if (reference.front() == '/') {
    // scheme://authority
    std::size_t authority_end = scheme_end + 1;
    if (base.substr(scheme_end + 1).starts_with("//")) {
      authority_end = base.find('/', scheme_end + 3);
      if (authority_end == std::string_view::npos) authority_end = base.size();
    }
    return std::string(base.substr(0, authority_end)).append(reference);
  }
  if (reference.front() == '?') {
    return std::string(base.substr(0, base.find_first_of("?#"))).append(reference);
  }
  std::string_view stem = base.substr(0, base.find_first_of("?#"));
  const auto slash = stem.rfind('/');
  if (slash == std::string_view::npos || slash < scheme_end) {
    // Opaque base such as "urn:x:y": append after the scheme-specific part.
    return std::string(stem.substr(0, scheme_end + 1)).append(reference);
  }
  return std::string(stem.substr(0, slash + 1)).append(reference);
}

Iri::Iri(std::string value) : value_(std::move(value)) {
  if (!is_valid_iri(value_)) {
    throw std::invalid_argument("invalid IRI: '" + value_ + "'");
  }
}

namespace xsd {
const Iri& string() {
  static const Iri iri(std::string(kNs) + "string");
  return iri;
}
const Iri& integer() {
  static const Iri iri(std::string(kNs) + "integer");
  return iri;
}
const Iri& decimal() {
  static const Iri iri(std::string(kNs) + "decimal");
  return iri;
}
const Iri& double_() {
  static const Iri iri(std::string(kNs) + "double");
  return iri;
}
const Iri& boolean() {
  static const Iri iri(std::string(kNs) + "boolean");
  return iri;
}
const Iri& date_time() {
  static const Iri iri(std::string(kNs) + "dateTime");
  return iri;
}
const Iri& any_uri() {
  static const Iri iri(std::string(kNs) + "anyURI");
  return iri;
}
}  // namespace xsd

const Iri& lang_string() {
  static const Iri iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#langString");
  return iri;
}

namespace {

bool is_integer_lexical(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

void check_lexical(const std::string& lexical, const Iri& datatype) {
  const auto& dt = datatype.str();
  if (!dt.starts_with(xsd::kNs)) return;
  const std::string_view local = std::string_view(dt).substr(xsd::kNs.size());
  if (local == "integer" && !is_integer_lexical(lexical)) {
    throw std::invalid_argument("'" + lexical + "' is not a valid xsd:integer");
  }
  if (local == "dateTime" && !parse_iso8601(lexical)) {
    throw std::invalid_argument("'" + lexical + "' is not a valid xsd:dateTime");
  }
  if (local == "anyURI" && !is_valid_iri(lexical)) {
    throw std::invalid_argument("'" + lexical + "' is not a valid xsd:anyURI");
  }
}

bool is_valid_language(std::string_view tag) {
  // [a-zA-Z]+ ('-' [a-zA-Z0-9]+)*
  if (tag.empty() || !std::isalpha(static_cast<unsigned char>(tag[0]))) return false;
  bool after_dash = false;
  for (std::size_t i = 0; i < tag.size(); ++i) {
    const auto c = static_cast<unsigned char>(tag[i]);
    if (c == '-') {
      if (after_dash || i + 1 == tag.size()) return false;
      after_dash = true;
      continue;
    }
    if (!std::isalnum(c)) return false;
    after_dash = false;
  }
  return true;
}

}  // namespace

Literal::Literal(std::string lexical, Iri datatype)
    : lexical_(std::move(lexical)), datatype_(std::move(datatype)) {
  if (datatype_ == lang_string()) {
    throw std::invalid_argument("rdf:langString literal requires a language tag");
  }
  check_lexical(lexical_, datatype_);
}

Literal::Literal(std::string lexical, std::string language)
    : lexical_(std::move(lexical)), datatype_(lang_string()), language_(std::move(language)) {
  if (!is_valid_language(*language_)) {
    throw std::invalid_argument("invalid language tag '" + *language_ + "'");
  }
}

Literal::Literal(std::string lexical) : lexical_(std::move(lexical)), datatype_(xsd::string()) {}

std::string escape_string(std::string_view text) {
  std::string out;
  out.reserve(text.size() + 2);
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(static_cast<unsigned char>(c)));
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

namespace {

std::string literal_key(const Literal& l) {
  std::string key = "\"" + escape_string(l.lexical()) + "\"";
  if (l.language()) {
    key += "@" + *l.language();
  } else if (l.datatype() != xsd::string()) {
    key += "^^<" + l.datatype().str() + ">";
  }
  return key;
}

bool is_valid_blank_label(std::string_view label) {
  if (label.empty()) return false;
  for (char c : label) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  }
  return true;
}

}  // namespace

Term::Term(Iri iri) : value_(std::move(iri)), key_("<" + std::get<Iri>(value_).str() + ">") {}

Term::Term(Literal literal) : value_(std::move(literal)), key_(literal_key(std::get<Literal>(value_))) {}

Term::Term(BlankNode blank) : value_(std::move(blank)) {
  const auto& label = std::get<BlankNode>(value_).label;
  if (!is_valid_blank_label(label)) {
    throw std::invalid_argument("invalid blank node label '" + label + "'");
  }
  key_ = "_:" + label;
}

Triple::Triple(Term s, Iri p, Term o) : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
  if (subject.is_literal()) throw std::invalid_argument("literal in subject position");
}

std::strong_ordering operator<=>(const Triple& a, const Triple& b) noexcept {
  if (auto c = a.subject <=> b.subject; c != 0) return c;
  if (auto c = a.predicate.str() <=> b.predicate.str(); c != 0) return c;
  return a.object <=> b.object;
}

}  // namespace ccsv::rdf
