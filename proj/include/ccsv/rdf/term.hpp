#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace ccsv::rdf {

/// An absolute IRI. Construction rejects empty strings and IRIs containing
/// whitespace or angle brackets; relative references must be resolved first.
class Iri {
 public:
  explicit Iri(std::string value);

  const std::string& str() const noexcept { return value_; }

  friend bool operator==(const Iri&, const Iri&) = default;
  friend auto operator<=>(const Iri&, const Iri&) = default;

 private:
  std::string value_;
};

/// True if `text` satisfies the Iri invariant.
bool is_valid_iri(std::string_view text) noexcept;

/// True if `text` begins with an RFC 3986 scheme followed by ':'.
bool has_scheme(std::string_view text) noexcept;

/// Resolves `reference` against `base` per RFC 3986 reference resolution,
/// without dot-segment removal.
std::string resolve_iri(std::string_view base, std::string_view reference);

namespace xsd {
inline constexpr std::string_view kNs = "http://www.w3.org/2001/XMLSchema#";
const Iri& string();
const Iri& integer();
const Iri& decimal();
const Iri& double_();
const Iri& boolean();
const Iri& date_time();
const Iri& any_uri();
}  // namespace xsd

const Iri& lang_string();

/// A literal value. Lexical forms of xsd:integer, xsd:dateTime and xsd:anyURI
/// are checked on construction.
class Literal {
 public:
  Literal(std::string lexical, Iri datatype);
  Literal(std::string lexical, std::string language);
  explicit Literal(std::string lexical);

  const std::string& lexical() const noexcept { return lexical_; }
  const Iri& datatype() const noexcept { return datatype_; }
  const std::optional<std::string>& language() const noexcept { return language_; }

  friend bool operator==(const Literal&, const Literal&) = default;

 private:
  std::string lexical_;
  Iri datatype_;
  std::optional<std::string> language_;
};

struct BlankNode {
  std::string label;
  friend bool operator==(const BlankNode&, const BlankNode&) = default;
};

/// One RDF term. Ordering and equality follow the N-Triples serialization,
/// which is cached at construction.
class Term {
 public:
  Term(Iri iri);          // NOLINT(google-explicit-constructor)
  Term(Literal literal);  // NOLINT(google-explicit-constructor)
  Term(BlankNode blank);  // NOLINT(google-explicit-constructor)

  bool is_iri() const noexcept { return std::holds_alternative<Iri>(value_); }
  bool is_literal() const noexcept { return std::holds_alternative<Literal>(value_); }
  bool is_blank() const noexcept { return std::holds_alternative<BlankNode>(value_); }

  const Iri& iri() const { return std::get<Iri>(value_); }
  const Literal& literal() const { return std::get<Literal>(value_); }
  const BlankNode& blank() const { return std::get<BlankNode>(value_); }

  /// N-Triples form, e.g. `<http://x/a>`, `"1"^^<...#integer>`, `_:b0`.
  const std::string& ntriples() const noexcept { return key_; }

  friend bool operator==(const Term& a, const Term& b) noexcept { return a.key_ == b.key_; }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) noexcept {
    return a.key_ <=> b.key_;
  }

 private:
  std::variant<Iri, Literal, BlankNode> value_;
  std::string key_;
};

/// Escapes a lexical form for use inside a double-quoted Turtle/N-Triples string.
std::string escape_string(std::string_view text);

/// An RDF statement. Throws std::invalid_argument when the subject is a literal.
struct Triple {
  Triple(Term s, Iri p, Term o);

  Term subject;
  Iri predicate;
  Term object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend std::strong_ordering operator<=>(const Triple& a, const Triple& b) noexcept;
};

}  // namespace ccsv::rdf
