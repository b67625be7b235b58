#include "ccsv/rdf/turtle.hpp"

#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "ccsv/error.hpp"

namespace ccsv::rdf {

TurtleOptions TurtleOptions::with_defaults(std::string_view base) {
  TurtleOptions options;
  options.base = std::string(base);
  options.prefixes = default_prefixes();
  return options;
}

namespace {

bool is_pn_chars_base(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool is_pn_chars_u(unsigned char c) { return is_pn_chars_base(c) || c == '_'; }
bool is_pn_chars(unsigned char c) { return is_pn_chars_u(c) || c == '-' || std::isdigit(c); }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  Parser(std::string_view src, const TurtleOptions& options)
      : src_(src), base_(options.base), prefixes_(options.prefixes) {
    if (!has_scheme(base_)) throw std::invalid_argument("Turtle base must be an absolute IRI: " + base_);
    // Tolerate a UTF-8 byte order mark.
    if (src_.starts_with("\xEF\xBB\xBF")) pos_ = 3;
  }

  Graph run() {
    for (;;) {
      skip_ws();
      if (at_end()) break;
      if (peek() == '@' || starts_with_keyword("PREFIX") || starts_with_keyword("BASE")) {
        directive();
      } else {
        statement();
        seen_statement_ = true;
      }
    }
    return std::move(graph_);
  }

 private:
  // -- error reporting ---------------------------------------------------------
  [[noreturn]] void fail(const std::string& code, const std::string& message, std::size_t at) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw TurtleError(code, message, line, col);
  }
  [[noreturn]] void syntax(const std::string& message) const { fail("TurtleSyntax", message, pos_); }
  [[noreturn]] void unsupported(const std::string& what) const {
    fail("Unsupported", what + " is not supported by this Turtle reader", pos_);
  }

  // -- character helpers -------------------------------------------------------
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }
  bool lookahead(std::string_view s) const { return src_.substr(pos_).starts_with(s); }

  bool starts_with_keyword(std::string_view kw) const {
    if (src_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(src_[pos_ + i])) != kw[i]) return false;
    }
    const char next = peek(kw.size());
    return next == ' ' || next == '\t' || next == '\n' || next == '\r' || next == '<' || next == '\0';
  }

  void skip_ws() {
    while (!at_end()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  void expect(char c, const char* context) {
    skip_ws();
    if (peek() != c) {
      syntax(std::string("expected '") + c + "' " + context + (at_end() ? ", found end of input" : ""));
    }
    ++pos_;
  }

  // -- directives --------------------------------------------------------------
  void directive() {
    const bool sparql_style = peek() != '@';
    if (!sparql_style) ++pos_;
    const std::size_t kw_start = pos_;
    while (!at_end() && std::isalpha(static_cast<unsigned char>(peek()))) ++pos_;
    std::string kw(src_.substr(kw_start, pos_ - kw_start));
    for (auto& c : kw) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    if (kw == "prefix") {
      skip_ws();
      const std::size_t start = pos_;
      while (!at_end() && peek() != ':' && is_pn_chars(static_cast<unsigned char>(peek()))) ++pos_;
      const std::string prefix(src_.substr(start, pos_ - start));
      if (!prefix.empty() && !is_pn_chars_base(static_cast<unsigned char>(prefix.front()))) {
        fail("TurtleSyntax", "invalid prefix name '" + prefix + "'", start);
      }
      if (peek() != ':') syntax("expected ':' after prefix name");
      ++pos_;
      skip_ws();
      const std::string ns = iriref();
      prefixes_[prefix] = ns;
      graph_.set_prefix(prefix, ns);
    } else if (kw == "base") {
      if (seen_statement_) unsupported("base redeclaration after the first statement");
      skip_ws();
      base_ = iriref();
    } else {
      fail("TurtleSyntax", "unknown directive '" + kw + "'", kw_start);
    }
    if (!sparql_style) expect('.', "after directive");
  }

  // -- statements --------------------------------------------------------------
  void statement() {
    skip_ws();
    check_unsupported();
    Term subject = subject_term();
    predicate_object_list(subject);
    expect('.', "at end of statement");
  }

  void check_unsupported() {
    switch (peek()) {
      case '[': unsupported("anonymous blank node '[ ]'");
      case '(': unsupported("collection '( )'");
      case '{': unsupported("graph block '{ }'");
      default: break;
    }
    if (lookahead("<<")) unsupported("quoted triple '<< >>'");
  }

  Term subject_term() {
    if (peek() == '<') return Term(Iri(iriref()));
    if (lookahead("_:")) return blank_node();
    if (peek() == '"' || peek() == '\'' || std::isdigit(static_cast<unsigned char>(peek())) ||
        peek() == '+' || peek() == '-') {
      syntax("a literal cannot be a subject");
    }
    return Term(prefixed_name());
  }

  void predicate_object_list(const Term& subject) {
    for (;;) {
      skip_ws();
      Iri predicate = verb();
      for (;;) {
        skip_ws();
        Term object = object_term();
        graph_.insert(Triple(subject, predicate, std::move(object)));
        skip_ws();
        if (peek() != ',') break;
        ++pos_;
      }
      skip_ws();
      if (peek() != ';') break;
      // One or more ';', optionally followed by nothing before '.'.
      while (peek() == ';') {
        ++pos_;
        skip_ws();
      }
      if (peek() == '.' || at_end()) break;
    }
  }

  Iri verb() {
    if (peek() == 'a') {
      const char next = peek(1);
      if (next == ' ' || next == '\t' || next == '\n' || next == '\r' || next == '<' || next == '"' ||
          next == '#') {
        ++pos_;
        return Iri(default_prefixes().at("rdf") + "type");
      }
    }
    if (peek() == '<') return Iri(iriref());
    if (peek() == '_' && peek(1) == ':') syntax("a blank node cannot be a predicate");
    check_unsupported();
    return prefixed_name();
  }

  Term object_term() {
    check_unsupported();
    const char c = peek();
    if (c == '<') return Term(Iri(iriref()));
    if (lookahead("_:")) return blank_node();
    if (c == '"' || c == '\'') return string_literal();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return numeric_literal();
    }
    if (boolean_keyword("true")) return Term(Literal("true", xsd::boolean()));
    if (boolean_keyword("false")) return Term(Literal("false", xsd::boolean()));
    if (at_end()) syntax("expected an object, found end of input");
    return Term(prefixed_name());
  }

  bool boolean_keyword(std::string_view kw) {
    if (!lookahead(kw)) return false;
    const auto next = static_cast<unsigned char>(peek(kw.size()));
    if (is_pn_chars(next) || next == ':' || next == '.') {
      if (next != '.' || is_pn_chars(static_cast<unsigned char>(peek(kw.size() + 1)))) return false;
    }
    pos_ += kw.size();
    return true;
  }

  // -- terms -------------------------------------------------------------------
  std::string iriref() {
    if (peek() != '<') syntax("expected '<'");
    const std::size_t start = pos_;
    ++pos_;
    std::string raw;
    for (;;) {
      if (at_end()) fail("TurtleSyntax", "unterminated IRI", start);
      const char c = src_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '<') {
        fail("TurtleSyntax", "invalid character in IRI", pos_);
      }
      if (c == '\\') {
        ++pos_;
        const char e = peek();
        if (e != 'u' && e != 'U') syntax("invalid escape in IRI");
        ++pos_;
        append_utf8(raw, hex_code(e == 'u' ? 4 : 8));
        continue;
      }
      raw += c;
      ++pos_;
    }
    std::string resolved = resolve_iri(base_, raw);
    if (!is_valid_iri(resolved)) fail("TurtleSyntax", "invalid IRI <" + raw + ">", start);
    return resolved;
  }

  std::uint32_t hex_code(std::size_t digits) {
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const char h = peek();
      if (!std::isxdigit(static_cast<unsigned char>(h))) syntax("invalid hex escape");
      cp = cp * 16 + static_cast<std::uint32_t>(std::isdigit(static_cast<unsigned char>(h))
                                                    ? h - '0'
                                                    : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10);
      ++pos_;
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) syntax("invalid code point in escape");
    return cp;
  }

  Iri prefixed_name() {
    const std::size_t start = pos_;
    // Prefix part.
    while (!at_end() && peek() != ':' && (is_pn_chars(static_cast<unsigned char>(peek())) || peek() == '.')) {
      ++pos_;
    }
    if (peek() != ':') {
      if (pos_ == start) {
        syntax(std::string("unexpected character '") + (at_end() ? ' ' : peek()) + "'");
      }
      fail("TurtleSyntax", "expected a prefixed name, found '" + std::string(src_.substr(start, pos_ - start)) + "'",
           start);
    }
    const std::string prefix(src_.substr(start, pos_ - start));
    ++pos_;

    // Local part: PN_LOCAL with backslash escapes and %HH; trailing '.' is not part of it.
    std::string local;
    for (;;) {
      if (at_end()) break;
      const auto c = static_cast<unsigned char>(peek());
      if (is_pn_chars(c) || c == ':' || c == '.') {
        if (c == '.') {
          const auto next = static_cast<unsigned char>(peek(1));
          if (!(is_pn_chars(next) || next == ':' || next == '.' || next == '\\' || next == '%')) break;
        }
        local += static_cast<char>(c);
        ++pos_;
      } else if (c == '%') {
        if (!std::isxdigit(static_cast<unsigned char>(peek(1))) || !std::isxdigit(static_cast<unsigned char>(peek(2)))) {
          syntax("invalid percent escape in prefixed name");
        }
        local.append(src_.substr(pos_, 3));
        pos_ += 3;
      } else if (c == '\\') {
        const char e = peek(1);
        if (std::string_view("_~.-!$&'()*+,;=/?#@%").find(e) == std::string_view::npos || e == '\0') {
          syntax("invalid escape in prefixed name");
        }
        local += e;
        pos_ += 2;
      } else {
        break;
      }
    }

    const auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("UnknownPrefix", "unknown prefix '" + prefix + ":'", start);
    graph_.set_prefix(prefix, it->second);
    std::string iri = it->second + local;
    if (!is_valid_iri(iri)) fail("TurtleSyntax", "prefixed name expands to an invalid IRI", start);
    return Iri(std::move(iri));
  }

  Term blank_node() {
    const std::size_t start = pos_;
    pos_ += 2;
    std::string label;
    while (!at_end()) {
      const auto c = static_cast<unsigned char>(peek());
      if (std::isalnum(c) || c == '_' || c == '-') {
        label += static_cast<char>(c);
        ++pos_;
      } else if (c == '.' && (std::isalnum(static_cast<unsigned char>(peek(1))) || peek(1) == '_' || peek(1) == '-')) {
        // Labels with interior dots are folded to '_' so they stay valid.
        label += '_';
        ++pos_;
      } else {
        break;
      }
    }
    if (label.empty()) fail("TurtleSyntax", "empty blank node label", start);
    return Term(BlankNode{std::move(label)});
  }

  Term string_literal() {
    const std::size_t start = pos_;
    const char quote = peek();
    const bool long_form = peek(1) == quote && peek(2) == quote;
    pos_ += long_form ? 3 : 1;
    std::string value;
    for (;;) {
      if (at_end()) fail("TurtleSyntax", "unterminated string literal", start);
      const char c = src_[pos_];
      if (long_form) {
        if (c == quote && peek(1) == quote && peek(2) == quote) {
          // Allow up to two quotes directly before the closing delimiter.
          if (peek(3) == quote) {
            value += c;
            ++pos_;
            continue;
          }
          pos_ += 3;
          break;
        }
      } else {
        if (c == quote) {
          ++pos_;
          break;
        }
        if (c == '\n' || c == '\r') fail("TurtleSyntax", "newline in short string literal", pos_);
      }
      if (c == '\\') {
        ++pos_;
        const char e = peek();
        ++pos_;
        switch (e) {
          case 't': value += '\t'; break;
          case 'b': value += '\b'; break;
          case 'n': value += '\n'; break;
          case 'r': value += '\r'; break;
          case 'f': value += '\f'; break;
          case '"': value += '"'; break;
          case '\'': value += '\''; break;
          case '\\': value += '\\'; break;
          case 'u': append_utf8(value, hex_code(4)); break;
          case 'U': append_utf8(value, hex_code(8)); break;
          default: fail("TurtleSyntax", "invalid string escape", pos_ - 2);
        }
        continue;
      }
      value += c;
      ++pos_;
    }

    const std::size_t suffix_at = pos_;
    try {
      if (peek() == '@') {
        ++pos_;
        const std::size_t tag_start = pos_;
        while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) ++pos_;
        return Term(Literal(std::move(value), std::string(src_.substr(tag_start, pos_ - tag_start))));
      }
      if (lookahead("^^")) {
        pos_ += 2;
        Iri datatype = peek() == '<' ? Iri(iriref()) : prefixed_name();
        return Term(Literal(std::move(value), std::move(datatype)));
      }
    } catch (const std::invalid_argument& e) {
      fail("TurtleSyntax", e.what(), suffix_at);
    }
    return Term(Literal(std::move(value)));
  }

  Term numeric_literal() {
    const std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') ++pos_;
    std::size_t int_digits = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      ++pos_;
      ++int_digits;
    }
    bool is_decimal = false;
    bool is_double = false;
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      is_decimal = true;
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    } else if (int_digits == 0) {
      fail("TurtleSyntax", "malformed number", start);
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!std::isdigit(static_cast<unsigned char>(peek()))) {
        pos_ = save;
      } else {
        is_double = true;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
      }
    }
    std::string lexical(src_.substr(start, pos_ - start));
    const Iri& dt = is_double ? xsd::double_() : is_decimal ? xsd::decimal() : xsd::integer();
    return Term(Literal(std::move(lexical), dt));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::string base_;
  std::map<std::string, std::string> prefixes_;
  bool seen_statement_ = false;
  Graph graph_;
};

// -- serializer ----------------------------------------------------------------

bool is_safe_local(std::string_view local) {
  if (local.empty()) return true;
  const auto first = static_cast<unsigned char>(local.front());
  if (!(std::isalnum(first) || first == '_')) return false;
  for (char ch : local) {
    const auto c = static_cast<unsigned char>(ch);
    if (!(std::isalnum(c) || c == '_' || c == '-' || c == '.')) return false;
  }
  return local.back() != '.';
}

std::string escape_iri(std::string_view iri) {
  std::string out;
  for (char c : iri) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x20 || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' || c == '`' || c == '\\') {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(u));
      out += buf;
    } else {
      out += c;
    }
  }
  return out;
}

class Writer {
 public:
  explicit Writer(const Graph& g) : graph_(g) {
    for (const auto& [prefix, ns] : g.prefixes()) {
      if (prefix.empty() || is_pn_chars_base(static_cast<unsigned char>(prefix.front()))) {
        usable_[prefix] = ns;
      }
    }
  }

  std::string run() {
    std::string out;
    for (const auto& [prefix, ns] : usable_) {
      out += "@prefix " + prefix + ": <" + escape_iri(ns) + "> .\n";
    }
    if (!usable_.empty() && !graph_.empty()) out += "\n";

    const Term* current = nullptr;
    const Iri* current_pred = nullptr;
    for (const auto& t : graph_) {
      if (!current || t.subject != *current) {
        if (current) out += " .\n\n";
        out += node(t.subject);
        out += "\n    " + predicate(t.predicate) + " " + node(t.object);
        current = &t.subject;
        current_pred = &t.predicate;
      } else if (t.predicate != *current_pred) {
        out += " ;\n    " + predicate(t.predicate) + " " + node(t.object);
        current_pred = &t.predicate;
      } else {
        out += " ,\n        " + node(t.object);
      }
    }
    if (current) out += " .\n";
    return out;
  }

 private:
  std::string iri(const Iri& value) const {
    const std::string& s = value.str();
    const std::pair<const std::string, std::string>* best = nullptr;
    for (const auto& entry : usable_) {
      if (s.starts_with(entry.second) && (!best || entry.second.size() > best->second.size()) &&
          is_safe_local(std::string_view(s).substr(entry.second.size()))) {
        best = &entry;
      }
    }
    if (best) return best->first + ":" + s.substr(best->second.size());
    return "<" + escape_iri(s) + ">";
  }

  std::string predicate(const Iri& p) const {
    if (p.str() == default_prefixes().at("rdf") + "type") return "a";
    return iri(p);
  }

  std::string node(const Term& t) const {
    if (t.is_iri()) return iri(t.iri());
    if (t.is_blank()) return "_:" + t.blank().label;
    const Literal& l = t.literal();
    std::string out = "\"" + escape_string(l.lexical()) + "\"";
    if (l.language()) return out + "@" + *l.language();
    if (l.datatype() != xsd::string()) out += "^^" + iri(l.datatype());
    return out;
  }

  const Graph& graph_;
  std::map<std::string, std::string> usable_;
};

}  // namespace

Graph parse_turtle(std::string_view source, const TurtleOptions& options) {
  return Parser(source, options).run();
}

Graph parse_turtle(std::string_view source, std::string_view base) {
  return parse_turtle(source, TurtleOptions::with_defaults(base));
}

std::string serialize_turtle(const Graph& graph) { return Writer(graph).run(); }

}  // namespace ccsv::rdf
