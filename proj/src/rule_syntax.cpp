#include <cctype>
#include <charconv>
#include <cstdio>

#include "eoilp/logic.hpp"

namespace eoilp::logic {

std::string format_probability(double phi) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", phi);
  return buf;
}

std::string to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Integer: return std::to_string(t.value);
    default: return t.text;
  }
}

std::string to_string(const Atom& a) {
  std::string out = a.predicate;
  if (a.args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ',';
    out += to_string(a.args[i]);
  }
  out += ')';
  return out;
}

std::string to_string(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Positive: return to_string(l.atom);
    case Literal::Kind::Negative: return "not " + to_string(l.atom);
    case Literal::Kind::Compare:
      return l.cmp.variable + (l.cmp.op == CompareOp::LessEq ? " <= " : " >= ") +
             std::to_string(l.cmp.bound);
  }
  return {};
}

std::string to_string(const NormalRule& r) {
  std::string out = to_string(r.head);
  if (!r.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < r.body.size(); ++i) {
      if (i) out += ", ";
      out += to_string(r.body[i]);
    }
  }
  out += '.';
  return out;
}

std::string to_string(const ProbRule& r) {
  if (!r.phi) return to_string(r.rule);
  return format_probability(*r.phi) + ": " + to_string(r.rule);
}

namespace {

enum class Tok { Ident, Var, Number, LParen, RParen, Comma, Dot, If, Colon, Le, Ge, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip();
    if (pos_ >= src_.size()) return {Tok::End, {}, line_};
    const char c = src_[pos_];
    const auto start = pos_;
    auto one = [&](Tok k) {
      ++pos_;
      return Token{k, std::string(1, c), line_};
    };
    if (std::islower(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() && is_word(src_[pos_])) ++pos_;
      return {Tok::Ident, std::string(src_.substr(start, pos_ - start)), line_};
    }
    if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() && is_word(src_[pos_])) ++pos_;
      return {Tok::Var, std::string(src_.substr(start, pos_ - start)), line_};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      // A '.' belongs to the number only when a digit follows; otherwise it ends the rule.
      if (pos_ + 1 < src_.size() && src_[pos_] == '.' &&
          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        ++pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
      return {Tok::Number, std::string(src_.substr(start, pos_ - start)), line_};
    }
    switch (c) {
      case '(': return one(Tok::LParen);
      case ')': return one(Tok::RParen);
      case ',': return one(Tok::Comma);
      case '.': return one(Tok::Dot);
      case ':':
        if (src_.substr(pos_, 2) == ":-") {
          pos_ += 2;
          return {Tok::If, ":-", line_};
        }
        return one(Tok::Colon);
      case '<':
        if (src_.substr(pos_, 2) == "<=") {
          pos_ += 2;
          return {Tok::Le, "<=", line_};
        }
        break;
      case '>':
        if (src_.substr(pos_, 2) == ">=") {
          pos_ += 2;
          return {Tok::Ge, ">=", line_};
        }
        break;
      default: break;
    }
    if (src_.substr(pos_, 3) == "\xE2\x89\xA4") {
      pos_ += 3;
      return {Tok::Le, "<=", line_};
    }
    if (src_.substr(pos_, 3) == "\xE2\x89\xA5") {
      pos_ += 3;
      return {Tok::Ge, ">=", line_};
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line_);
  }

 private:
  static bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  void skip() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { advance(); }

  bool at_end() const { return cur_.kind == Tok::End; }

  ProbRule rule() {
    ProbRule out;
    if (cur_.kind == Tok::Number) {
      out.phi = to_double(cur_.text);
      advance();
      expect(Tok::Colon, "':' after probability");
    }
    out.rule.head = atom();
    if (cur_.kind == Tok::If) {
      advance();
      out.rule.body.push_back(literal());
      while (cur_.kind == Tok::Comma) {
        advance();
        out.rule.body.push_back(literal());
      }
    }
    expect(Tok::Dot, "'.' at end of rule");
    return out;
  }

  Atom atom() {
    if (cur_.kind != Tok::Ident) fail("expected predicate name");
    Atom a(cur_.text);
    advance();
    if (cur_.kind == Tok::LParen) {
      advance();
      a.args.push_back(term());
      while (cur_.kind == Tok::Comma) {
        advance();
        a.args.push_back(term());
      }
      expect(Tok::RParen, "')'");
    }
    return a;
  }

 private:
  Literal literal() {
    if (cur_.kind == Tok::Ident && cur_.text == "not") {
      advance();
      return Literal::neg(atom());
    }
    if (cur_.kind == Tok::Var) {
      std::string var = cur_.text;
      advance();
      CompareOp op;
      if (cur_.kind == Tok::Le)
        op = CompareOp::LessEq;
      else if (cur_.kind == Tok::Ge)
        op = CompareOp::GreaterEq;
      else
        fail("expected '<=' or '>=' after variable " + var);
      advance();
      if (cur_.kind != Tok::Number) fail("expected integer bound");
      const auto bound = to_int(cur_.text);
      advance();
      return Literal::compare(std::move(var), op, bound);
    }
    return Literal::pos(atom());
  }

  Term term() {
    Term t;
    switch (cur_.kind) {
      case Tok::Ident: t = Term::symbol(cur_.text); break;
      case Tok::Var: t = Term::variable(cur_.text); break;
      case Tok::Number: t = Term::integer(to_int(cur_.text)); break;
      default: fail("expected term");
    }
    advance();
    return t;
  }

  std::int64_t to_int(const std::string& s) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail("expected integer, got '" + s + "'");
    return v;
  }

  double to_double(const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    fail("bad probability '" + s + "'");
  }

  void expect(Tok k, const std::string& what) {
    if (cur_.kind != k) fail("expected " + what);
    advance();
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + (cur_.kind == Tok::End ? " (at end of input)" : " near '" + cur_.text + "'"),
                     cur_.line);
  }

  void advance() { cur_ = lex_.next(); }

  Lexer lex_;
  Token cur_{Tok::End, {}, 1};
};

}  // namespace

Atom parse_atom(std::string_view text) {
  Parser p(text);
  Atom a = p.atom();
  if (!p.at_end()) throw ParseError("trailing input after atom", 1);
  return a;
}

ProbRule parse_rule(std::string_view text) {
  Parser p(text);
  ProbRule r = p.rule();
  if (!p.at_end()) throw ParseError("trailing input after rule", 1);
  return r;
}

std::vector<ProbRule> parse_program(std::string_view text) {
  Parser p(text);
  std::vector<ProbRule> out;
  while (!p.at_end()) out.push_back(p.rule());
  return out;
}

}  // namespace eoilp::logic
