#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace eoilp::logic {

class LogicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by evaluate() when a program has a cycle through negation.
class StratificationError : public LogicError {
 public:
  StratificationError(const std::string& msg, std::vector<std::string> cycle)
      : LogicError(msg), cycle_(std::move(cycle)) {}
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

class UnsafeRuleError : public LogicError {
 public:
  using LogicError::LogicError;
};

/// A constant symbol, a scaled integer, or a rule variable.
struct Term {
  enum class Kind : std::uint8_t { Symbol, Integer, Variable };

  Kind kind = Kind::Symbol;
  std::string text;  // symbol or variable name
  std::int64_t value = 0;

  static Term symbol(std::string name) { return {Kind::Symbol, std::move(name), 0}; }
  static Term integer(std::int64_t v) { return {Kind::Integer, {}, v}; }
  static Term variable(std::string name) { return {Kind::Variable, std::move(name), 0}; }

  bool is_variable() const { return kind == Kind::Variable; }
  bool is_anonymous() const { return kind == Kind::Variable && text == "_"; }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  Atom() = default;
  Atom(std::string pred, std::vector<Term> a = {}) : predicate(std::move(pred)), args(std::move(a)) {}

  bool is_ground() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct AtomHash {
  std::size_t operator()(const Atom& a) const noexcept;
};

enum class CompareOp : std::uint8_t { LessEq, GreaterEq };

struct Comparison {
  std::string variable;
  CompareOp op = CompareOp::LessEq;
  std::int64_t bound = 0;

  bool holds(std::int64_t v) const { return op == CompareOp::LessEq ? v <= bound : v >= bound; }
  friend bool operator==(const Comparison&, const Comparison&) = default;
  friend auto operator<=>(const Comparison&, const Comparison&) = default;
};

struct Literal {
  enum class Kind : std::uint8_t { Positive, Negative, Compare };

  Kind kind = Kind::Positive;
  Atom atom;
  Comparison cmp;

  static Literal pos(Atom a) { return {Kind::Positive, std::move(a), {}}; }
  static Literal neg(Atom a) { return {Kind::Negative, std::move(a), {}}; }
  static Literal compare(std::string var, CompareOp op, std::int64_t bound) {
    return {Kind::Compare, {}, {std::move(var), op, bound}};
  }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct NormalRule {
  Atom head;
  std::vector<Literal> body;

  friend bool operator==(const NormalRule&, const NormalRule&) = default;
  friend auto operator<=>(const NormalRule&, const NormalRule&) = default;
};

/// A set of ground atoms with a per-predicate index for matching.
class FactSet {
 public:
  FactSet() = default;
  FactSet(std::initializer_list<Atom> atoms);

  /// Returns true if the atom was not already present.
  bool insert(Atom atom);
  bool contains(const Atom& atom) const { return atoms_.contains(atom); }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  /// Atoms with the given predicate, in insertion order.
  const std::vector<Atom>& with_predicate(const std::string& predicate) const;

  /// All atoms in canonical (sorted) order.
  std::vector<Atom> sorted() const;

  bool subset_of(const FactSet& other) const;
  friend bool operator==(const FactSet& a, const FactSet& b) {
    return a.size() == b.size() && a.subset_of(b);
  }

 private:
  std::unordered_set<Atom, AtomHash> atoms_;
  std::unordered_map<std::string, std::vector<Atom>> by_predicate_;
};

struct PartialInterpretation {
  FactSet inc;
  FactSet exc;
};

/// Per-example context program: ground facts plus optional rules.
struct Context {
  FactSet facts;
  std::vector<NormalRule> rules;
};

/// Weighted context-dependent partial interpretation.
struct Wcdpi {
  std::string id;
  int penalty = 100;
  PartialInterpretation pi;
  Context ctx;
};

/// Throws UnsafeRuleError naming the first unbound variable.
void check_safety(const NormalRule& rule);
bool is_safe(const NormalRule& rule);

/// Least fixed point of a stratified program over the given facts.
FactSet evaluate(std::span<const NormalRule> program, const FactSet& facts);

bool extends(const FactSet& interp, const PartialInterpretation& pi);

/// True iff the unique answer set of program ∪ e.ctx extends e.pi.
bool accepts(std::span<const NormalRule> program, const Wcdpi& e);

/// True iff some grounding of the rule body holds in the (total) interpretation.
bool body_satisfied(const NormalRule& rule, const FactSet& interp);

// Text form. Printing is canonical; parsing accepts any whitespace and `%` comments.

/// A rule optionally annotated with a probability, `0.7: h :- b.`
struct ProbRule {
  std::optional<double> phi;
  NormalRule rule;
};

class ParseError : public LogicError {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : LogicError("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Literal& l);
std::string to_string(const NormalRule& r);
std::string to_string(const ProbRule& r);
std::string format_probability(double phi);

Atom parse_atom(std::string_view text);
ProbRule parse_rule(std::string_view text);
std::vector<ProbRule> parse_program(std::string_view text);

}  // namespace eoilp::logic
