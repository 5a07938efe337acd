#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eoilp/logic.hpp"

namespace eoilp::hyp {

/// A head schema: the ground atom a rule may conclude.
struct HeadDecl {
  logic::Atom atom;
};

/// A body schema. Ground schemas contribute one literal; capture schemas
/// bind their last argument to a variable that may carry up to one `<=`
/// and one `>=` comparison against data-derived thresholds.
struct BodyDecl {
  logic::Atom atom;           // for captures, the last argument is ignored
  bool capture = false;
  std::string numeric_var;    // threshold key for captures
  std::string var_name = "V"; // variable name used when printing
  int min_comparisons = 0;
  bool negatable = false;
  bool nominal = false;       // used by the forbid-all-nominal constraint

  /// The atom pattern with the capture slot replaced by `var`.
  logic::Atom pattern(const std::string& var) const;
};

struct NumericVarSpec {
  std::string variable;
  std::int64_t min = 0;
  std::int64_t max = 0;
  double multiplier = 1.0;
};

struct BiasConstraint {
  enum class Kind { ForbidAllNominalBody, MaxBodyLength, ForbidPredicatePair };
  Kind kind = Kind::MaxBodyLength;
  int max_body_length = 0;
  std::string first, second;

  static BiasConstraint forbid_all_nominal() { return {Kind::ForbidAllNominalBody, 0, {}, {}}; }
  static BiasConstraint max_length(int n) { return {Kind::MaxBodyLength, n, {}, {}}; }
  static BiasConstraint forbid_pair(std::string a, std::string b) {
    return {Kind::ForbidPredicatePair, 0, std::move(a), std::move(b)};
  }
};

/// Default grid {0.1, 0.2, ..., 1.0}.
std::vector<double> default_phi_grid();

struct ModeBias {
  std::vector<HeadDecl> heads;
  std::vector<BodyDecl> bodies;
  std::vector<NumericVarSpec> numeric_vars;
  std::vector<BiasConstraint> constraints;
  std::vector<double> phi = default_phi_grid();

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;
};

struct PriorWeights {
  int head = 2;
  int atom = 1;
  int comparison = 1;
  double base = 0.5;
};

int rule_cost(const logic::NormalRule& rule, const PriorWeights& w = {});
double prior(const logic::NormalRule& rule, const PriorWeights& w = {});

struct ScoredRule {
  logic::NormalRule rule;
  double phi = 1.0;
  double prior = 0.5;
  int cost = 0;

  logic::ProbRule as_prob_rule() const { return {phi, rule}; }
};

/// Floor midpoints between consecutive distinct values plus the extremes,
/// subsampled at evenly spaced sample quantiles when more than max_count.
std::vector<std::int64_t> threshold_candidates(std::vector<std::int64_t> values, std::size_t max_count);

using ThresholdMap = std::map<std::string, std::vector<std::int64_t>>;

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& msg, std::string schema)
      : std::runtime_error(msg), schema_(std::move(schema)) {}
  const std::string& dominating_schema() const { return schema_; }

 private:
  std::string schema_;
};

/// One choice for a single body schema: the atom (or its negation) plus any comparisons.
struct LiteralGroup {
  std::size_t decl = 0;
  bool negated = false;
  std::optional<std::int64_t> ge, le;

  int length() const { return 1 + (ge ? 1 : 0) + (le ? 1 : 0); }
  std::vector<logic::Literal> literals(const BodyDecl& d) const;
};

/// A rule body as a strictly increasing sequence of groups (by decl index).
using Body = std::vector<LiteralGroup>;

/// All literal groups each body schema admits, indexed by decl.
std::vector<std::vector<LiteralGroup>> literal_groups(const ModeBias& bias, const ThresholdMap& thresholds);

/// Every body (including the empty one) satisfying length and bias constraints,
/// in deterministic order.
void for_each_body(const ModeBias& bias, int max_body_len, const ThresholdMap& thresholds,
                   const std::function<void(const Body&)>& visit);

logic::NormalRule make_rule(const ModeBias& bias, const logic::Atom& head, const Body& body);

bool violates_constraints(const ModeBias& bias, const logic::NormalRule& rule);

inline constexpr std::size_t kDefaultCandidateCap = 5'000'000;

/// Number of (rule, phi) candidates. Spaces far beyond the default cap report an upper bound.
std::size_t count_candidates(const ModeBias& bias, int max_body_len, const ThresholdMap& thresholds);

/// Throws BudgetExceeded naming the schema with the most literal groups when
/// the candidate count exceeds `cap`.
void check_budget(const ModeBias& bias, int max_body_len, const ThresholdMap& thresholds, std::size_t cap);

/// Streams every candidate. Throws BudgetExceeded before emitting anything
/// when the candidate count exceeds `cap`.
void enumerate_rules(const ModeBias& bias, int max_body_len, const ThresholdMap& thresholds,
                     const std::function<void(const ScoredRule&)>& visit,
                     std::size_t cap = kDefaultCandidateCap, const PriorWeights& w = {});

std::vector<ScoredRule> enumerate_rules(const ModeBias& bias, int max_body_len,
                                        const ThresholdMap& thresholds,
                                        std::size_t cap = kDefaultCandidateCap,
                                        const PriorWeights& w = {});

// Mode-bias text format, one declaration per line:
//   phi 0.1 0.2 ... 1
//   head <ground atom>
//   body <ground atom> [negatable] [nominal]
//   body <pred>(<args>,#) numeric=<key> [var=<Name>] [min_cmp=<n>] [nominal]
//   numeric <key> <min> <max> <multiplier>
//   constraint max_body_length <n> | constraint forbid_all_nominal | constraint forbid_pair <p> <q>
// `%` starts a comment.
ModeBias parse_mode_bias(std::string_view text);
std::string print_mode_bias(const ModeBias& bias);

}  // namespace eoilp::hyp
