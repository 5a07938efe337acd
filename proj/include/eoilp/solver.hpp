#pragma once

#include <map>
#include <string>
#include <vector>

#include "eoilp/hypothesis_space.hpp"
#include "eoilp/logic.hpp"

namespace eoilp::solver {

inline constexpr double kEpsilon = 0.05;

/// Background, mode bias and examples. Events are the atoms declared in bias.heads.
struct DisplasTask {
  std::vector<logic::NormalRule> background;
  hyp::ModeBias bias;
  std::vector<logic::Wcdpi> positives;
  std::vector<logic::Wcdpi> negatives;
  hyp::PriorWeights weights;
  double epsilon = kEpsilon;
  /// Explicit comparison thresholds per numeric key; keys absent here are derived from the contexts.
  hyp::ThresholdMap thresholds;

  /// Throws std::invalid_argument on a malformed task.
  void validate() const;
};

struct SearchBudget {
  int max_body_len = 3;
  int max_rules_per_event = 4;
  std::size_t max_thresholds = 8;
  std::size_t candidate_cap = hyp::kDefaultCandidateCap;
  unsigned workers = 1;
};

struct Hypothesis {
  std::vector<hyp::ScoredRule> rules;
  /// Printed event atom -> indices into rules.
  std::map<std::string, std::vector<std::size_t>> per_event_index;

  std::vector<logic::ProbRule> prob_rules() const;
};

struct PosteriorScore {
  double log_likelihood = 0.0;
  double log_prior_odds = 0.0;
  double total = 0.0;
};

/// Largest phi among rules for `event` whose body holds, or epsilon when none fires.
double predicted_probability(const Hypothesis& h, std::span<const logic::NormalRule> background,
                             const logic::Context& ctx, const logic::Atom& event, double epsilon = kEpsilon);

/// Examples that carry evidence about `event`, with their polarity.
struct EventExample {
  const logic::Wcdpi* example;
  bool positive;
  double weight;
};
std::vector<EventExample> event_examples(const DisplasTask& task, const logic::Atom& event);

PosteriorScore log_posterior(const Hypothesis& h, const DisplasTask& task, const logic::Atom& event);

/// Thresholds for every numeric key used by a capture schema: explicit ones first,
/// otherwise candidates from the values seen in the evaluated contexts. With an
/// event, only the contexts of that event's positive examples are scanned, so
/// bounds sit at the edges of the event's own value range.
hyp::ThresholdMap derive_thresholds(const DisplasTask& task, std::size_t max_count,
                                    const logic::Atom* event = nullptr);

Hypothesis solve_event(const DisplasTask& task, const logic::Atom& event, const SearchBudget& budget = {});
Hypothesis solve(const DisplasTask& task, const SearchBudget& budget = {});

/// Printed event atom -> predicted probability, for every declared event.
std::map<std::string, double> predict(const Hypothesis& h, const DisplasTask& task, const logic::Context& ctx);

/// Rules in the textual syntax, one per line, grouped by event in declaration order.
std::string format_hypothesis(const Hypothesis& h);
/// Parses the textual syntax back. Each rule needs a probability prefix.
Hypothesis parse_hypothesis(std::string_view text, const hyp::PriorWeights& w = {});

/// Per-event posterior decomposition as indented JSON.
std::string score_report_json(const Hypothesis& h, const DisplasTask& task);

}  // namespace eoilp::solver
