#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eoilp/dataset.hpp"
#include "eoilp/solver.hpp"
#include "eoilp/task_builder.hpp"

namespace eoilp::eval {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LabeledRun {
  std::string failure;
  std::int64_t run_index = 0;
  friend bool operator==(const LabeledRun&, const LabeledRun&) = default;
  friend auto operator<=>(const LabeledRun&, const LabeledRun&) = default;
};

struct Split {
  std::vector<LabeledRun> train, validate;  // each sorted by (failure, run_index)
};

/// Stratified by failure class. Per class, round(fraction * n) runs (at least one,
/// at most n - 1) go to validation, picked by a seeded Fisher-Yates shuffle.
Split split(std::vector<LabeledRun> runs, double fraction, std::uint64_t seed);

/// `failure,run_index,subset` rows, subset being train or validate.
std::string format_split(const Split& s);
Split parse_split(std::string_view text);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocResult {
  std::vector<RocPoint> points;  // from (0,0) to (1,1)
  double auc = 0.0;
};

/// Pair statistic with ties counted half; one curve point per distinct score.
RocResult roc_auc(const std::vector<std::pair<double, bool>>& scores);

struct ClassResult {
  std::string label;
  double auc = 0.0;
  std::size_t positives = 0;
  std::vector<RocPoint> roc;
};

struct MetricsReport {
  double min_auc = 0.0;
  double avg_auc = 0.0;
  double avg_body_len = 0.0;
  double avg_rules_per_class = 0.0;  // rules / classes with at least one rule
  double avg_rule_prob = 0.0;
  std::size_t rules = 0;
  std::vector<ClassResult> classes;
};

struct PredictionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<double>> cells;  // row per example, column per class
  std::vector<std::size_t> truth;          // column index of the true class
};

PredictionMatrix predict_matrix(const solver::Hypothesis& h, const solver::DisplasTask& task,
                                const std::vector<logic::Wcdpi>& examples);

/// Classes without validation positives are left out of the AUC aggregates.
MetricsReport evaluate_hypothesis(const solver::Hypothesis& h, const solver::DisplasTask& task,
                                  const std::vector<logic::Wcdpi>& validate);
/// Rule statistics only.
void fill_rule_metrics(MetricsReport& r, const solver::Hypothesis& h);

struct PipelineResult {
  Split split;
  tasks::BuiltTask train;
  solver::Hypothesis hypothesis;
  std::optional<MetricsReport> report;  // dynamic tasks only
};

/// split -> build -> solve -> evaluate on one dataset.
PipelineResult run_pipeline(const harness::Dataset& d, const tasks::LearningParams& p, std::uint64_t seed,
                            unsigned workers = 1);

/// Evaluates a stored hypothesis against the validation runs of a split.
MetricsReport evaluate_on_split(const harness::Dataset& d, const tasks::LearningParams& p,
                                const solver::Hypothesis& h, const Split& s);

/// Runs of the selection that are usable for learning (solved, within n_runs).
std::vector<LabeledRun> usable_runs(const harness::Dataset& d, const tasks::LearningParams& p);

struct SweepRow {
  std::string label;  // e.g. "t_short_term := 20"
  std::vector<std::pair<std::string, std::string>> assignments;
  std::optional<MetricsReport> report;
  std::string error;
};

/// One row per value along one axis.
std::vector<SweepRow> sweep_rows(const std::string& axis, const std::vector<std::string>& values);
/// The four axes of the standard study: experiments, n_runs, t_short_term, proc_vars.
std::vector<SweepRow> standard_sweep_rows();

/// Rows run concurrently on up to `workers` threads; row order is preserved.
void run_sweep(std::vector<SweepRow>& rows, const harness::Dataset& d, const tasks::LearningParams& base,
               std::uint64_t seed, unsigned workers = 1);

std::string format_report_text(const MetricsReport& r);
std::string format_report_csv(const MetricsReport& r);
std::string format_roc_csv(const MetricsReport& r);
std::string format_sweep_text(const std::vector<SweepRow>& rows);
std::string format_sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace eoilp::eval
