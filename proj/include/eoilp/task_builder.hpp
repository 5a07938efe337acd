#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eoilp/campaign.hpp"
#include "eoilp/dataset.hpp"
#include "eoilp/simulator.hpp"
#include "eoilp/solver.hpp"

namespace eoilp::tasks {

class TaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 2k boundaries per variable type. Ratio types scale the nominal value;
/// temperatures add kelvin offsets to it.
struct BucketScheme {
  int k = 2;
  std::vector<double> ratio;        // pressure, flow, fraction, time
  std::vector<double> temperature;  // offsets

  static BucketScheme with_k(int k);
  void validate() const;
  /// low<k> ... low1 normal high1 ... high<k>
  std::vector<std::string> labels() const;
};

/// Bucket index in [0, 2k], k being normal. Boundaries belong to the bucket nearer normal.
int bucket_index(double value, sim::VarType type, double nominal, const BucketScheme& s);
std::string bucketize(double value, sim::Var v, double nominal, const BucketScheme& s);

struct Multiplier {
  double value = 1.0;
  int exponent = 0;
  bool constant = false;  // degenerate column; multiplier defaults to 1
};

/// Smallest 10^m with (max - min) * 10^m >= 10, clamped to [1e-2, 1e3].
Multiplier choose_multiplier(double min, double max);
Multiplier choose_multiplier(const std::vector<double>& column);

/// value * multiplier rounded half away from zero.
std::int64_t scale_value(double value, double multiplier);

/// Monitored variables of components strictly upstream of the variable's component.
std::vector<sim::Var> upstream(sim::Var v);
int stage_of(sim::Var v);

enum class ProcVars { All, RealWorld, M1M2 };
std::string_view to_string(ProcVars p);
ProcVars parse_proc_vars(std::string_view s);
std::vector<sim::Var> selected_vars(ProcVars p);

struct LearningParams {
  harness::Mode task = harness::Mode::Dynamic;
  std::string experiments = "nontrivial6";
  std::size_t n_runs = 75;
  double t_short_term = 6.0;
  ProcVars proc_vars = ProcVars::RealWorld;
  double validation_fraction = 0.2;
  BucketScheme buckets = BucketScheme::with_k(2);
  std::vector<double> phi = hyp::default_phi_grid();
  solver::SearchBudget budget;

  void validate() const;
};

/// `key = value` file: task, experiments, n_runs, t_short_term, proc_vars, validation_fraction,
/// k, phi, max_body_len, max_rules_per_event, max_thresholds, candidate_cap. Unknown keys are errors.
LearningParams parse_learning_params(std::string_view text, LearningParams base = {});
/// Applies one `key = value` assignment.
void set_learning_param(LearningParams& p, std::string_view key, std::string_view value);
std::string print_learning_params(const LearningParams& p);

logic::Atom failure_atom(std::string_view label);
/// Failure label of a failure atom; inverse of failure_atom.
std::string failure_label(const logic::Atom& a);

/// One built example plus where it came from.
struct ExampleSource {
  std::string failure;
  std::int64_t run_index = 0;
  std::optional<sim::Var> reference;  // static tasks
};

struct BuiltTask {
  solver::DisplasTask task;
  std::vector<ExampleSource> sources;  // parallel to task.positives
  std::map<std::string, Multiplier> multipliers;
  std::map<std::string, double> nominal;  // per variable name
  std::vector<std::string> warnings;
};

/// Which (failure, run_index) pairs to use; all of them when empty.
using RunFilter = std::vector<std::pair<std::string, std::int64_t>>;

/// One example per (run, reference variable); sentinel rows are skipped.
BuiltTask build_static_task(const harness::Dataset& d, const LearningParams& p, const RunFilter& runs = {});
/// One example per run; sentinel runs are skipped.
BuiltTask build_dynamic_task(const harness::Dataset& d, const LearningParams& p, const RunFilter& runs = {});

/// Variable-name -> per-run context for held-out runs, with the multipliers and
/// nominal values fixed by a training build.
logic::Wcdpi dynamic_example(const harness::Dataset& d, const BuiltTask& reference, const LearningParams& p,
                             const std::string& failure, std::int64_t run_index);

/// The task in LAS textual syntax, for inspection.
std::string to_las(const solver::DisplasTask& t);

}  // namespace eoilp::tasks
