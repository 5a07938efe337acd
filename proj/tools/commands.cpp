#include "commands.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "eoilp/campaign.hpp"
#include "eoilp/dataset.hpp"
#include "eoilp/evaluation.hpp"
#include "eoilp/flowsheet.hpp"
#include "eoilp/simulator.hpp"
#include "eoilp/solver.hpp"
#include "eoilp/task_builder.hpp"
#include "eoilp/text_config.hpp"

namespace eoilp::cli {

namespace fs = std::filesystem;

namespace {

tasks::LearningParams load_params(const Common& c) {
  tasks::LearningParams p;
  if (!c.params.empty()) p = tasks::parse_learning_params(config::read_file(c.params));
  for (const auto& kv : c.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw config::ConfigError("--set expects key=value, got '" + kv + "'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    tasks::set_learning_param(p, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw config::ConfigError(e.what());
  }
  return p;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else config::write_file(path, text);
}

std::string state_header(bool with_time) {
  std::string h = with_time ? "timepoint" : "";
  for (const auto& v : sim::variables()) h += (h.empty() ? "" : ",") + std::string(v.name);
  return h + "\n";
}

std::string state_row(const sim::ProcessState& s, std::optional<double> t) {
  std::string row;
  char buf[40];
  if (t) {
    std::snprintf(buf, sizeof buf, "%.17g", *t);
    row = buf;
  }
  for (double v : s.values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    row += (row.empty() ? "" : ",") + std::string(buf);
  }
  return row + "\n";
}

sim::FlowsheetConfig load_flowsheet(const std::string& path) {
  if (path.empty()) return {};
  return sim::parse_flowsheet(config::read_file(path));
}

}  // namespace

int cmd_simulate(const Common& c, const SimulateArgs& a) {
  if (!c.params.empty() || !c.set.empty()) load_params(c);
  const auto base = load_flowsheet(a.config);
  base.validate();
  const auto mode = harness::parse_mode(a.mode);
  harness::PerturbationFile pf;
  if (!a.perturbation.empty()) pf = harness::parse_perturbation_file(config::read_file(a.perturbation));
  std::mt19937_64 rng(harness::run_seed(c.seed.value_or(0), 0, 0, 0));
  const auto applied = harness::apply_perturbation(pf, base, rng);
  if (mode == harness::Mode::Static) {
    const auto res = sim::solve_static(applied.config);
    if (!res.solved()) {
      std::cerr << "unsolved: " << res.reason << "\n";
      return kDomain;
    }
    std::cout << state_header(false) << state_row(res.state, std::nullopt);
    return kOk;
  }
  sim::DynamicOptions opts;
  opts.noise_seed = rng();
  opts.noise_free = applied.perturbed_vars;
  const auto tp = a.timepoints.empty() ? harness::default_timepoints() : a.timepoints;
  const auto res = sim::simulate_dynamic(base, applied.config, tp, opts);
  if (!res.solved()) {
    std::cerr << "unsolved: " << res.reason << "\n";
    return kDomain;
  }
  std::cout << state_header(true);
  for (const auto& p : res.trajectory) std::cout << state_row(p.state, p.time);
  return kOk;
}

int cmd_gen_data(const Common& c, const GenDataArgs& a) {
  harness::CampaignSpec spec;
  if (!a.manifest.empty()) {
    spec = harness::parse_manifest(config::read_file(a.manifest), fs::path(a.manifest).parent_path().string());
  } else {
    const auto p = load_params(c);
    spec.experiments = harness::experiment_set(a.experiments.value_or(p.experiments));
    spec.n_runs = p.n_runs;
    spec.mode = p.task;
  }
  if (a.experiments && !a.manifest.empty()) spec.experiments = harness::experiment_set(*a.experiments);
  if (a.n_runs) spec.n_runs = *a.n_runs;
  if (a.mode) spec.mode = harness::parse_mode(*a.mode);
  if (!a.config.empty()) spec.base = load_flowsheet(a.config);
  if (c.seed) spec.master_seed = *c.seed;
  if (c.workers) spec.workers = *c.workers;
  harness::CampaignStats stats;
  const auto d = harness::run_campaign(spec, &stats);
  write_or_print(a.out, harness::format_dataset(d));
  std::cerr << "runs " << stats.runs << ", resamples " << stats.resamples << ", sentinels " << stats.sentinels
            << ", rows " << d.rows.size() << "\n";
  return kOk;
}

int cmd_learn(const Common& c, const LearnArgs& a) {
  const auto p = load_params(c);
  const auto d = harness::read_dataset(a.data);
  if (d.mode != p.task)
    throw config::ConfigError("dataset is " + std::string(harness::to_string(d.mode)) + " but task is " +
                              std::string(harness::to_string(p.task)));
  const auto split = eval::split(eval::usable_runs(d, p), p.validation_fraction, c.seed.value_or(0));
  tasks::RunFilter filter;
  for (const auto& r : split.train) filter.emplace_back(r.failure, r.run_index);
  const auto built = p.task == harness::Mode::Dynamic ? tasks::build_dynamic_task(d, p, filter)
                                                      : tasks::build_static_task(d, p, filter);
  for (const auto& w : built.warnings) std::cerr << "warning: " << w << "\n";
  auto budget = p.budget;
  budget.workers = c.workers.value_or(0);
  const auto h = solver::solve(built.task, budget);
  write_or_print(a.out, solver::format_hypothesis(h));
  if (!a.split_out.empty()) config::write_file(a.split_out, eval::format_split(split));
  if (!a.las_out.empty()) config::write_file(a.las_out, tasks::to_las(built.task));
  if (!a.score_out.empty()) config::write_file(a.score_out, solver::score_report_json(h, built.task) + "\n");
  return kOk;
}

int cmd_eval(const Common& c, const EvalArgs& a) {
  const auto p = load_params(c);
  const auto d = harness::read_dataset(a.data);
  if (d.mode != harness::Mode::Dynamic) throw config::ConfigError("evaluation needs a dynamic dataset");
  const auto h = solver::parse_hypothesis(config::read_file(a.hypothesis));
  const auto split = eval::split(eval::usable_runs(d, p), p.validation_fraction, c.seed.value_or(0));
  const auto report = eval::evaluate_on_split(d, p, h, split);
  write_or_print(a.out, eval::format_report_text(report));
  if (!a.csv_out.empty()) config::write_file(a.csv_out, eval::format_report_csv(report));
  if (!a.roc_out.empty()) config::write_file(a.roc_out, eval::format_roc_csv(report));
  if (!a.split_out.empty()) config::write_file(a.split_out, eval::format_split(split));
  return kOk;
}

int cmd_sweep(const Common& c, const SweepArgs& a) {
  const auto p = load_params(c);
  const auto d = harness::read_dataset(a.data);
  std::vector<eval::SweepRow> rows;
  if (a.standard) {
    rows = eval::standard_sweep_rows();
  } else {
    if (a.axis.empty() || a.values.empty()) throw config::ConfigError("sweep needs --axis and --values, or --standard");
    rows = eval::sweep_rows(a.axis, a.values);
  }
  eval::run_sweep(rows, d, p, c.seed.value_or(0), c.workers.value_or(0));
  write_or_print(a.out, eval::format_sweep_text(rows));
  if (!a.csv_out.empty()) config::write_file(a.csv_out, eval::format_sweep_csv(rows));
  for (const auto& r : rows)
    if (!r.error.empty()) return kDomain;
  return kOk;
}

int cmd_catalog(const std::string& write_dir) {
  for (const auto& e : harness::catalog()) {
    const char* kind = e.name == harness::kNominalLabel ? "nominal     " : e.trivial ? "trivial     " : "nontrivial  ";
    std::cout << kind << e.name << "  " << e.file << "\n";
    if (!write_dir.empty()) config::write_file((fs::path(write_dir) / e.file).string(), e.text);
  }
  return kOk;
}

int cmd_defaults(const std::string& what) {
  if (what == "flowsheet") std::cout << sim::print_flowsheet(sim::FlowsheetConfig{});
  else std::cout << tasks::print_learning_params(tasks::LearningParams{});
  return kOk;
}

}  // namespace eoilp::cli
