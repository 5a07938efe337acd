#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "eoilp/campaign.hpp"
#include "eoilp/evaluation.hpp"
#include "eoilp/hypothesis_space.hpp"
#include "eoilp/logic.hpp"
#include "eoilp/task_builder.hpp"

using namespace eoilp::cli;

namespace {

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed for sampling and splitting (default 0)");
  cmd->add_option("--workers", c.workers, "Worker threads; 0 or absent uses available parallelism");
  cmd->add_option("--params", c.params, "Learning-parameter file (key = value)")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.set, "Learning-parameter override key=value; repeatable, wins over --params");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-injection campaigns and probabilistic rule learning for an ethylene oxide process"};
  app.require_subcommand(1);
  app.allow_extras(false);

  Common common;
  SimulateArgs sim;
  GenDataArgs gen;
  LearnArgs learn;
  EvalArgs ev;
  SweepArgs sw;
  std::string catalog_dir;
  std::string defaults_what;

  auto* s = app.add_subcommand("simulate", "Run one simulation and print the state (or trajectory) as CSV");
  add_common(s, common);
  s->add_option("--config", sim.config, "Flowsheet configuration file (default: built-in nominal plant)");
  s->add_option("--mode", sim.mode, "static or dynamic")->check(CLI::IsMember({"static", "dynamic"}));
  s->add_option("--perturbation", sim.perturbation, "Perturbation CSV applied to the configuration");
  s->add_option("--timepoints", sim.timepoints, "Dynamic sample times in seconds")->delimiter(',');

  auto* g = app.add_subcommand("gen-data", "Run a fault-injection campaign and write the dataset CSV");
  add_common(g, common);
  g->add_option("--manifest", gen.manifest, "Campaign manifest file")->check(CLI::ExistingFile);
  g->add_option("--config", gen.config, "Flowsheet configuration file overriding the manifest's");
  g->add_option("--experiments", gen.experiments, "Experiment set or catalog label");
  g->add_option("--runs", gen.n_runs, "Runs per experiment")->check(CLI::PositiveNumber);
  g->add_option("--mode", gen.mode, "static or dynamic")->check(CLI::IsMember({"static", "dynamic"}));
  g->add_option("--out", gen.out, "Dataset path (default stdout)");

  auto* l = app.add_subcommand("learn", "Learn a probabilistic hypothesis from the training split");
  add_common(l, common);
  l->add_option("--data", learn.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  l->add_option("--out", learn.out, "Hypothesis path (default stdout)");
  l->add_option("--split-out", learn.split_out, "Write the train/validate run indices");
  l->add_option("--las-out", learn.las_out, "Write the learning task in LAS syntax");
  l->add_option("--score-out", learn.score_out, "Write the per-event posterior decomposition as JSON");

  auto* e = app.add_subcommand("eval", "Evaluate a hypothesis on the validation split");
  add_common(e, common);
  e->add_option("--data", ev.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  e->add_option("--hypothesis", ev.hypothesis, "Hypothesis file")->required()->check(CLI::ExistingFile);
  e->add_option("--out", ev.out, "Text report path (default stdout)");
  e->add_option("--csv", ev.csv_out, "CSV report path");
  e->add_option("--roc", ev.roc_out, "Per-class ROC points CSV path");
  e->add_option("--split-out", ev.split_out, "Write the train/validate run indices");

  auto* w = app.add_subcommand("sweep", "Vary one learning parameter and tabulate the metrics");
  add_common(w, common);
  w->add_option("--data", sw.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  auto* axis = w->add_option("--axis", sw.axis, "Learning parameter to vary");
  w->add_option("--values", sw.values, "Values for the axis")->delimiter(',')->needs(axis);
  w->add_flag("--standard", sw.standard, "Four-axis study: experiments, n_runs, t_short_term, proc_vars")
      ->excludes(axis);
  w->add_option("--out", sw.out, "Text table path (default stdout)");
  w->add_option("--csv", sw.csv_out, "CSV table path");

  auto* c = app.add_subcommand("catalog", "List the built-in experiments");
  c->add_option("--write-dir", catalog_dir, "Also write every perturbation file into this directory");

  auto* dflt = app.add_subcommand("defaults", "Print the built-in flowsheet or learning parameters");
  dflt->add_option("what", defaults_what, "flowsheet or params")
      ->required()
      ->check(CLI::IsMember({"flowsheet", "params"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  try {
    if (s->parsed()) return cmd_simulate(common, sim);
    if (g->parsed()) return cmd_gen_data(common, gen);
    if (l->parsed()) return cmd_learn(common, learn);
    if (e->parsed()) return cmd_eval(common, ev);
    if (w->parsed()) return cmd_sweep(common, sw);
    if (c->parsed()) return cmd_catalog(catalog_dir);
    if (dflt->parsed()) return cmd_defaults(defaults_what);
  } catch (const eoilp::hyp::BudgetExceeded& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kDomain;
  } catch (const eoilp::harness::CampaignError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kDomain;
  } catch (const eoilp::tasks::TaskError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kDomain;
  } catch (const eoilp::eval::EvalError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kDomain;
  } catch (const eoilp::logic::StratificationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kDomain;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
