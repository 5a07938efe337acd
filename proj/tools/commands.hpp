#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eoilp::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDomain = 2 };

struct Common {
  std::optional<std::uint64_t> seed;  // 0 when absent
  std::optional<unsigned> workers;    // available parallelism when absent or 0
  std::string params;    // learning-parameter file
  std::vector<std::string> set;  // key=value learning-parameter overrides
};

struct SimulateArgs {
  std::string config;
  std::string mode = "static";
  std::string perturbation;
  std::vector<double> timepoints;
};

struct GenDataArgs {
  std::string manifest;
  std::string config;
  std::optional<std::string> experiments;
  std::optional<std::size_t> n_runs;
  std::optional<std::string> mode;
  std::string out;
};

struct LearnArgs {
  std::string data;
  std::string out;
  std::string split_out;
  std::string las_out;
  std::string score_out;
};

struct EvalArgs {
  std::string data;
  std::string hypothesis;
  std::string out;
  std::string csv_out;
  std::string roc_out;
  std::string split_out;
};

struct SweepArgs {
  std::string data;
  std::string axis;
  std::vector<std::string> values;
  bool standard = false;
  std::string out;
  std::string csv_out;
};

int cmd_simulate(const Common& c, const SimulateArgs& a);
int cmd_gen_data(const Common& c, const GenDataArgs& a);
int cmd_learn(const Common& c, const LearnArgs& a);
int cmd_eval(const Common& c, const EvalArgs& a);
int cmd_sweep(const Common& c, const SweepArgs& a);
int cmd_catalog(const std::string& write_dir);
int cmd_defaults(const std::string& what);

}  // namespace eoilp::cli
