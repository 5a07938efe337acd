#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eoilp/dataset.hpp"
#include "eoilp/flowsheet.hpp"
#include "eoilp/perturbation.hpp"

namespace eoilp::harness {

class CampaignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Experiment {
  std::string name;  // failure label "location:kind"; "null" is the nominal run
  PerturbationFile perturbation;
  bool trivial = false;

  std::string location() const;
  std::string kind() const;
};

/// Built-in failure catalog with the perturbation text of every entry.
struct CatalogEntry {
  std::string_view name;
  std::string_view file;  // basename under data/perturbations
  std::string_view text;
  bool trivial;
};
const std::vector<CatalogEntry>& catalog();

/// Named experiment sets: nominal, trivial4, nontrivial6, nontrivial10, all; or a single catalog label.
/// Every set except a bare label includes the nominal experiment.
std::vector<Experiment> experiment_set(std::string_view name);
Experiment catalog_experiment(std::string_view name);

inline const std::vector<double>& default_timepoints() {
  static const std::vector<double> t{2, 4, 6, 8, 10, 20, 30, 40, 60, 80, 100};
  return t;
}

std::uint64_t splitmix64(std::uint64_t x);
/// Seed of one attempt of one run: splitmix64(splitmix64(master) ^ (e << 40 | r << 8 | attempt)).
/// Injective for e < 2^24, r < 2^32, attempt < 2^8.
std::uint64_t run_seed(std::uint64_t master, std::size_t experiment, std::size_t run, unsigned attempt);

inline constexpr unsigned kMaxResamples = 3;

struct CampaignSpec {
  std::vector<Experiment> experiments;
  std::size_t n_runs = 125;
  Mode mode = Mode::Static;
  std::vector<double> timepoints = default_timepoints();
  std::uint64_t master_seed = 0;
  sim::FlowsheetConfig base;
  unsigned workers = 1;  // 0: hardware concurrency
};

struct CampaignStats {
  std::size_t runs = 0, resamples = 0, sentinels = 0;
};

/// Rows ordered by (experiment, run_index, timepoint) regardless of worker count.
Dataset run_campaign(const CampaignSpec& spec, CampaignStats* stats = nullptr);

/// `key = value` manifest: mode, n_runs, seed, workers, experiments (set names or labels),
/// timepoints, flowsheet (path), and `[experiment.<label>]` sections with `file` and `trivial`
/// for experiments outside the catalog. Relative paths resolve against `base_dir`.
CampaignSpec parse_manifest(std::string_view text, const std::string& base_dir = ".");

}  // namespace eoilp::harness
