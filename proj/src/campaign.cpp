#include "eoilp/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <random>
#include <thread>

#include "eoilp/simulator.hpp"
#include "eoilp/text_config.hpp"

namespace eoilp::harness {

std::string Experiment::location() const { return name.substr(0, name.find(':')); }
std::string Experiment::kind() const {
  const auto p = name.find(':');
  return p == std::string::npos ? std::string() : name.substr(p + 1);
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> c{
      {"null", "nominal.csv", "param,unit,default,min,max,instr\n", false},
      // trivial: the failure is visible on a directly perturbed sensor
      {"source:lowPressure", "source_low_pressure.csv",
       "param,unit,default,min,max,instr\n"
       "SRCR1.P,bar,2,1.6,1.98,uniform\n"
       "SRCE1.P,bar,2,1.95,2.05,uniform\n"
       "SRCR1.M[C2H4],kmol,4464,4240,4360,uniform\n",
       true},
      {"source:lowTemperature", "source_low_temperature.csv",
       "param,unit,default,min,max,instr\n"
       "SRCR1.T,degC,40,5,20,uniform\n",
       true},
      {"tempControlValve:stuckOpen", "temp_control_valve_stuck_open.csv",
       "param,unit,default,min,max,instr\n"
       "XC1.SP,bool,uncheck,,,\n"
       "XC1.OP,bool,check,,,\n"
       "XC1.OP,fraction,1,1,1,\n",
       true},
      {"sink:highPressure", "sink_high_pressure.csv",
       "param,unit,default,min,max,instr\n"
       "SNK1.P,bar,3,3.3,3.5,uniform\n",
       true},
      // nontrivial six
      {"source:missingEthylene", "source_missing_ethylene.csv",
       "param,unit,default,min,max,instr\n"
       "SRCR1.M[C2H4],kmol,4464,1500,3000,uniform\n",
       false},
      {"flowControlLoop:lowSetpoint", "flow_control_loop_low_setpoint.csv",
       "param,unit,default,min,max,instr\n"
       "FC.SP,kg/s,1,0.6,0.85,uniform\n",
       false},
      {"tempControlLoop:lowSetpoint", "temp_control_loop_low_setpoint.csv",
       "param,unit,default,min,max,instr\n"
       "XC1.SP,degC,150,120,140,uniform\n",
       false},
      {"beforeCompressor:leak", "before_compressor_leak.csv",
       "param,unit,default,min,max,instr\n"
       "LEAK1.F,fraction,0,0.1,0.4,uniform\n",
       false},
      {"coolingWater:lowPressure", "cooling_water_low_pressure.csv",
       "param,unit,default,min,max,instr\n"
       "SRCE1.P,bar,2,1.2,1.6,uniform\n",
       false},
      {"coolingWaterOutValve:stuckClosed", "cooling_water_out_valve_stuck_closed.csv",
       "param,unit,default,min,max,instr\n"
       "CWV.OP,fraction,0,0,0,\n",
       false},
      // extra four of nontrivial10
      {"beforeReactor:leak", "before_reactor_leak.csv",
       "param,unit,default,min,max,instr\n"
       "LEAK2.F,fraction,0,0.1,0.4,uniform\n",
       false},
      {"heatExchanger:fouling", "heat_exchanger_fouling.csv",
       "param,unit,default,min,max,instr\n"
       "E2.UA,kW/K,1,0.2,0.45,uniform\n",
       false},
      {"compressor:efficiencyLoss", "compressor_efficiency_loss.csv",
       "param,unit,default,min,max,instr\n"
       "K1.EFF,fraction,0.75,0.5,0.65,uniform\n",
       false},
      {"flowValve:stuck", "flow_valve_stuck.csv",
       "param,unit,default,min,max,instr\n"
       "FC.SP,bool,uncheck,,,\n"
       "FC.OP,bool,check,,,\n"
       "FC.OP,fraction,0.4,0.3,0.45,uniform\n",
       false},
  };
  return c;
}

Experiment catalog_experiment(std::string_view name) {
  for (const auto& e : catalog())
    if (e.name == name) return {std::string(e.name), parse_perturbation_file(e.text), e.trivial};
  throw CampaignError("unknown experiment '" + std::string(name) + "'");
}

std::vector<Experiment> experiment_set(std::string_view name) {
  const auto& c = catalog();
  auto slice = [&](std::size_t from, std::size_t to) {
    std::vector<Experiment> out{catalog_experiment("null")};
    for (std::size_t i = from; i < to; ++i) out.push_back(catalog_experiment(c[i].name));
    return out;
  };
  if (name == "nominal") return slice(0, 0);
  if (name == "trivial4") return slice(1, 5);
  if (name == "nontrivial6") return slice(5, 11);
  if (name == "nontrivial10") return slice(5, 15);
  if (name == "all") return slice(1, c.size());
  return {catalog_experiment(name)};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t run_seed(std::uint64_t master, std::size_t experiment, std::size_t run, unsigned attempt) {
  const std::uint64_t key = (static_cast<std::uint64_t>(experiment) << 40) | (static_cast<std::uint64_t>(run) << 8) |
                            (attempt & 0xFFu);
  return splitmix64(splitmix64(master) ^ key);
}

namespace {

struct RunResult {
  std::vector<DataRow> rows;
  unsigned attempts = 0;
  bool sentinel = false;
  std::string error;
};

RunResult execute_run(const CampaignSpec& spec, const sim::StateVec& x0, std::size_t e, std::size_t r) {
  const Experiment& ex = spec.experiments[e];
  RunResult out;
  for (unsigned attempt = 0; attempt <= kMaxResamples; ++attempt) {
    out.attempts = attempt + 1;
    std::mt19937_64 rng(run_seed(spec.master_seed, e, r, attempt));
    AppliedPerturbation ap;
    try {
      ap = apply_perturbation(ex.perturbation, spec.base, rng);
    } catch (const std::exception& err) {
      out.error = "experiment '" + ex.name + "': " + err.what();
      return out;
    }
    if (spec.mode == Mode::Static) {
      const auto res = sim::solve_static(ap.config, {.warm_start = x0});
      if (!res.solved()) continue;
      out.rows.push_back({ex.name, static_cast<std::int64_t>(r), 0.0, res.state});
      return out;
    }
    sim::DynamicOptions opts;
    opts.noise_seed = rng();
    opts.noise_free = ap.perturbed_vars;
    const auto res = sim::simulate_from(x0, spec.base, ap.config, spec.timepoints, opts);
    if (!res.solved()) continue;
    for (const auto& p : res.trajectory) out.rows.push_back({ex.name, static_cast<std::int64_t>(r), p.time, p.state});
    return out;
  }
  out.sentinel = true;
  sim::ProcessState nan;
  nan.values.fill(std::nan(""));
  if (spec.mode == Mode::Static) {
    out.rows.push_back({ex.name, static_cast<std::int64_t>(r), 0.0, nan});
  } else {
    out.rows.push_back({ex.name, static_cast<std::int64_t>(r), 0.0, nan});
    for (double t : spec.timepoints) out.rows.push_back({ex.name, static_cast<std::int64_t>(r), t, nan});
  }
  return out;
}

}  // namespace

Dataset run_campaign(const CampaignSpec& spec, CampaignStats* stats) {
  if (spec.n_runs < 1) throw CampaignError("n_runs must be at least 1");
  if (spec.experiments.empty()) throw CampaignError("campaign has no experiments");
  for (std::size_t i = 0; i < spec.experiments.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (spec.experiments[i].name == spec.experiments[j].name)
        throw CampaignError("duplicate experiment '" + spec.experiments[i].name + "'");
  if (spec.mode == Mode::Dynamic) {
    if (!std::is_sorted(spec.timepoints.begin(), spec.timepoints.end()) ||
        (!spec.timepoints.empty() && spec.timepoints.front() <= 0))
      throw CampaignError("timepoints must be positive and increasing");
  }
  try {
    spec.base.validate();
  } catch (const std::exception& e) {
    throw CampaignError(std::string("base configuration is invalid: ") + e.what());
  }
  const auto x0 = sim::steady_state_vector(spec.base);
  if (!x0) throw CampaignError("base configuration has no steady state");

  const std::size_t total = spec.experiments.size() * spec.n_runs;
  std::vector<RunResult> results(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i; !failed && (i = next.fetch_add(1)) < total;) {
      results[i] = execute_run(spec, *x0, i / spec.n_runs, i % spec.n_runs);
      if (!results[i].error.empty()) failed = true;
    }
  };
  unsigned n = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, total));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(work);
  }

  Dataset d;
  d.mode = spec.mode;
  CampaignStats s;
  for (auto& r : results) {
    if (!r.error.empty()) throw CampaignError(r.error);
    s.runs += 1;
    s.resamples += r.attempts ? r.attempts - 1 : 0;
    s.sentinels += r.sentinel;
    for (auto& row : r.rows) d.rows.push_back(std::move(row));
  }
  if (stats) *stats = s;
  return d;
}

CampaignSpec parse_manifest(std::string_view text, const std::string& base_dir) {
  namespace fs = std::filesystem;
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (fs::path(base_dir) / p).string(); };
  CampaignSpec spec;
  std::vector<std::string> names;
  struct Custom {
    std::string file;
    bool trivial = false;
    std::size_t line = 0;
  };
  std::vector<std::pair<std::string, Custom>> custom;
  auto custom_entry = [&](const std::string& label) -> Custom& {
    for (auto& [n, c] : custom)
      if (n == label) return c;
    return custom.emplace_back(label, Custom{}).second;
  };
  for (const auto& e : config::parse_key_values(text)) {
    if (e.key == "mode") {
      try {
        spec.mode = parse_mode(e.value);
      } catch (const std::invalid_argument& err) {
        throw config::ConfigError(err.what(), e.line);
      }
    } else if (e.key == "n_runs") {
      const auto v = config::to_int(e);
      if (v < 1) throw config::ConfigError("n_runs must be at least 1", e.line);
      spec.n_runs = static_cast<std::size_t>(v);
    } else if (e.key == "seed") {
      spec.master_seed = static_cast<std::uint64_t>(config::to_int(e));
    } else if (e.key == "workers") {
      const auto v = config::to_int(e);
      if (v < 0) throw config::ConfigError("workers must be non-negative", e.line);
      spec.workers = static_cast<unsigned>(v);
    } else if (e.key == "experiments") {
      names = config::to_list(e);
    } else if (e.key == "timepoints") {
      spec.timepoints.clear();
      for (const auto& t : config::to_list(e)) spec.timepoints.push_back(config::to_double({e.key, t, e.line}));
    } else if (e.key == "flowsheet") {
      spec.base = sim::parse_flowsheet(config::read_file(resolve(e.value)));
    } else if (e.key.starts_with("experiment.")) {
      const auto rest = e.key.substr(11);
      const auto dot = rest.rfind('.');
      if (dot == std::string::npos) throw config::ConfigError("unknown key '" + e.key + "'", e.line);
      auto& c = custom_entry(rest.substr(0, dot));
      const auto field = rest.substr(dot + 1);
      c.line = e.line;
      if (field == "file") c.file = e.value;
      else if (field == "trivial") c.trivial = config::to_bool(e);
      else throw config::ConfigError("unknown key '" + e.key + "'", e.line);
    } else {
      throw config::ConfigError("unknown key '" + e.key + "'", e.line);
    }
  }
  if (names.empty()) throw config::ConfigError("manifest lists no experiments");
  for (const auto& n : names) {
    auto it = std::find_if(custom.begin(), custom.end(), [&](const auto& c) { return c.first == n; });
    if (it != custom.end()) {
      if (it->second.file.empty()) throw config::ConfigError("experiment '" + n + "' has no file", it->second.line);
      spec.experiments.push_back(
          {n, parse_perturbation_file(config::read_file(resolve(it->second.file))), it->second.trivial});
      continue;
    }
    for (auto& ex : experiment_set(n))
      if (std::none_of(spec.experiments.begin(), spec.experiments.end(),
                       [&](const Experiment& x) { return x.name == ex.name; }))
        spec.experiments.push_back(std::move(ex));
  }
  return spec;
}

}  // namespace eoilp::harness
