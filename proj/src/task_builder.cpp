#include "eoilp/task_builder.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "eoilp/text_config.hpp"

namespace eoilp::tasks {

using logic::Atom;
using logic::Term;
using sim::Var;
using sim::VarType;

BucketScheme BucketScheme::with_k(int k) {
  if (k < 0) throw std::invalid_argument("bucket count k must be non-negative");
  BucketScheme s;
  s.k = k;
  if (k == 2) {
    s.ratio = {0.5, 0.8, 1.2, 1.5};
    s.temperature = {-30, -10, 10, 30};
    return s;
  }
  for (int i = k; i >= 1; --i) {
    s.ratio.push_back(1.0 - 0.5 * i / k);
    s.temperature.push_back(-30.0 * i / k);
  }
  for (int i = 1; i <= k; ++i) {
    s.ratio.push_back(1.0 + 0.5 * i / k);
    s.temperature.push_back(30.0 * i / k);
  }
  return s;
}

void BucketScheme::validate() const {
  const auto n = static_cast<std::size_t>(2 * k);
  if (k < 0 || ratio.size() != n || temperature.size() != n)
    throw std::invalid_argument("bucket scheme needs exactly 2k boundaries per type");
  for (std::size_t i = 1; i < n; ++i)
    if (!(ratio[i - 1] < ratio[i]) || !(temperature[i - 1] < temperature[i]))
      throw std::invalid_argument("bucket boundaries must be strictly increasing");
  if (k > 0 && (ratio[k - 1] > 1 || ratio[k] < 1 || temperature[k - 1] > 0 || temperature[k] < 0))
    throw std::invalid_argument("bucket boundaries must bracket the nominal value");
}

std::vector<std::string> BucketScheme::labels() const {
  std::vector<std::string> out;
  for (int i = k; i >= 1; --i) out.push_back("low" + std::to_string(i));
  out.emplace_back("normal");
  for (int i = 1; i <= k; ++i) out.push_back("high" + std::to_string(i));
  return out;
}

int bucket_index(double value, VarType type, double nominal, const BucketScheme& s) {
  if (!std::isfinite(value)) throw TaskError("cannot bucketize a non-finite value");
  const bool temp = type == VarType::Temperature;
  if (!temp && !(nominal > 0)) throw TaskError("ratio buckets need a positive nominal value");
  const auto& b = temp ? s.temperature : s.ratio;
  auto bound = [&](int i) { return temp ? nominal + b[i] : nominal * b[i]; };
  int idx = s.k;
  for (int i = s.k - 1; i >= 0 && value < bound(i); --i) idx = i;
  for (int i = s.k; i < 2 * s.k && value > bound(i); ++i) idx = i + 1;
  return idx;
}

std::string bucketize(double value, Var v, double nominal, const BucketScheme& s) {
  const auto& info = sim::variables()[static_cast<std::size_t>(v)];
  return s.labels()[bucket_index(value, info.type, nominal, s)];
}

Multiplier choose_multiplier(double min, double max) {
  if (!std::isfinite(min) || !std::isfinite(max) || min > max) throw TaskError("invalid column range");
  const double span = max - min;
  if (span == 0) return {1.0, 0, true};
  int m = -2;
  while (m < 3 && span * std::pow(10.0, m) < 10.0) ++m;
  return {std::pow(10.0, m), m, false};
}

Multiplier choose_multiplier(const std::vector<double>& column) {
  if (column.empty()) throw TaskError("cannot choose a multiplier for an empty column");
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  return choose_multiplier(*lo, *hi);
}

std::int64_t scale_value(double value, double multiplier) {
  return static_cast<std::int64_t>(std::round(value * multiplier));
}

int stage_of(Var v) {
  switch (v) {
    case Var::srcr1_p: case Var::srcr1_t: case Var::srcr1_inv: return 0;
    case Var::m2_pv: case Var::fc_op: case Var::fc_sp: return 1;
    case Var::k1_p1: return 2;
    case Var::k1_p2: case Var::k1_power: return 3;
    case Var::e2_tti: case Var::e2_tsi: case Var::cw_out_op: case Var::xc1_sp: return 4;
    case Var::xc1_op: case Var::e2_tso: case Var::e2_duty: case Var::m1_pv: return 5;
    case Var::r1_z_c2h4_in: case Var::r1_t2: case Var::r1_tau: case Var::r1_xmax: return 6;
    case Var::snk1_p: case Var::snk1_t: case Var::snk1_z_c2h4o: case Var::snk1_z_c2h4: return 7;
  }
  return 0;
}

std::vector<Var> upstream(Var v) {
  std::vector<Var> out;
  for (std::size_t i = 0; i < sim::kVarCount; ++i)
    if (stage_of(static_cast<Var>(i)) < stage_of(v)) out.push_back(static_cast<Var>(i));
  return out;
}

std::string_view to_string(ProcVars p) {
  switch (p) {
    case ProcVars::All: return "all";
    case ProcVars::RealWorld: return "real_world";
    case ProcVars::M1M2: return "m1_m2";
  }
  return "";
}

ProcVars parse_proc_vars(std::string_view s) {
  if (s == "all") return ProcVars::All;
  if (s == "real_world") return ProcVars::RealWorld;
  if (s == "m1_m2") return ProcVars::M1M2;
  throw std::invalid_argument("proc_vars must be all, real_world or m1_m2, got '" + std::string(s) + "'");
}

std::vector<Var> selected_vars(ProcVars p) {
  std::vector<Var> out;
  for (std::size_t i = 0; i < sim::kVarCount; ++i) {
    const auto v = static_cast<Var>(i);
    if (p == ProcVars::All || (p == ProcVars::RealWorld && sim::variables()[i].real_world) ||
        (p == ProcVars::M1M2 && (v == Var::m1_pv || v == Var::m2_pv)))
      out.push_back(v);
  }
  return out;
}

void LearningParams::validate() const {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be at least 1");
  if (!(t_short_term > 0)) throw std::invalid_argument("t_short_term must be positive");
  if (!(validation_fraction > 0 && validation_fraction < 1))
    throw std::invalid_argument("validation_fraction must lie in (0, 1)");
  buckets.validate();
  if (phi.empty()) throw std::invalid_argument("phi grid is empty");
  for (double f : phi)
    if (!(f > 0 && f <= 1)) throw std::invalid_argument("phi values must lie in (0, 1]");
  if (budget.max_body_len < 1 || budget.max_rules_per_event < 1 || budget.max_thresholds < 2)
    throw std::invalid_argument("search budget values are out of range");
}

void set_learning_param(LearningParams& p, std::string_view key, std::string_view value) {
  const config::Entry e{std::string(key), std::string(value), 0};
  auto positive = [&](std::int64_t v) {
    if (v < 1) throw config::ConfigError(e.key + " must be at least 1");
    return v;
  };
  try {
    if (key == "task") p.task = harness::parse_mode(value);
    else if (key == "experiments") p.experiments = e.value;
    else if (key == "n_runs") p.n_runs = static_cast<std::size_t>(positive(config::to_int(e)));
    else if (key == "t_short_term") p.t_short_term = config::to_double(e);
    else if (key == "proc_vars") p.proc_vars = parse_proc_vars(value);
    else if (key == "validation_fraction") p.validation_fraction = config::to_double(e);
    else if (key == "k") p.buckets = BucketScheme::with_k(static_cast<int>(config::to_int(e)));
    else if (key == "phi") {
      p.phi.clear();
      for (const auto& s : config::to_list(e)) p.phi.push_back(config::to_double({e.key, s, 0}));
    } else if (key == "max_body_len") p.budget.max_body_len = static_cast<int>(positive(config::to_int(e)));
    else if (key == "max_rules_per_event") p.budget.max_rules_per_event = static_cast<int>(positive(config::to_int(e)));
    else if (key == "max_thresholds") p.budget.max_thresholds = static_cast<std::size_t>(positive(config::to_int(e)));
    else if (key == "candidate_cap") p.budget.candidate_cap = static_cast<std::size_t>(positive(config::to_int(e)));
    else throw config::ConfigError("unknown learning parameter '" + e.key + "'");
  } catch (const std::invalid_argument& err) {
    throw config::ConfigError(err.what());
  }
}

LearningParams parse_learning_params(std::string_view text, LearningParams base) {
  for (const auto& e : config::parse_key_values(text)) {
    try {
      set_learning_param(base, e.key, e.value);
    } catch (const config::ConfigError& err) {
      throw config::ConfigError(err.what(), e.line);
    }
  }
  try {
    base.validate();
  } catch (const std::invalid_argument& err) {
    throw config::ConfigError(err.what());
  }
  return base;
}

std::string print_learning_params(const LearningParams& p) {
  std::string out;
  auto kv = [&](std::string_view k, const std::string& v) { out += std::string(k) + " = " + v + "\n"; };
  kv("task", std::string(harness::to_string(p.task)));
  kv("experiments", p.experiments);
  kv("n_runs", std::to_string(p.n_runs));
  kv("t_short_term", config::format_double(p.t_short_term));
  kv("proc_vars", std::string(to_string(p.proc_vars)));
  kv("validation_fraction", config::format_double(p.validation_fraction));
  kv("k", std::to_string(p.buckets.k));
  std::string phi;
  for (double f : p.phi) phi += (phi.empty() ? "" : ", ") + config::format_double(f);
  kv("phi", phi);
  kv("max_body_len", std::to_string(p.budget.max_body_len));
  kv("max_rules_per_event", std::to_string(p.budget.max_rules_per_event));
  kv("max_thresholds", std::to_string(p.budget.max_thresholds));
  kv("candidate_cap", std::to_string(p.budget.candidate_cap));
  return out;
}

Atom failure_atom(std::string_view label) {
  if (label == harness::kNominalLabel) return Atom("failure", {Term::symbol("none"), Term::symbol("null")});
  const auto p = label.find(':');
  if (p == std::string_view::npos || p == 0 || p + 1 == label.size())
    throw TaskError("failure label '" + std::string(label) + "' is not of the form location:kind");
  return Atom("failure", {Term::symbol(std::string(label.substr(0, p))), Term::symbol(std::string(label.substr(p + 1)))});
}

std::string failure_label(const Atom& a) {
  if (a.predicate != "failure" || a.args.size() != 2) throw TaskError("not a failure atom: " + logic::to_string(a));
  if (a.args[0].text == "none" && a.args[1].text == "null") return std::string(harness::kNominalLabel);
  return a.args[0].text + ":" + a.args[1].text;
}

namespace {

using RunKey = std::pair<std::string, std::int64_t>;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<std::string> selected_failures(const harness::Dataset& d, const LearningParams& p) {
  std::vector<std::string> present;
  for (const auto& r : d.rows)
    if (std::find(present.begin(), present.end(), r.failure) == present.end()) present.push_back(r.failure);
  if (p.experiments == "all") return present;
  std::vector<std::string> out;
  for (const auto& e : harness::experiment_set(p.experiments))
    if (std::find(present.begin(), present.end(), e.name) != present.end()) out.push_back(e.name);
  if (out.empty()) throw TaskError("dataset has no runs of the experiments in '" + p.experiments + "'");
  return out;
}

bool keep_run(const RunKey& k, const std::vector<std::string>& failures, const LearningParams& p,
              const RunFilter& filter) {
  if (k.second < 0 || static_cast<std::size_t>(k.second) >= p.n_runs) return false;
  if (std::find(failures.begin(), failures.end(), k.first) == failures.end()) return false;
  return filter.empty() || std::find(filter.begin(), filter.end(), k) != filter.end();
}

std::string var_letter(Var v) {
  switch (sim::variables()[static_cast<std::size_t>(v)].type) {
    case VarType::Pressure: return "P";
    case VarType::Temperature: return "T";
    case VarType::Flow: return "F";
    case VarType::Fraction: return "X";
    case VarType::Time: return "S";
  }
  return "V";
}

hyp::BodyDecl capture_decl(const std::string& pred, const std::string& var, int min_cmp) {
  hyp::BodyDecl d;
  d.atom = Atom(pred, {Term::variable("_")});
  d.capture = true;
  d.numeric_var = pred;
  d.var_name = var;
  d.min_comparisons = min_cmp;
  return d;
}

void add_numeric(BuiltTask& bt, hyp::ModeBias& bias, const std::string& key, const std::vector<double>& raw) {
  Multiplier m = raw.empty() ? Multiplier{1.0, 0, true} : choose_multiplier(raw);
  if (m.constant) bt.warnings.push_back("constant column '" + key + "': multiplier 1");
  bt.multipliers[key] = m;
  std::int64_t lo = 0, hi = 0;
  if (!raw.empty()) {
    const auto [a, b] = std::minmax_element(raw.begin(), raw.end());
    lo = scale_value(*a, m.value);
    hi = scale_value(*b, m.value);
  }
  bias.numeric_vars.push_back({key, lo, hi, m.value});
}

Atom value_atom(const std::string& pred, std::int64_t v) { return Atom(pred, {Term::integer(v)}); }

// t = 0 and t_short rows of one dynamic run.
struct DynamicRun {
  const harness::DataRow* start = nullptr;
  const harness::DataRow* later = nullptr;
  bool sentinel = false;
};

std::map<RunKey, DynamicRun> index_dynamic(const harness::Dataset& d, double t_short) {
  std::map<RunKey, DynamicRun> runs;
  std::set<double> times;
  for (const auto& r : d.rows) {
    times.insert(r.timepoint);
    auto& dr = runs[{r.failure, r.run_index}];
    if (r.sentinel()) dr.sentinel = true;
    if (r.timepoint == 0) dr.start = &r;
    if (std::abs(r.timepoint - t_short) < 1e-9) dr.later = &r;
  }
  if (!times.contains(t_short) && std::none_of(times.begin(), times.end(), [&](double t) {
        return std::abs(t - t_short) < 1e-9;
      })) {
    std::string avail;
    for (double t : times) avail += (avail.empty() ? "" : ", ") + config::format_double(t);
    throw TaskError("t_short_term " + config::format_double(t_short) + " is not a recorded timepoint (available: " +
                    avail + ")");
  }
  return runs;
}

void dynamic_context(logic::Context& ctx, const DynamicRun& run, const BuiltTask& bt, const LearningParams& p) {
  for (Var v : selected_vars(p.proc_vars)) {
    const std::string name(sim::name_of(v));
    const auto type = sim::variables()[static_cast<std::size_t>(v)].type;
    const double nominal = bt.nominal.at(name);
    const double a = run.start->values[v], b = run.later->values[v];
    ctx.facts.insert(value_atom(name, scale_value(b, bt.multipliers.at(name).value)));
    if (bucket_index(a, type, nominal, p.buckets) == bucket_index(b, type, nominal, p.buckets)) {
      ctx.facts.insert(Atom("unchanged", {Term::symbol(name)}));
    } else {
      const std::string pred = name + (b > a ? "_up" : "_down");
      ctx.facts.insert(value_atom(pred, scale_value(std::abs(b - a), bt.multipliers.at(pred).value)));
    }
  }
}

}  // namespace

BuiltTask build_static_task(const harness::Dataset& d, const LearningParams& p, const RunFilter& filter) {
  if (d.mode != harness::Mode::Static) throw TaskError("static task needs a static dataset");
  p.validate();
  const auto failures = selected_failures(d, p);
  const auto vars = selected_vars(p.proc_vars);
  BuiltTask bt;

  std::vector<std::vector<double>> nominal_cols(sim::kVarCount);
  for (const auto& r : d.rows)
    if (r.failure == harness::kNominalLabel && !r.sentinel())
      for (std::size_t i = 0; i < sim::kVarCount; ++i) nominal_cols[i].push_back(r.values.values[i]);
  if (nominal_cols[0].empty()) throw TaskError("static dataset has no nominal runs to bucket against");
  for (std::size_t i = 0; i < sim::kVarCount; ++i)
    bt.nominal[std::string(sim::variables()[i].name)] = median(nominal_cols[i]);

  std::vector<const harness::DataRow*> rows;
  for (const auto& r : d.rows)
    if (!r.sentinel() && keep_run({r.failure, r.run_index}, failures, p, filter)) rows.push_back(&r);
  if (rows.empty()) throw TaskError("no usable runs in the selection");

  auto& bias = bt.task.bias;
  bias.phi = p.phi;
  std::vector<Var> refs;
  for (Var v : vars) {
    bool has_up = false;
    for (Var u : upstream(v)) has_up |= std::find(vars.begin(), vars.end(), u) != vars.end();
    if (has_up) refs.push_back(v);
  }
  if (refs.empty()) throw TaskError("no selected variable has a selected upstream variable");
  const auto labels = p.buckets.labels();
  for (Var v : refs)
    for (const auto& b : labels) bias.heads.push_back({Atom(std::string(sim::name_of(v)), {Term::symbol(b)})});
  for (const auto& f : failures) {
    hyp::BodyDecl d;
    d.atom = failure_atom(f);
    d.nominal = f == harness::kNominalLabel;
    bias.bodies.push_back(d);
  }
  for (Var v : vars) {
    if (std::none_of(refs.begin(), refs.end(), [&](Var r) { return stage_of(r) > stage_of(v); }))
      continue;  // never upstream of any reference
    const std::string name(sim::name_of(v));
    bias.bodies.push_back(capture_decl(name, var_letter(v), 1));
    std::vector<double> col;
    for (const auto* r : rows) col.push_back(r->values[v]);
    add_numeric(bt, bias, name, col);
  }
  bias.constraints.push_back(hyp::BiasConstraint::forbid_all_nominal());

  for (const auto* r : rows) {
    for (Var v : refs) {
      const std::string name(sim::name_of(v));
      const auto type = sim::variables()[static_cast<std::size_t>(v)].type;
      const int b = bucket_index(r->values[v], type, bt.nominal.at(name), p.buckets);
      logic::Wcdpi e;
      e.id = r->failure + "/" + std::to_string(r->run_index) + "/" + name;
      e.penalty = 100;
      for (int i = 0; i < static_cast<int>(labels.size()); ++i)
        (i == b ? e.pi.inc : e.pi.exc).insert(Atom(name, {Term::symbol(labels[i])}));
      e.ctx.facts.insert(failure_atom(r->failure));
      for (Var u : upstream(v)) {
        if (std::find(vars.begin(), vars.end(), u) == vars.end()) continue;
        const std::string un(sim::name_of(u));
        e.ctx.facts.insert(value_atom(un, scale_value(r->values[u], bt.multipliers.at(un).value)));
      }
      bt.task.positives.push_back(std::move(e));
      bt.sources.push_back({r->failure, r->run_index, v});
    }
  }
  bt.task.validate();
  return bt;
}

BuiltTask build_dynamic_task(const harness::Dataset& d, const LearningParams& p, const RunFilter& filter) {
  if (d.mode != harness::Mode::Dynamic) throw TaskError("dynamic task needs a dynamic dataset");
  p.validate();
  const auto failures = selected_failures(d, p);
  const auto vars = selected_vars(p.proc_vars);
  const auto runs = index_dynamic(d, p.t_short_term);
  BuiltTask bt;

  std::vector<std::vector<double>> start_cols(sim::kVarCount);
  for (const auto& [key, run] : runs)
    if (!run.sentinel && run.start)
      for (std::size_t i = 0; i < sim::kVarCount; ++i) start_cols[i].push_back(run.start->values.values[i]);
  if (start_cols[0].empty()) throw TaskError("dataset has no solved runs");
  for (std::size_t i = 0; i < sim::kVarCount; ++i)
    bt.nominal[std::string(sim::variables()[i].name)] = median(start_cols[i]);

  std::vector<std::pair<RunKey, const DynamicRun*>> used;
  for (const auto& f : failures)
    for (const auto& [key, run] : runs)
      if (key.first == f && !run.sentinel && run.start && run.later && keep_run(key, failures, p, filter))
        used.emplace_back(key, &run);
  if (used.empty()) throw TaskError("no usable runs in the selection");

  auto& bias = bt.task.bias;
  bias.phi = p.phi;
  for (const auto& f : failures) bias.heads.push_back({failure_atom(f)});
  for (Var v : vars) {
    const std::string name(sim::name_of(v));
    const auto type = sim::variables()[static_cast<std::size_t>(v)].type;
    std::vector<double> value, up, down;
    for (const auto& [key, run] : used) {
      const double a = run->start->values[v], b = run->later->values[v];
      value.push_back(b);
      if (bucket_index(a, type, bt.nominal.at(name), p.buckets) != bucket_index(b, type, bt.nominal.at(name), p.buckets))
        (b > a ? up : down).push_back(std::abs(b - a));
    }
    bias.bodies.push_back(capture_decl(name, var_letter(v), 1));
    add_numeric(bt, bias, name, value);
    bias.bodies.push_back(capture_decl(name + "_up", "D", 0));
    add_numeric(bt, bias, name + "_up", up);
    bias.bodies.push_back(capture_decl(name + "_down", "D", 0));
    add_numeric(bt, bias, name + "_down", down);
    hyp::BodyDecl u;
    u.atom = Atom("unchanged", {Term::symbol(name)});
    bias.bodies.push_back(u);
  }

  for (const auto& [key, run] : used) {
    logic::Wcdpi e;
    e.id = key.first + "/" + std::to_string(key.second);
    e.penalty = key.first == harness::kNominalLabel ? 225 : 100;
    for (const auto& f : failures) (f == key.first ? e.pi.inc : e.pi.exc).insert(failure_atom(f));
    dynamic_context(e.ctx, *run, bt, p);
    bt.task.positives.push_back(std::move(e));
    bt.sources.push_back({key.first, key.second, std::nullopt});
  }
  bt.task.validate();
  return bt;
}

logic::Wcdpi dynamic_example(const harness::Dataset& d, const BuiltTask& reference, const LearningParams& p,
                             const std::string& failure, std::int64_t run_index) {
  const auto runs = index_dynamic(d, p.t_short_term);
  const auto it = runs.find({failure, run_index});
  if (it == runs.end() || it->second.sentinel || !it->second.start || !it->second.later)
    throw TaskError("run " + failure + "/" + std::to_string(run_index) + " is missing or unsolved");
  logic::Wcdpi e;
  e.id = failure + "/" + std::to_string(run_index);
  e.penalty = failure == harness::kNominalLabel ? 225 : 100;
  for (const auto& h : reference.task.bias.heads)
    (failure_label(h.atom) == failure ? e.pi.inc : e.pi.exc).insert(h.atom);
  dynamic_context(e.ctx, it->second, reference, p);
  return e;
}

std::string to_las(const solver::DisplasTask& t) {
  std::ostringstream out;
  auto set = [](const logic::FactSet& s) {
    std::string r;
    for (const auto& a : s.sorted()) r += (r.empty() ? "" : ", ") + logic::to_string(a);
    return r;
  };
  for (const auto& r : t.background) out << logic::to_string(r) << "\n";
  for (const auto& e : t.positives) {
    out << "#pos(e" << &e - t.positives.data() << "@" << e.penalty << ", {" << set(e.pi.inc) << "}, {"
        << set(e.pi.exc) << "}, {";
    for (const auto& a : e.ctx.facts.sorted()) out << " " << logic::to_string(a) << ".";
    out << " }).  % " << e.id << "\n";
  }
  for (const auto& e : t.negatives)
    out << "#neg(" << e.id << "@" << e.penalty << ", {" << set(e.pi.inc) << "}, {" << set(e.pi.exc) << "}).\n";
  out << hyp::print_mode_bias(t.bias);
  return out.str();
}

}  // namespace eoilp::tasks
