#include "eoilp/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "eoilp/text_config.hpp"

namespace eoilp::eval {

Split split(std::vector<LabeledRun> runs, double fraction, std::uint64_t seed) {
  if (!(fraction > 0 && fraction < 1)) throw EvalError("validation fraction must lie in (0, 1)");
  std::sort(runs.begin(), runs.end());
  if (std::adjacent_find(runs.begin(), runs.end()) != runs.end()) throw EvalError("duplicate run in split input");
  std::mt19937_64 rng(seed);
  Split out;
  for (auto it = runs.begin(); it != runs.end();) {
    auto end = std::find_if(it, runs.end(), [&](const LabeledRun& r) { return r.failure != it->failure; });
    std::vector<LabeledRun> cls(it, end);
    const auto n = cls.size();
    if (n < 2) throw EvalError("class '" + it->failure + "' has fewer than 2 examples");
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(static_cast<double>(rng() >> 11) * 0x1.0p-53 * static_cast<double>(i + 1));
      std::swap(cls[i], cls[std::min(j, i)]);
    }
    const auto nv = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(fraction * n)), 1, n - 1);
    out.validate.insert(out.validate.end(), cls.begin(), cls.begin() + nv);
    out.train.insert(out.train.end(), cls.begin() + nv, cls.end());
    it = end;
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validate.begin(), out.validate.end());
  return out;
}

std::string format_split(const Split& s) {
  std::vector<std::pair<LabeledRun, bool>> all;
  for (const auto& r : s.train) all.emplace_back(r, false);
  for (const auto& r : s.validate) all.emplace_back(r, true);
  std::sort(all.begin(), all.end());
  std::string out = "failure,run_index,subset\n";
  for (const auto& [r, v] : all) out += r.failure + "," + std::to_string(r.run_index) + (v ? ",validate\n" : ",train\n");
  return out;
}

Split parse_split(std::string_view text) {
  Split s;
  std::size_t line = 0;
  for (const auto& raw : [&] {
         std::vector<std::string> lines;
         std::string cur;
         for (char c : text) {
           if (c == '\n') lines.push_back(std::move(cur)), cur.clear();
           else if (c != '\r') cur += c;
         }
         if (!cur.empty()) lines.push_back(cur);
         return lines;
       }()) {
    ++line;
    if (raw.empty()) continue;
    if (line == 1) {
      if (raw != "failure,run_index,subset") throw EvalError("split file: unexpected header");
      continue;
    }
    const auto a = raw.find(','), b = raw.rfind(',');
    if (a == std::string::npos || a == b) throw EvalError("split file line " + std::to_string(line) + ": expected 3 columns");
    LabeledRun r{raw.substr(0, a), 0};
    try {
      r.run_index = std::stoll(raw.substr(a + 1, b - a - 1));
    } catch (const std::exception&) {
      throw EvalError("split file line " + std::to_string(line) + ": bad run_index");
    }
    const auto subset = raw.substr(b + 1);
    if (subset == "train") s.train.push_back(r);
    else if (subset == "validate") s.validate.push_back(r);
    else throw EvalError("split file line " + std::to_string(line) + ": subset must be train or validate");
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validate.begin(), s.validate.end());
  return s;
}

RocResult roc_auc(const std::vector<std::pair<double, bool>>& scores) {
  std::vector<std::pair<double, bool>> s = scores;
  for (const auto& [v, y] : s)
    if (std::isnan(v)) throw EvalError("NaN score");
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::int64_t P = 0, N = 0;
  for (const auto& x : s) (x.second ? P : N) += 1;
  if (P == 0 || N == 0) throw EvalError("ROC needs at least one positive and one negative");
  RocResult out;
  out.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  // Twice the Mann-Whitney count, so ties contribute exact integers.
  std::int64_t twice = 0, tp = 0, fp = 0;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t j = i;
    std::int64_t gp = 0, gn = 0;
    while (j < s.size() && s[j].first == s[i].first) (s[j++].second ? gp : gn) += 1;
    twice += gp * (2 * (N - fp - gn) + gn);
    tp += gp;
    fp += gn;
    out.points.push_back({static_cast<double>(fp) / N, static_cast<double>(tp) / P, s[i].first});
    i = j;
  }
  out.auc = static_cast<double>(twice) / static_cast<double>(2 * P * N);
  return out;
}

PredictionMatrix predict_matrix(const solver::Hypothesis& h, const solver::DisplasTask& task,
                                const std::vector<logic::Wcdpi>& examples) {
  PredictionMatrix m;
  for (const auto& hd : task.bias.heads) m.classes.push_back(logic::to_string(hd.atom));
  for (const auto& e : examples) {
    const auto pred = solver::predict(h, task, e.ctx);
    std::vector<double> row;
    std::optional<std::size_t> truth;
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
      row.push_back(pred.at(m.classes[c]));
      if (e.pi.inc.contains(task.bias.heads[c].atom)) {
        if (truth) throw EvalError("example '" + e.id + "' has more than one true class");
        truth = c;
      }
    }
    if (!truth) throw EvalError("example '" + e.id + "' has no true class");
    m.cells.push_back(std::move(row));
    m.truth.push_back(*truth);
  }
  return m;
}

void fill_rule_metrics(MetricsReport& r, const solver::Hypothesis& h) {
  r.rules = h.rules.size();
  if (h.rules.empty()) {
    r.avg_body_len = r.avg_rules_per_class = r.avg_rule_prob = 0.0;
    return;
  }
  double len = 0, prob = 0;
  std::set<logic::Atom> heads;
  for (const auto& sr : h.rules) {
    len += static_cast<double>(sr.rule.body.size());
    prob += sr.phi;
    heads.insert(sr.rule.head);
  }
  const double n = static_cast<double>(h.rules.size());
  r.avg_body_len = len / n;
  r.avg_rule_prob = prob / n;
  r.avg_rules_per_class = n / static_cast<double>(heads.size());
}

MetricsReport evaluate_hypothesis(const solver::Hypothesis& h, const solver::DisplasTask& task,
                                  const std::vector<logic::Wcdpi>& validate) {
  if (validate.empty()) throw EvalError("empty validation set");
  const auto m = predict_matrix(h, task, validate);
  MetricsReport r;
  double sum = 0;
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    std::vector<std::pair<double, bool>> scores;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < m.cells.size(); ++i) {
      scores.emplace_back(m.cells[i][c], m.truth[i] == c);
      pos += m.truth[i] == c;
    }
    if (pos == 0 || pos == scores.size()) continue;
    const auto roc = roc_auc(scores);
    r.classes.push_back({m.classes[c], roc.auc, pos, roc.points});
    sum += roc.auc;
  }
  if (r.classes.empty()) throw EvalError("validation set does not contain two classes");
  r.avg_auc = sum / static_cast<double>(r.classes.size());
  r.min_auc = std::min_element(r.classes.begin(), r.classes.end(), [](const auto& a, const auto& b) {
                return a.auc < b.auc;
              })->auc;
  fill_rule_metrics(r, h);
  return r;
}

std::vector<LabeledRun> usable_runs(const harness::Dataset& d, const tasks::LearningParams& p) {
  std::set<std::string> wanted;
  if (p.experiments == "all") {
    for (const auto& r : d.rows) wanted.insert(r.failure);
  } else {
    for (const auto& e : harness::experiment_set(p.experiments)) wanted.insert(e.name);
  }
  std::map<LabeledRun, bool> runs;  // run -> solved
  for (const auto& r : d.rows) {
    if (!wanted.contains(r.failure) || r.run_index < 0 || static_cast<std::size_t>(r.run_index) >= p.n_runs) continue;
    auto [it, fresh] = runs.try_emplace({r.failure, r.run_index}, true);
    if (r.sentinel()) it->second = false;
  }
  std::vector<LabeledRun> out;
  for (const auto& [k, ok] : runs)
    if (ok) out.push_back(k);
  return out;
}

namespace {

tasks::RunFilter as_filter(const std::vector<LabeledRun>& runs) {
  tasks::RunFilter f;
  for (const auto& r : runs) f.emplace_back(r.failure, r.run_index);
  return f;
}

}  // namespace

MetricsReport evaluate_on_split(const harness::Dataset& d, const tasks::LearningParams& p,
                                const solver::Hypothesis& h, const Split& s) {
  if (d.mode != harness::Mode::Dynamic) throw EvalError("evaluation needs a dynamic dataset");
  const auto train = tasks::build_dynamic_task(d, p, as_filter(s.train));
  std::vector<logic::Wcdpi> val;
  for (const auto& r : s.validate) val.push_back(tasks::dynamic_example(d, train, p, r.failure, r.run_index));
  return evaluate_hypothesis(h, train.task, val);
}

PipelineResult run_pipeline(const harness::Dataset& d, const tasks::LearningParams& p, std::uint64_t seed,
                            unsigned workers) {
  PipelineResult out;
  out.split = split(usable_runs(d, p), p.validation_fraction, seed);
  auto budget = p.budget;
  budget.workers = workers;
  if (d.mode == harness::Mode::Dynamic) {
    out.train = tasks::build_dynamic_task(d, p, as_filter(out.split.train));
    out.hypothesis = solver::solve(out.train.task, budget);
    std::vector<logic::Wcdpi> val;
    for (const auto& r : out.split.validate)
      val.push_back(tasks::dynamic_example(d, out.train, p, r.failure, r.run_index));
    out.report = evaluate_hypothesis(out.hypothesis, out.train.task, val);
  } else {
    out.train = tasks::build_static_task(d, p, as_filter(out.split.train));
    out.hypothesis = solver::solve(out.train.task, budget);
  }
  return out;
}

std::vector<SweepRow> sweep_rows(const std::string& axis, const std::vector<std::string>& values) {
  std::vector<SweepRow> rows;
  for (const auto& v : values) rows.push_back({axis + " := " + v, {{axis, v}}, std::nullopt, {}});
  return rows;
}

std::vector<SweepRow> standard_sweep_rows() {
  auto rows = sweep_rows("experiments", {"trivial4", "nontrivial6", "nontrivial10"});
  rows.push_back({"experiments := nontrivial10; n_runs := 125",
                  {{"experiments", "nontrivial10"}, {"n_runs", "125"}},
                  std::nullopt,
                  {}});
  for (auto& r : sweep_rows("n_runs", {"10", "25", "75", "125"})) rows.push_back(std::move(r));
  for (auto& r : sweep_rows("t_short_term", {"2", "4", "6", "10", "20"})) rows.push_back(std::move(r));
  for (auto& r : sweep_rows("proc_vars", {"all", "real_world", "m1_m2"})) rows.push_back(std::move(r));
  return rows;
}

void run_sweep(std::vector<SweepRow>& rows, const harness::Dataset& d, const tasks::LearningParams& base,
               std::uint64_t seed, unsigned workers) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) {
      auto& row = rows[i];
      try {
        auto p = base;
        for (const auto& [k, v] : row.assignments) tasks::set_learning_param(p, k, v);
        p.validate();
        auto res = run_pipeline(d, p, seed, 1);
        if (!res.report) throw EvalError("sweep needs a dynamic dataset");
        row.report = std::move(res.report);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers ? workers : std::thread::hardware_concurrency(),
                                                     static_cast<unsigned>(rows.size())));
  if (n == 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < n; ++w) pool.emplace_back(work);
}

namespace {

std::string fixed(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

}  // namespace

std::string format_report_text(const MetricsReport& r) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %8s\n", "metric", "value");
  out += buf;
  const std::pair<const char*, double> rows[] = {{"min_auc", r.min_auc},
                                                 {"avg_auc", r.avg_auc},
                                                 {"avg_body_len", r.avg_body_len},
                                                 {"avg_rules_cl", r.avg_rules_per_class},
                                                 {"avg_prob", r.avg_rule_prob}};
  for (const auto& [k, v] : rows) {
    std::snprintf(buf, sizeof buf, "%-14s %8s\n", k, fixed(v).c_str());
    out += buf;
  }
  out += "\n";
  std::snprintf(buf, sizeof buf, "%-48s %8s %9s\n", "class", "auc", "positives");
  out += buf;
  for (const auto& c : r.classes) {
    std::snprintf(buf, sizeof buf, "%-48s %8s %9zu\n", c.label.c_str(), fixed(c.auc).c_str(), c.positives);
    out += buf;
  }
  return out;
}

std::string format_report_csv(const MetricsReport& r) {
  std::string out = "class,auc,positives\n";
  for (const auto& c : r.classes)
    out += "\"" + c.label + "\"," + config::format_double(c.auc) + "," + std::to_string(c.positives) + "\n";
  out += "min_auc," + config::format_double(r.min_auc) + ",\n";
  out += "avg_auc," + config::format_double(r.avg_auc) + ",\n";
  out += "avg_body_len," + config::format_double(r.avg_body_len) + ",\n";
  out += "avg_rules_per_class," + config::format_double(r.avg_rules_per_class) + ",\n";
  out += "avg_rule_prob," + config::format_double(r.avg_rule_prob) + ",\n";
  return out;
}

std::string format_roc_csv(const MetricsReport& r) {
  std::string out = "class,threshold,fpr,tpr\n";
  for (const auto& c : r.classes)
    for (const auto& p : c.roc)
      out += "\"" + c.label + "\"," + (std::isinf(p.threshold) ? std::string("inf") : config::format_double(p.threshold)) +
             "," + config::format_double(p.fpr) + "," + config::format_double(p.tpr) + "\n";
  return out;
}

std::string format_sweep_text(const std::vector<SweepRow>& rows) {
  std::string out;
  char buf[320];
  std::snprintf(buf, sizeof buf, "%4s  %-44s %8s %8s %8s %8s %8s\n", "row", "assignments", "min_auc", "avg_auc",
                "n_body", "n_r|cl", "prob");
  out += buf;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.report) {
      const auto& m = *r.report;
      std::snprintf(buf, sizeof buf, "%4zu  %-44s %8s %8s %8s %8s %8s\n", i + 1, r.label.c_str(),
                    fixed(m.min_auc, 2).c_str(), fixed(m.avg_auc, 2).c_str(), fixed(m.avg_body_len, 2).c_str(),
                    fixed(m.avg_rules_per_class, 2).c_str(), fixed(m.avg_rule_prob, 2).c_str());
    } else {
      std::snprintf(buf, sizeof buf, "%4zu  %-44s error: %s\n", i + 1, r.label.c_str(), r.error.c_str());
    }
    out += buf;
  }
  return out;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "row,assignments,min_auc,avg_auc,avg_body_len,avg_rules_per_class,avg_rule_prob,error\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += std::to_string(i + 1) + ",\"" + r.label + "\",";
    if (r.report) {
      const auto& m = *r.report;
      out += config::format_double(m.min_auc) + "," + config::format_double(m.avg_auc) + "," +
             config::format_double(m.avg_body_len) + "," + config::format_double(m.avg_rules_per_class) + "," +
             config::format_double(m.avg_rule_prob) + ",\n";
    } else {
      std::string e = r.error;
      std::replace(e.begin(), e.end(), '"', '\'');
      out += ",,,,,\"" + e + "\"\n";
    }
  }
  return out;
}

}  // namespace eoilp::eval
