#include "eoilp/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

namespace eoilp::solver {

using logic::Atom;
using logic::FactSet;
using logic::NormalRule;
using logic::Wcdpi;

void DisplasTask::validate() const {
  bias.validate();
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 0.5)");
  std::set<Atom> events;
  for (const auto& h : bias.heads) events.insert(h.atom);
  auto check = [&](const Wcdpi& e, const char* kind) {
    if (e.penalty < 1) throw std::invalid_argument(std::string(kind) + " example '" + e.id + "' has penalty < 1");
    for (const auto& a : e.pi.inc.sorted())
      if (e.pi.exc.contains(a))
        throw std::invalid_argument("example '" + e.id + "' both includes and excludes " + to_string(a));
  };
  for (const auto& e : positives) {
    check(e, "positive");
    if (e.pi.inc.size() != 1) throw std::invalid_argument("positive example '" + e.id + "' needs one inclusion");
    if (!events.contains(e.pi.inc.sorted().front()))
      throw std::invalid_argument("positive example '" + e.id + "' includes an undeclared event");
  }
  for (const auto& e : negatives) check(e, "negative");
}

std::vector<logic::ProbRule> Hypothesis::prob_rules() const {
  std::vector<logic::ProbRule> out;
  for (const auto& r : rules) out.push_back(r.as_prob_rule());
  return out;
}

namespace {

FactSet interpretation(std::span<const NormalRule> background, const logic::Context& ctx) {
  if (background.empty() && ctx.rules.empty()) return ctx.facts;
  std::vector<NormalRule> program(background.begin(), background.end());
  program.insert(program.end(), ctx.rules.begin(), ctx.rules.end());
  return logic::evaluate(program, ctx.facts);
}

double clamp_p(double p, double eps) { return std::clamp(p, eps, 1.0 - eps); }

double log_odds(double s) { return std::log(s / (1.0 - s)); }

}  // namespace

double predicted_probability(const Hypothesis& h, std::span<const NormalRule> background,
                             const logic::Context& ctx, const Atom& event, double epsilon) {
  const FactSet interp = interpretation(background, ctx);
  double best = epsilon;
  bool fired = false;
  for (const auto& r : h.rules) {
    if (r.rule.head != event) continue;
    if (logic::body_satisfied(r.rule, interp) && (!fired || r.phi > best)) {
      best = r.phi;
      fired = true;
    }
  }
  return best;
}

std::vector<EventExample> event_examples(const DisplasTask& task, const Atom& event) {
  std::vector<EventExample> out;
  for (const auto& e : task.positives) {
    if (e.pi.inc.contains(event)) out.push_back({&e, true, e.penalty / 100.0});
    else if (e.pi.exc.contains(event)) out.push_back({&e, false, e.penalty / 100.0});
  }
  for (const auto& e : task.negatives)
    if (e.pi.inc.contains(event)) out.push_back({&e, false, e.penalty / 100.0});
  return out;
}

PosteriorScore log_posterior(const Hypothesis& h, const DisplasTask& task, const Atom& event) {
  PosteriorScore s;
  for (const auto& ex : event_examples(task, event)) {
    const double p = clamp_p(predicted_probability(h, task.background, ex.example->ctx, event, task.epsilon),
                             task.epsilon);
    s.log_likelihood += ex.weight * std::log(ex.positive ? p : 1.0 - p);
  }
  for (const auto& r : h.rules)
    if (r.rule.head == event) s.log_prior_odds += log_odds(r.prior);
  s.total = s.log_likelihood + s.log_prior_odds;
  return s;
}

namespace {

// Integer values in the capture slot of atoms matching a capture schema.
template <class F>
void for_each_capture(const hyp::BodyDecl& d, const FactSet& interp, F&& f) {
  for (const Atom& a : interp.with_predicate(d.atom.predicate)) {
    if (a.args.size() != d.atom.args.size()) continue;
    bool prefix = true;
    for (std::size_t i = 0; i + 1 < a.args.size() && prefix; ++i) prefix = a.args[i] == d.atom.args[i];
    if (prefix) f(a.args.back());
  }
}

bool group_holds(const hyp::BodyDecl& d, const hyp::LiteralGroup& g, const FactSet& interp) {
  if (!d.capture) return interp.contains(d.atom) != g.negated;
  bool any = false;
  for_each_capture(d, interp, [&](const logic::Term& t) {
    if (any) return;
    if (!g.ge && !g.le) {
      any = true;
      return;
    }
    if (t.kind != logic::Term::Kind::Integer) return;
    any = (!g.ge || t.value >= *g.ge) && (!g.le || t.value <= *g.le);
  });
  return any;
}

}  // namespace

hyp::ThresholdMap derive_thresholds(const DisplasTask& task, std::size_t max_count, const Atom* event) {
  hyp::ThresholdMap out;
  std::map<std::string, std::vector<std::int64_t>> seen;
  std::vector<const hyp::BodyDecl*> captures;
  for (const auto& d : task.bias.bodies)
    if (d.capture && !task.thresholds.contains(d.numeric_var)) captures.push_back(&d);
  if (!captures.empty()) {
    auto scan = [&](const Wcdpi& e) {
      const FactSet interp = interpretation(task.background, e.ctx);
      for (const auto* d : captures)
        for_each_capture(*d, interp, [&](const logic::Term& t) {
          if (t.kind == logic::Term::Kind::Integer) seen[d->numeric_var].push_back(t.value);
        });
    };
    if (event) {
      for (const auto& ex : event_examples(task, *event))
        if (ex.positive) scan(*ex.example);
    } else {
      for (const auto& e : task.positives) scan(e);
      for (const auto& e : task.negatives) scan(e);
    }
  }
  for (const auto* d : captures) {
    auto it = seen.find(d->numeric_var);
    out[d->numeric_var] = it == seen.end() ? std::vector<std::int64_t>{} : hyp::threshold_candidates(it->second, max_count);
  }
  for (const auto& [k, v] : task.thresholds) out[k] = v;
  return out;
}

namespace {

using Bits = std::vector<std::uint64_t>;

struct Candidate {
  std::vector<std::uint32_t> groups;
  int cost = 0;
  double log_odds = 0.0;
};

struct Choice {
  std::size_t body = 0;
  std::size_t level = 0;  // index into the probability table, >= 1
  double delta = 0.0;
};

class EventSearch {
 public:
  EventSearch(const DisplasTask& task, const Atom& event, const SearchBudget& budget)
      : task_(task), event_(event), budget_(budget) {
    bias_ = task.bias;
    bias_.heads = {hyp::HeadDecl{event}};
    std::vector<double> grid = bias_.phi;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    prob_.push_back(task.epsilon);
    prob_.insert(prob_.end(), grid.begin(), grid.end());
    for (double p : prob_) {
      lpos_.push_back(std::log(clamp_p(p, task.epsilon)));
      lneg_.push_back(std::log(1.0 - clamp_p(p, task.epsilon)));
    }
  }

  Hypothesis run() {
    examples_ = event_examples(task_, event_);
    if (examples_.empty() || prob_.size() < 2) return {};
    thresholds_ = derive_thresholds(task_, budget_.max_thresholds, &event_);
    hyp::check_budget(bias_, budget_.max_body_len, thresholds_, budget_.candidate_cap);
    build_candidates();
    if (candidates_.empty()) return {};
    search();
    return assemble();
  }

 private:
  void build_candidates() {
    const std::size_t n = examples_.size();
    words_ = (n + 63) / 64;
    for (double w : [&] {
           std::set<double> ws;
           for (const auto& e : examples_) ws.insert(e.weight);
           return ws;
         }())
      weights_.push_back(w);

    const auto groups = hyp::literal_groups(bias_, thresholds_);
    std::map<std::tuple<std::size_t, bool, std::optional<std::int64_t>, std::optional<std::int64_t>>, std::uint32_t>
        index;
    std::vector<FactSet> interps;
    interps.reserve(n);
    for (const auto& e : examples_) interps.push_back(interpretation(task_.background, e.example->ctx));
    for (const auto& per_decl : groups) {
      for (const auto& g : per_decl) {
        index[{g.decl, g.negated, g.ge, g.le}] = static_cast<std::uint32_t>(group_bits_.size());
        Bits b(words_, 0);
        for (std::size_t i = 0; i < n; ++i)
          if (group_holds(bias_.bodies[g.decl], g, interps[i])) b[i / 64] |= std::uint64_t{1} << (i % 64);
        group_bits_.push_back(std::move(b));
        group_info_.push_back(g);
      }
    }

    Bits all(words_, 0);
    for (std::size_t i = 0; i < n; ++i) all[i / 64] |= std::uint64_t{1} << (i % 64);
    hyp::for_each_body(bias_, budget_.max_body_len, thresholds_, [&](const hyp::Body& body) {
      Candidate c;
      Bits cov = all;
      c.cost = task_.weights.head;
      for (const auto& g : body) {
        const auto gi = index.at({g.decl, g.negated, g.ge, g.le});
        c.groups.push_back(gi);
        for (std::size_t w = 0; w < words_; ++w) cov[w] &= group_bits_[gi][w];
        c.cost += task_.weights.atom + task_.weights.comparison * ((g.ge ? 1 : 0) + (g.le ? 1 : 0));
      }
      c.log_odds = log_odds(std::pow(task_.weights.base, c.cost));
      coverage_.insert(coverage_.end(), cov.begin(), cov.end());
      candidates_.push_back(std::move(c));
    });
  }

  const std::uint64_t* cov(std::size_t body) const { return coverage_.data() + body * words_; }

  bool covers(std::size_t body, std::size_t i) const { return (cov(body)[i / 64] >> (i % 64)) & 1U; }

  hyp::Body body_of(std::size_t c) const {
    hyp::Body b;
    for (auto gi : candidates_[c].groups) b.push_back(group_info_[gi]);
    return b;
  }

  std::string text(std::size_t body, std::size_t level) const {
    return to_string(logic::ProbRule{prob_[level], hyp::make_rule(bias_, event_, body_of(body))});
  }

  // True if a precedes b in the total order: higher delta, lower cost, smaller text.
  bool better(const Choice& a, const Choice& b) const {
    if (a.delta != b.delta) return a.delta > b.delta;
    const int ca = candidates_[a.body].cost, cb = candidates_[b.body].cost;
    if (ca != cb) return ca < cb;
    return text(a.body, a.level) < text(b.body, b.level);
  }

  std::vector<std::size_t> levels_for(const std::vector<std::pair<std::size_t, std::size_t>>& rules) const {
    std::vector<std::size_t> lv(examples_.size(), 0);
    for (const auto& [body, level] : rules)
      for (std::size_t i = 0; i < examples_.size(); ++i)
        if (covers(body, i)) lv[i] = std::max(lv[i], level);
    return lv;
  }

  double loglik(const std::vector<std::size_t>& lv) const {
    double s = 0.0;
    for (std::size_t i = 0; i < examples_.size(); ++i)
      s += examples_[i].weight * (examples_[i].positive ? lpos_[lv[i]] : lneg_[lv[i]]);
    return s;
  }

  double total(const std::vector<std::pair<std::size_t, std::size_t>>& rules) const {
    double s = loglik(levels_for(rules));
    for (const auto& r : rules) s += candidates_[r.first].log_odds;
    return s;
  }

  // Best single rule to add on top of the given per-example levels.
  std::optional<Choice> best_addition(const std::vector<std::size_t>& lv, const std::set<std::size_t>& exclude) const {
    struct Class {
      std::size_t level;
      bool positive;
      double weight;
      Bits mask;
    };
    std::vector<Class> classes;
    {
      std::map<std::tuple<std::size_t, bool, std::size_t>, std::size_t> at;
      for (std::size_t i = 0; i < examples_.size(); ++i) {
        const auto wi = static_cast<std::size_t>(
            std::lower_bound(weights_.begin(), weights_.end(), examples_[i].weight) - weights_.begin());
        auto [it, fresh] = at.try_emplace({lv[i], examples_[i].positive, wi}, classes.size());
        if (fresh) classes.push_back({lv[i], examples_[i].positive, examples_[i].weight, Bits(words_, 0)});
        classes[it->second].mask[i / 64] |= std::uint64_t{1} << (i % 64);
      }
    }
    const std::size_t levels = prob_.size();
    auto scan = [&](std::size_t from, std::size_t to) {
      std::optional<Choice> best;
      std::vector<double> counts(classes.size());
      for (std::size_t c = from; c < to; ++c) {
        if (exclude.contains(c)) continue;
        const auto* cv = cov(c);
        for (std::size_t k = 0; k < classes.size(); ++k) {
          std::uint64_t n = 0;
          for (std::size_t w = 0; w < words_; ++w) n += std::popcount(cv[w] & classes[k].mask[w]);
          counts[k] = static_cast<double>(n);
        }
        for (std::size_t j = 1; j < levels; ++j) {
          double d = candidates_[c].log_odds;
          for (std::size_t k = 0; k < classes.size(); ++k) {
            if (counts[k] == 0.0 || classes[k].level >= j) continue;
            const auto& l = classes[k].positive ? lpos_ : lneg_;
            d += counts[k] * classes[k].weight * (l[j] - l[classes[k].level]);
          }
          Choice ch{c, j, d};
          if (!best || better(ch, *best)) best = ch;
        }
      }
      return best;
    };

    const std::size_t n = candidates_.size();
    unsigned workers = budget_.workers == 0 ? std::max(1U, std::thread::hardware_concurrency()) : budget_.workers;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, n / 256)));
    std::vector<std::optional<Choice>> partial(workers);
    if (workers == 1) {
      partial[0] = scan(0, n);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < workers; ++t)
        pool.emplace_back([&, t] { partial[t] = scan(n * t / workers, n * (t + 1) / workers); });
    }
    std::optional<Choice> best;
    for (const auto& p : partial)
      if (p && (!best || better(*p, *best))) best = p;
    return best;
  }

  void search() {
    refine();
    if (budget_.max_rules_per_event >= 2 && pair_phase()) refine();
  }

  // Best delta of each body as a lone rule, over all probability levels.
  std::vector<double> single_scores() const {
    std::vector<double> out(candidates_.size());
    for (std::size_t c = 0; c < candidates_.size(); ++c) {
      double pos = 0.0, neg = 0.0;
      for (std::size_t i = 0; i < examples_.size(); ++i)
        if (covers(c, i)) (examples_[i].positive ? pos : neg) += examples_[i].weight;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 1; j < prob_.size(); ++j)
        best = std::max(best, pos * (lpos_[j] - lpos_[0]) + neg * (lneg_[j] - lneg_[0]));
      out[c] = best + candidates_[c].log_odds;
    }
    return out;
  }

  // Exhaustive two-rule search over the strongest single bodies. Adopts the pair
  // when it beats the current selection; returns whether it did.
  bool pair_phase() {
    constexpr std::size_t kPool = 256;
    const auto scores = single_scores();
    std::vector<std::size_t> pool(candidates_.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    if (pool.size() > kPool) pool.resize(kPool);

    // Weighted positive and negative mass per weight class, as bit masks.
    std::vector<Bits> pos_mask(weights_.size(), Bits(words_, 0)), neg_mask = pos_mask;
    for (std::size_t i = 0; i < examples_.size(); ++i) {
      const auto wi = static_cast<std::size_t>(
          std::lower_bound(weights_.begin(), weights_.end(), examples_[i].weight) - weights_.begin());
      (examples_[i].positive ? pos_mask : neg_mask)[wi][i / 64] |= std::uint64_t{1} << (i % 64);
    }
    auto mass = [&](const std::vector<Bits>& masks, auto&& cell) {
      double m = 0.0;
      for (std::size_t k = 0; k < weights_.size(); ++k) {
        std::uint64_t n = 0;
        for (std::size_t w = 0; w < words_; ++w) n += std::popcount(cell(w) & masks[k][w]);
        m += weights_[k] * static_cast<double>(n);
      }
      return m;
    };

    const double empty = total({});
    double best = total(chosen_);
    std::optional<std::pair<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>>> pick;
    const std::size_t levels = prob_.size();
    for (std::size_t x = 0; x < pool.size(); ++x) {
      for (std::size_t y = x + 1; y < pool.size(); ++y) {
        const auto *a = cov(pool[x]), *b = cov(pool[y]);
        const double pb = mass(pos_mask, [&](std::size_t w) { return a[w] & b[w]; });
        const double nb = mass(neg_mask, [&](std::size_t w) { return a[w] & b[w]; });
        const double pa = mass(pos_mask, [&](std::size_t w) { return a[w] & ~b[w]; });
        const double na = mass(neg_mask, [&](std::size_t w) { return a[w] & ~b[w]; });
        const double py = mass(pos_mask, [&](std::size_t w) { return b[w] & ~a[w]; });
        const double ny = mass(neg_mask, [&](std::size_t w) { return b[w] & ~a[w]; });
        const double odds = candidates_[pool[x]].log_odds + candidates_[pool[y]].log_odds;
        auto gain = [&](double p, double n, std::size_t j) { return p * (lpos_[j] - lpos_[0]) + n * (lneg_[j] - lneg_[0]); };
        for (std::size_t i = 1; i < levels; ++i) {
          for (std::size_t j = 1; j < levels; ++j) {
            const double t = empty + odds + gain(pb, nb, std::max(i, j)) + gain(pa, na, i) + gain(py, ny, j);
            if (t > best + 1e-9 * std::max(1.0, std::abs(best))) {
              best = t;
              pick = {{pool[x], i}, {pool[y], j}};
            }
          }
        }
      }
    }
    if (!pick) return false;
    chosen_ = {pick->first, pick->second};
    return true;
  }

  void refine() {
    const auto max_rules = static_cast<std::size_t>(std::max(1, budget_.max_rules_per_event));
    double current = total(chosen_);
    auto bodies_except = [&](std::size_t skip) {
      std::set<std::size_t> s;
      for (std::size_t i = 0; i < chosen_.size(); ++i)
        if (i != skip) s.insert(chosen_[i].first);
      return s;
    };
    for (int round = 0; round < 32; ++round) {
      bool changed = false;
      // Forward selection.
      while (chosen_.size() < max_rules) {
        auto add = best_addition(levels_for(chosen_), bodies_except(chosen_.size()));
        if (!add || !(add->delta > 0.0)) break;
        chosen_.emplace_back(add->body, add->level);
        current = total(chosen_);
        changed = true;
      }
      // Exchange: replace one rule with the best alternative given the others.
      for (std::size_t i = 0; i < chosen_.size(); ++i) {
        auto rest = chosen_;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        auto alt = best_addition(levels_for(rest), bodies_except(i));
        if (!alt) continue;
        const double base = total(rest);
        const double with_alt = base + alt->delta;
        if (with_alt > current + 1e-12 * std::max(1.0, std::abs(current))) {
          chosen_[i] = {alt->body, alt->level};
          current = total(chosen_);
          changed = true;
        } else if (!(base < current)) {
          // Dropping the rule is at least as good.
          chosen_ = rest;
          current = base;
          changed = true;
          break;
        }
      }
      if (!changed) break;
    }
  }

  Hypothesis assemble() const {
    std::vector<hyp::ScoredRule> rules;
    for (const auto& [body, level] : chosen_) {
      hyp::ScoredRule r;
      r.rule = hyp::make_rule(bias_, event_, body_of(body));
      r.phi = prob_[level];
      r.cost = candidates_[body].cost;
      r.prior = std::pow(task_.weights.base, r.cost);
      rules.push_back(std::move(r));
    }
    std::sort(rules.begin(), rules.end(), [](const hyp::ScoredRule& a, const hyp::ScoredRule& b) {
      if (a.cost != b.cost) return a.cost < b.cost;
      return to_string(a.as_prob_rule()) < to_string(b.as_prob_rule());
    });
    Hypothesis h;
    auto& idx = h.per_event_index[to_string(event_)];
    for (auto& r : rules) {
      idx.push_back(h.rules.size());
      h.rules.push_back(std::move(r));
    }
    return h;
  }

  const DisplasTask& task_;
  Atom event_;
  SearchBudget budget_;
  hyp::ModeBias bias_;
  std::vector<double> prob_, lpos_, lneg_;
  std::vector<EventExample> examples_;
  std::vector<double> weights_;
  hyp::ThresholdMap thresholds_;
  std::size_t words_ = 0;
  std::vector<Bits> group_bits_;
  std::vector<hyp::LiteralGroup> group_info_;
  std::vector<Candidate> candidates_;
  std::vector<std::uint64_t> coverage_;
  std::vector<std::pair<std::size_t, std::size_t>> chosen_;  // (body, level)
};

}  // namespace

Hypothesis solve_event(const DisplasTask& task, const Atom& event, const SearchBudget& budget) {
  if (budget.max_rules_per_event < 1) throw std::invalid_argument("max_rules_per_event must be >= 1");
  return EventSearch(task, event, budget).run();
}

Hypothesis solve(const DisplasTask& task, const SearchBudget& budget) {
  Hypothesis out;
  for (const auto& head : task.bias.heads) {
    Hypothesis part = solve_event(task, head.atom, budget);
    auto& idx = out.per_event_index[to_string(head.atom)];
    for (auto& r : part.rules) {
      idx.push_back(out.rules.size());
      out.rules.push_back(std::move(r));
    }
  }
  return out;
}

std::map<std::string, double> predict(const Hypothesis& h, const DisplasTask& task, const logic::Context& ctx) {
  const FactSet interp = interpretation(task.background, ctx);
  std::map<std::string, double> out;
  for (const auto& head : task.bias.heads) out[to_string(head.atom)] = task.epsilon;
  std::map<std::string, bool> fired;
  for (const auto& r : h.rules) {
    const auto key = to_string(r.rule.head);
    auto it = out.find(key);
    if (it == out.end() || !logic::body_satisfied(r.rule, interp)) continue;
    if (!fired[key] || r.phi > it->second) it->second = r.phi;
    fired[key] = true;
  }
  return out;
}

std::string format_hypothesis(const Hypothesis& h) {
  std::string out;
  for (const auto& r : h.rules) out += to_string(r.as_prob_rule()) + "\n";
  return out;
}

Hypothesis parse_hypothesis(std::string_view text, const hyp::PriorWeights& w) {
  Hypothesis h;
  for (auto& pr : logic::parse_program(text)) {
    if (!pr.phi) throw logic::ParseError("rule without probability: " + to_string(pr.rule), 1);
    logic::check_safety(pr.rule);
    hyp::ScoredRule r;
    r.rule = std::move(pr.rule);
    r.phi = *pr.phi;
    r.cost = hyp::rule_cost(r.rule, w);
    r.prior = hyp::prior(r.rule, w);
    h.per_event_index[to_string(r.rule.head)].push_back(h.rules.size());
    h.rules.push_back(std::move(r));
  }
  return h;
}

std::string score_report_json(const Hypothesis& h, const DisplasTask& task) {
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  double sum = 0.0;
  for (const auto& head : task.bias.heads) {
    const auto ex = event_examples(task, head.atom);
    const auto s = log_posterior(h, task, head.atom);
    sum += s.total;
    nlohmann::ordered_json rules = nlohmann::ordered_json::array();
    for (const auto& r : h.rules)
      if (r.rule.head == head.atom) rules.push_back(to_string(r.as_prob_rule()));
    events.push_back({{"event", to_string(head.atom)},
                      {"positives", std::count_if(ex.begin(), ex.end(), [](const auto& e) { return e.positive; })},
                      {"negatives", std::count_if(ex.begin(), ex.end(), [](const auto& e) { return !e.positive; })},
                      {"log_likelihood", s.log_likelihood},
                      {"log_prior_odds", s.log_prior_odds},
                      {"total", s.total},
                      {"rules", rules}});
  }
  nlohmann::ordered_json doc{{"epsilon", task.epsilon}, {"total", sum}, {"events", events}};
  return doc.dump(2) + "\n";
}

}  // namespace eoilp::solver
