#include "eoilp/logic.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

namespace eoilp::logic {

namespace {

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

using Binding = std::vector<std::pair<std::string, Term>>;

const Term* lookup(const Binding& b, const std::string& var) {
  for (const auto& [name, value] : b)
    if (name == var) return &value;
  return nullptr;
}

// Unifies a (possibly non-ground) rule atom with a ground fact, extending b.
bool match(const Atom& pattern, const Atom& fact, Binding& b) {
  if (pattern.predicate != fact.predicate || pattern.args.size() != fact.args.size()) return false;
  const auto mark = b.size();
  for (std::size_t i = 0; i < pattern.args.size(); ++i) {
    const Term& p = pattern.args[i];
    if (p.is_anonymous()) continue;
    if (p.is_variable()) {
      if (const Term* bound = lookup(b, p.text)) {
        if (*bound != fact.args[i]) {
          b.resize(mark);
          return false;
        }
      } else {
        b.emplace_back(p.text, fact.args[i]);
      }
    } else if (p != fact.args[i]) {
      b.resize(mark);
      return false;
    }
  }
  return true;
}

Atom substitute(const Atom& a, const Binding& b) {
  Atom out = a;
  for (auto& t : out.args) {
    if (t.is_variable() && !t.is_anonymous()) {
      if (const Term* v = lookup(b, t.text)) t = *v;
    }
  }
  return out;
}

bool residual_holds(const NormalRule& rule, const Binding& b, const FactSet& interp) {
  for (const auto& lit : rule.body) {
    if (lit.kind == Literal::Kind::Negative) {
      if (interp.contains(substitute(lit.atom, b))) return false;
    } else if (lit.kind == Literal::Kind::Compare) {
      const Term* v = lookup(b, lit.cmp.variable);
      if (!v || v->kind != Term::Kind::Integer || !lit.cmp.holds(v->value)) return false;
    }
  }
  return true;
}

// Calls on_match for every binding of the positive body that satisfies the
// remaining literals. Returns early when on_match returns false.
template <typename F>
bool for_each_grounding(const NormalRule& rule, const FactSet& interp, std::size_t idx,
                        Binding& b, F&& on_match) {
  while (idx < rule.body.size() && rule.body[idx].kind != Literal::Kind::Positive) ++idx;
  if (idx == rule.body.size()) {
    if (residual_holds(rule, b, interp)) return on_match(b);
    return true;
  }
  const Atom& pattern = rule.body[idx].atom;
  if (pattern.is_ground()) {
    if (!interp.contains(pattern)) return true;
    return for_each_grounding(rule, interp, idx + 1, b, on_match);
  }
  for (const Atom& fact : interp.with_predicate(pattern.predicate)) {
    const auto mark = b.size();
    if (!match(pattern, fact, b)) continue;
    const bool go_on = for_each_grounding(rule, interp, idx + 1, b, on_match);
    b.resize(mark);
    if (!go_on) return false;
  }
  return true;
}

struct DepEdge {
  std::string to;
  bool negative;
};

// Tarjan SCC over the predicate dependency graph (edges body -> head).
class Stratifier {
 public:
  explicit Stratifier(std::span<const NormalRule> program) {
    for (const auto& r : program) {
      node(r.head.predicate);
      for (const auto& lit : r.body) {
        if (lit.kind == Literal::Kind::Compare) continue;
        const int from = node(lit.atom.predicate);
        edges_[from].push_back({r.head.predicate, lit.kind == Literal::Kind::Negative});
      }
    }
  }

  std::map<std::string, int> strata() {
    const int n = static_cast<int>(names_.size());
    index_.assign(n, -1);
    low_.assign(n, 0);
    on_stack_.assign(n, false);
    comp_.assign(n, -1);
    for (int v = 0; v < n; ++v)
      if (index_[v] < 0) connect(v);

    for (int v = 0; v < n; ++v) {
      for (const auto& e : edges_[v]) {
        const int w = ids_.at(e.to);
        if (e.negative && comp_[v] == comp_[w]) throw_cycle(v, w);
      }
    }

    // Longest-path ranks: positive edges keep the stratum, negative ones bump it.
    std::vector<int> rank(n, 0);
    for (bool changed = true; changed;) {
      changed = false;
      for (int v = 0; v < n; ++v) {
        for (const auto& e : edges_[v]) {
          const int w = ids_.at(e.to);
          const int need = rank[v] + (e.negative ? 1 : 0);
          if (rank[w] < need) {
            rank[w] = need;
            changed = true;
          }
        }
      }
    }
    std::map<std::string, int> out;
    for (int v = 0; v < n; ++v) out[names_[v]] = rank[v];
    return out;
  }

 private:
  int node(const std::string& name) {
    auto [it, inserted] = ids_.try_emplace(name, static_cast<int>(names_.size()));
    if (inserted) {
      names_.push_back(name);
      edges_.emplace_back();
    }
    return it->second;
  }

  void connect(int v) {
    index_[v] = low_[v] = counter_++;
    stack_.push_back(v);
    on_stack_[v] = true;
    for (const auto& e : edges_[v]) {
      const int w = ids_.at(e.to);
      if (index_[w] < 0) {
        connect(w);
        low_[v] = std::min(low_[v], low_[w]);
      } else if (on_stack_[w]) {
        low_[v] = std::min(low_[v], index_[w]);
      }
    }
    if (low_[v] == index_[v]) {
      for (;;) {
        const int w = stack_.back();
        stack_.pop_back();
        on_stack_[w] = false;
        comp_[w] = components_;
        if (w == v) break;
      }
      ++components_;
    }
  }

  [[noreturn]] void throw_cycle(int from, int to) {
    // BFS from `to` back to `from` inside the component.
    std::vector<int> parent(names_.size(), -1);
    std::queue<int> q;
    q.push(to);
    parent[to] = to;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      if (v == from) break;
      for (const auto& e : edges_[v]) {
        const int w = ids_.at(e.to);
        if (comp_[w] == comp_[from] && parent[w] < 0) {
          parent[w] = v;
          q.push(w);
        }
      }
    }
    std::vector<std::string> cycle;
    for (int v = from; v != to; v = parent[v]) cycle.push_back(names_[v]);
    cycle.push_back(names_[to]);
    std::reverse(cycle.begin(), cycle.end());
    cycle.push_back(names_[to]);
    std::string msg = "program is not stratifiable: negative cycle ";
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (i) msg += (i == 1 ? " <-not- " : " <- ");
      msg += cycle[i];
    }
    throw StratificationError(msg, std::move(cycle));
  }

  std::unordered_map<std::string, int> ids_;
  std::vector<std::string> names_;
  std::vector<std::vector<DepEdge>> edges_;
  std::vector<int> index_, low_, comp_;
  std::vector<bool> on_stack_;
  std::vector<int> stack_;
  int counter_ = 0;
  int components_ = 0;
};

void check_arities(std::span<const NormalRule> program, const FactSet& facts) {
  std::unordered_map<std::string, std::size_t> arity;
  auto see = [&](const Atom& a) {
    auto [it, inserted] = arity.try_emplace(a.predicate, a.args.size());
    if (!inserted && it->second != a.args.size())
      throw LogicError("predicate '" + a.predicate + "' used with arities " +
                       std::to_string(it->second) + " and " + std::to_string(a.args.size()));
  };
  for (const auto& r : program) {
    see(r.head);
    for (const auto& l : r.body)
      if (l.kind != Literal::Kind::Compare) see(l.atom);
  }
  for (const auto& a : facts.sorted()) see(a);
}

}  // namespace

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_variable(); });
}

std::size_t AtomHash::operator()(const Atom& a) const noexcept {
  std::size_t seed = std::hash<std::string>{}(a.predicate);
  for (const auto& t : a.args) {
    hash_combine(seed, static_cast<std::size_t>(t.kind));
    if (t.kind == Term::Kind::Integer)
      hash_combine(seed, std::hash<std::int64_t>{}(t.value));
    else
      hash_combine(seed, std::hash<std::string>{}(t.text));
  }
  return seed;
}

FactSet::FactSet(std::initializer_list<Atom> atoms) {
  for (const auto& a : atoms) insert(a);
}

bool FactSet::insert(Atom atom) {
  if (!atom.is_ground()) throw LogicError("fact is not ground: " + to_string(atom));
  if (atoms_.contains(atom)) return false;
  by_predicate_[atom.predicate].push_back(atom);
  atoms_.insert(std::move(atom));
  return true;
}

const std::vector<Atom>& FactSet::with_predicate(const std::string& predicate) const {
  static const std::vector<Atom> kEmpty;
  auto it = by_predicate_.find(predicate);
  return it == by_predicate_.end() ? kEmpty : it->second;
}

std::vector<Atom> FactSet::sorted() const {
  std::vector<Atom> out(atoms_.begin(), atoms_.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool FactSet::subset_of(const FactSet& other) const {
  return std::all_of(atoms_.begin(), atoms_.end(), [&](const Atom& a) { return other.contains(a); });
}

void check_safety(const NormalRule& rule) {
  std::set<std::string> bound;
  for (const auto& lit : rule.body) {
    if (lit.kind != Literal::Kind::Positive) continue;
    for (const auto& t : lit.atom.args)
      if (t.is_variable() && !t.is_anonymous()) bound.insert(t.text);
  }
  auto require = [&](const Term& t, const char* where) {
    if (!t.is_variable()) return;
    if (t.is_anonymous() || !bound.contains(t.text))
      throw UnsafeRuleError("unsafe rule '" + to_string(rule) + "': variable " + t.text +
                            " in " + where + " is not bound by a positive body atom");
  };
  for (const auto& t : rule.head.args) require(t, "head");
  for (const auto& lit : rule.body) {
    if (lit.kind == Literal::Kind::Negative)
      for (const auto& t : lit.atom.args) require(t, "negative literal");
    if (lit.kind == Literal::Kind::Compare) require(Term::variable(lit.cmp.variable), "comparison");
  }
}

bool is_safe(const NormalRule& rule) {
  try {
    check_safety(rule);
    return true;
  } catch (const UnsafeRuleError&) {
    return false;
  }
}

FactSet evaluate(std::span<const NormalRule> program, const FactSet& facts) {
  if (program.empty()) return facts;
  for (const auto& r : program) check_safety(r);
  check_arities(program, facts);

  const auto strata = Stratifier(program).strata();
  int top = 0;
  for (const auto& [_, s] : strata) top = std::max(top, s);

  FactSet out = facts;
  for (int s = 0; s <= top; ++s) {
    std::vector<const NormalRule*> layer;
    for (const auto& r : program)
      if (strata.at(r.head.predicate) == s) layer.push_back(&r);
    if (layer.empty()) continue;
    for (bool changed = true; changed;) {
      changed = false;
      std::vector<Atom> derived;
      for (const NormalRule* r : layer) {
        Binding b;
        for_each_grounding(*r, out, 0, b, [&](const Binding& full) {
          derived.push_back(substitute(r->head, full));
          return true;
        });
      }
      for (auto& a : derived) changed |= out.insert(std::move(a));
    }
  }
  return out;
}

bool extends(const FactSet& interp, const PartialInterpretation& pi) {
  for (const auto& a : pi.inc.sorted())
    if (!interp.contains(a)) return false;
  for (const auto& a : pi.exc.sorted())
    if (interp.contains(a)) return false;
  return true;
}

bool accepts(std::span<const NormalRule> program, const Wcdpi& e) {
  std::vector<NormalRule> all(program.begin(), program.end());
  all.insert(all.end(), e.ctx.rules.begin(), e.ctx.rules.end());
  return extends(evaluate(all, e.ctx.facts), e.pi);
}

bool body_satisfied(const NormalRule& rule, const FactSet& interp) {
  Binding b;
  bool found = false;
  for_each_grounding(rule, interp, 0, b, [&](const Binding&) {
    found = true;
    return false;
  });
  return found;
}

}  // namespace eoilp::logic
