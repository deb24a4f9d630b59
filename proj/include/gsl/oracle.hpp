#pragma once

// Brute-force evaluation of the satisfaction relation over bounded-memory
// strategies, used as ground truth for small instances.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gsl/error.hpp"
#include "gsl/formula.hpp"
#include "gsl/game.hpp"
#include "gsl/solution_concepts.hpp"

namespace gsl {

namespace detail {

// Canonical form of the function Hst(start) -> Ac computed by a machine:
// minimized reachable product of states and memory, numbered breadth-first.
inline std::vector<int> strategy_signature(const Cgs& g, const FiniteStrategy& f, int start) {
  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> cfg;
  auto visit = [&](int s, int m) {
    auto [it, fresh] = id.emplace(std::make_pair(s, m), static_cast<int>(cfg.size()));
    if (fresh) cfg.emplace_back(s, m);
    return it->second;
  };
  visit(start, f.init);
  std::vector<std::vector<int>> succ;
  for (std::size_t k = 0; k < cfg.size(); ++k) {
    auto [s, m] = cfg[k];
    std::vector<int> row;
    for (int t : g.successors[s]) row.push_back(visit(t, f.next(m, s)));
    succ.push_back(std::move(row));
  }
  const int n = static_cast<int>(cfg.size());
  std::vector<int> cls(n);
  {
    std::map<std::pair<int, int>, int> ids;
    for (int i = 0; i < n; ++i) {
      auto key = std::make_pair(cfg[i].first, f.action(cfg[i].second, cfg[i].first));
      cls[i] = ids.emplace(key, static_cast<int>(ids.size())).first->second;
    }
  }
  for (int rounds = 0;; ++rounds) {
    std::map<std::vector<int>, int> ids;
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int> key{cls[i]};
      for (int j : succ[i]) key.push_back(cls[j]);
      next[i] = ids.emplace(std::move(key), static_cast<int>(ids.size())).first->second;
    }
    bool stable = ids.size() == static_cast<std::size_t>(*std::max_element(cls.begin(), cls.end()) + 1);
    cls = std::move(next);
    if (stable) break;
  }
  // Breadth-first renumbering of classes from the root.
  std::vector<int> rep(n, -1), order_of(n, -1);
  for (int i = 0; i < n; ++i)
    if (rep[cls[i]] < 0) rep[cls[i]] = i;
  std::vector<int> order{cls[0]};
  order_of[cls[0]] = 0;
  std::vector<int> sig;
  for (std::size_t k = 0; k < order.size(); ++k) {
    int i = rep[order[k]];
    sig.push_back(cfg[i].first);
    sig.push_back(f.action(cfg[i].second, cfg[i].first));
    for (int j : succ[i]) {
      int c = cls[j];
      if (order_of[c] < 0) {
        order_of[c] = static_cast<int>(order.size());
        order.push_back(c);
      }
      sig.push_back(order_of[c]);
    }
  }
  return sig;
}

}  // namespace detail

// All strategies from `start` realizable with at most `memory` memory states,
// one machine per distinct function on histories.
inline std::vector<FiniteStrategy> enumerate_strategies(const Cgs& g, int memory, int start,
                                                        std::size_t budget = 1000000) {
  if (memory < 1) throw UsageError("memory bound must be positive");
  const int S = g.num_states();
  const int A = g.num_actions();
  std::vector<FiniteStrategy> out;
  std::set<std::vector<int>> seen;
  std::size_t visited = 0;
  for (int k = 1; k <= memory; ++k) {
    const int cells = k * S;
    FiniteStrategy f;
    f.memory = k;
    f.num_states = S;
    f.update.assign(cells, 0);
    f.output.assign(cells, 0);
    // Odometer over update tables (outer) and output tables (inner).
    while (true) {
      std::fill(f.output.begin(), f.output.end(), 0);
      while (true) {
        if (++visited > budget) throw ResourceError("strategy enumeration budget exceeded");
        if (seen.insert(detail::strategy_signature(g, f, start)).second) out.push_back(f);
        int i = 0;
        while (i < cells && ++f.output[i] == A) f.output[i++] = 0;
        if (i == cells) break;
      }
      int i = 0;
      while (i < cells && ++f.update[i] == k) f.update[i++] = 0;
      if (i == cells) break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

enum class Justification { None, SingleAction, MemorylessDetermined };

inline const char* to_string(Justification j) {
  switch (j) {
    case Justification::None: return "none";
    case Justification::SingleAction: return "single-action";
    case Justification::MemorylessDetermined: return "memoryless";
  }
  return "?";
}

namespace detail {

inline Formula strip_negations(Formula f) {
  while (f.kind() == NodeKind::Not) f = f.sub();
  return f;
}

inline bool is_state_predicate(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Atom: return true;
    case NodeKind::Not: return is_state_predicate(f.sub());
    case NodeKind::Or: return is_state_predicate(f.left()) && is_state_predicate(f.right());
    default: return false;
  }
}

// sigma, X sigma, F sigma, G sigma, GF sigma, FG sigma, sigma U sigma' (and negations).
inline bool is_simple_goal(const Formula& f0) {
  Formula f = strip_negations(f0);
  if (is_state_predicate(f)) return true;
  if (f.kind() == NodeKind::Next) return is_state_predicate(f.sub());
  if (f.kind() != NodeKind::Until) return false;
  if (is_state_predicate(f.left()) && is_state_predicate(f.right())) return true;
  if (!f.left().is_true()) return false;
  // F G sigma = F !F !sigma ; G F sigma = !F !F sigma
  Formula inner = strip_negations(f.right());
  return inner.kind() == NodeKind::Until && inner.left().is_true() && is_state_predicate(inner.right());
}

inline bool is_goal_sentence(const Formula& f0, const std::set<std::string>& agents) {
  Formula f = strip_negations(f0);
  if (f.kind() != NodeKind::Exists) return false;
  auto chain = quantifier_chain(f);
  unsigned blocks = 1;
  std::set<std::string> quantified;
  for (const auto& l : chain.links) {
    blocks += l.switches ? 1 : 0;
    if (!l.node.grade().is_finite()) return false;
    quantified.insert(l.node.vars().begin(), l.node.vars().end());
  }
  if (blocks > 2) return false;
  Formula cur = strip_negations(chain.body);
  std::set<std::string> bound_agents, bound_vars;
  while (cur.kind() == NodeKind::Bind) {
    if (!bound_agents.insert(cur.agent()).second) return false;
    if (!bound_vars.insert(cur.var()).second) return false;
    if (!quantified.count(cur.var())) return false;
    cur = cur.sub();
  }
  if (bound_agents != agents) return false;
  return is_simple_goal(cur);
}

inline bool memoryless_class(const Formula& f, const std::set<std::string>& agents) {
  if (is_state_predicate(f) || is_goal_sentence(f, agents)) return true;
  switch (f.kind()) {
    case NodeKind::Not: return memoryless_class(f.sub(), agents);
    case NodeKind::Or: return memoryless_class(f.left(), agents) && memoryless_class(f.right(), agents);
    default: return false;
  }
}

}  // namespace detail

// The strongest justification under which bounded enumeration is exact for `f`.
inline Justification justify(const Cgs& g, const Formula& f) {
  if (g.num_actions() == 1) return Justification::SingleAction;
  if (detail::memoryless_class(f, g.agent_set())) return Justification::MemorylessDetermined;
  return Justification::None;
}

struct OracleOptions {
  int memory = 1;
  std::size_t budget = 1000000;
  std::optional<Justification> justification;  // detected when absent
};

struct OracleVerdict {
  bool value = false;
  bool exact = false;
  Justification justification = Justification::None;
};

namespace detail {

class OracleEvaluator {
 public:
  OracleEvaluator(const Cgs& g, const OracleOptions& opt, Justification j)
      : g_(g), opt_(opt), just_(j), agents_(g.agent_set()) {}

  using Env = std::map<std::string, FiniteStrategy>;

  struct Val {
    bool value;
    bool exact;
  };

  Val eval(const Formula& f, int s, const Env& env) {
    switch (f.kind()) {
      case NodeKind::Atom: return {g_.holds(s, f.atom()), true};
      case NodeKind::Not: {
        Val v = eval(f.sub(), s, env);
        return {!v.value, v.exact};
      }
      case NodeKind::Or: {
        Val a = eval(f.left(), s, env);
        if (a.value && a.exact) return a;
        Val b = eval(f.right(), s, env);
        if (b.value && b.exact) return b;
        return {a.value || b.value, a.exact && b.exact};
      }
      case NodeKind::Next: {
        auto pl = play(s, env);
        const std::size_t nx = pl.states.size() > 1 ? 1 : pl.loop;
        return eval(f.sub(), pl.states[nx], pl.env_at(nx));
      }
      case NodeKind::Until: {
        auto pl = play(s, env);
        const std::size_t n = pl.states.size();
        std::vector<Val> a(n), b(n);
        bool exact = true;
        for (std::size_t i = 0; i < n; ++i) {
          Env e = pl.env_at(i);
          a[i] = eval(f.left(), pl.states[i], e);
          b[i] = eval(f.right(), pl.states[i], e);
          exact = exact && a[i].exact && b[i].exact;
        }
        std::vector<bool> v(n, false);
        for (bool changed = true; changed;) {
          changed = false;
          for (std::size_t k = n; k-- > 0;) {
            std::size_t nx = k + 1 < n ? k + 1 : pl.loop;
            bool nv = b[k].value || (a[k].value && v[nx]);
            if (nv != v[k]) {
              v[k] = nv;
              changed = true;
            }
          }
        }
        return {v[0], exact};
      }
      case NodeKind::Bind: {
        Env e = env;
        auto it = env.find(f.var());
        if (it != env.end()) {
          e[f.agent()] = it->second;
        } else if (free_placeholders(f.sub(), agents_).count(Placeholder::agent(f.agent()))) {
          throw UsageError("unassigned variable '" + f.var() + "'");
        }
        return eval(f.sub(), s, e);
      }
      case NodeKind::Exists: return eval_exists(f, s, env);
    }
    return {false, false};
  }

 private:
  struct Play {
    std::vector<int> states;
    std::vector<std::vector<int>> memories;  // per position, per env entry
    std::vector<std::string> names;
    std::size_t loop = 0;
    const Env* base = nullptr;

    Env env_at(std::size_t i) const {
      Env e = *base;
      for (std::size_t k = 0; k < names.size(); ++k) e[names[k]].init = memories[i][k];
      return e;
    }
  };

  // Lasso of configurations (state, memory of every assigned strategy).
  Play play(int s, const Env& env) const {
    Play p;
    p.base = &env;
    for (const auto& [n, f] : env) p.names.push_back(n);
    std::vector<const FiniteStrategy*> agent_strat;
    for (const auto& ag : g_.agents) {
      auto it = env.find(ag);
      if (it == env.end()) throw UsageError("agent '" + ag + "' has no strategy");
      agent_strat.push_back(&it->second);
    }
    std::vector<int> mem;
    for (const auto& [n, f] : env) mem.push_back(f.init);
    std::map<std::pair<int, std::vector<int>>, std::size_t> seen;
    int cur = s;
    while (true) {
      auto [it, fresh] = seen.emplace(std::make_pair(cur, mem), p.states.size());
      if (!fresh) {
        p.loop = it->second;
        return p;
      }
      p.states.push_back(cur);
      p.memories.push_back(mem);
      std::vector<int> acts;
      for (std::size_t i = 0; i < g_.agents.size(); ++i) {
        const FiniteStrategy* f = agent_strat[i];
        std::size_t k = static_cast<std::size_t>(
            std::find(p.names.begin(), p.names.end(), g_.agents[i]) - p.names.begin());
        acts.push_back(f->action(mem[k], cur));
      }
      std::size_t k = 0;
      for (const auto& [n, f] : env) {
        mem[k] = f.next(mem[k], cur);
        ++k;
      }
      cur = g_.step(cur, g_.decision_index(acts));
    }
  }

  const std::vector<FiniteStrategy>& strategies_from(int s) {
    auto it = strategies_.find(s);
    if (it == strategies_.end()) it = strategies_.emplace(s, enumerate_strategies(g_, opt_.memory, s, opt_.budget)).first;
    return it->second;
  }

  Val eval_exists(const Formula& f, int s, const Env& env) {
    const auto& strats = strategies_from(s);
    const auto& vars = f.vars();
    const std::uint64_t need = f.grade().n;
    if (need == 0) return {true, true};
    std::uint64_t count = 0;
    bool all_exact = true;
    std::vector<std::size_t> pick(vars.size(), 0);
    std::size_t tuples = 0;
    while (true) {
      if (++tuples > opt_.budget) throw ResourceError("oracle tuple budget exceeded");
      Env e = env;
      for (std::size_t i = 0; i < vars.size(); ++i) e[vars[i]] = strats[pick[i]];
      Val v = eval(f.sub(), s, e);
      if (v.value && v.exact) {
        if (++count >= need) return {true, true};
      } else if (v.value) {
        ++count;
        all_exact = false;
      } else {
        all_exact = all_exact && v.exact;
      }
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == strats.size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
    bool value = count >= need;
    bool exact = false;
    if (just_ == Justification::SingleAction) exact = all_exact;
    if (just_ == Justification::MemorylessDetermined) exact = all_exact && count == 0;
    return {value, exact};
  }

  const Cgs& g_;
  OracleOptions opt_;
  Justification just_;
  std::set<std::string> agents_;
  std::map<int, std::vector<FiniteStrategy>> strategies_;
};

}  // namespace detail

// Evaluates G, chi, start |= f with quantifiers ranging over strategies of at
// most `opt.memory` memory states.
inline OracleVerdict oracle_check(const Cgs& g, const Formula& f, const OracleOptions& opt = {},
                                  const FiniteAssignment& chi = {}, std::optional<int> start = std::nullopt) {
  if (!all_grades_finite(f)) throw UnsupportedGrade();
  for (const auto& p : free_placeholders(f, g.agent_set()))
    if (!chi.count(p)) throw UsageError("no strategy for free placeholder '" + p.name + "'");
  Justification j = opt.justification.value_or(justify(g, f));
  detail::OracleEvaluator ev(g, opt, j);
  detail::OracleEvaluator::Env env;
  for (const auto& [p, s] : chi) env[p.name] = s;
  auto v = ev.eval(f, start.value_or(g.initial), env);
  OracleVerdict out;
  out.value = v.value;
  out.justification = j;
  out.exact = v.exact && (j != Justification::None || analyze_fragment(f, g.agent_set()).quantifier_rank == 0);
  return out;
}

// ---------------------------------------------------------------------------
// Pure equilibria among memoryless profiles.

namespace detail {

inline std::vector<std::int64_t> payoffs(const Cgs& g, const Objectives& obj, int start,
                                         const std::vector<FiniteStrategy>& profile) {
  Lasso l = induced_play(g, start, profile);
  std::vector<std::int64_t> out;
  for (const auto& o : obj) {
    unsigned h = 0;
    for (std::size_t j = 0; j < o.goals.size(); ++j)
      if (eval_ltl_on_lasso(o.goals[j], l, g)) h |= 1u << j;
    out.push_back(o.value(h));
  }
  return out;
}

inline bool is_memoryless_ne(const Cgs& g, const Objectives& obj, int start, const std::vector<FiniteStrategy>& profile,
                             const std::vector<FiniteStrategy>& deviations) {
  auto base = payoffs(g, obj, start, profile);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    auto dev = profile;
    for (const auto& d : deviations) {
      dev[i] = d;
      if (payoffs(g, obj, start, dev)[i] > base[i]) return false;
    }
  }
  return true;
}

// Calls `visit` on every memoryless profile, distinct on the states reachable from `start`.
template <class Visit>
void for_each_memoryless_profile(const Cgs& g, int start, std::size_t budget, Visit visit) {
  auto strats = enumerate_strategies(g, 1, start, budget);
  std::vector<std::size_t> pick(g.agents.size(), 0);
  std::vector<FiniteStrategy> profile(g.agents.size());
  std::size_t visited = 0;
  while (true) {
    if (++visited > budget) throw ResourceError("profile budget exceeded");
    for (std::size_t i = 0; i < pick.size(); ++i) profile[i] = strats[pick[i]];
    visit(profile, strats);
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == strats.size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }
}

inline std::vector<int> reachable_states(const Cgs& g, int start) {
  std::vector<bool> seen(g.num_states(), false);
  std::vector<int> out{start};
  seen[start] = true;
  for (std::size_t k = 0; k < out.size(); ++k)
    for (int t : g.successors[out[k]])
      if (!seen[t]) {
        seen[t] = true;
        out.push_back(t);
      }
  return out;
}

}  // namespace detail

inline void require_objectives(const Cgs& g, const Objectives& obj) {
  if (obj.size() != g.agents.size()) throw UsageError("one objective tuple per agent required");
}

// Memoryless profiles from the initial state with no profitable memoryless deviation.
inline std::size_t count_ne_memoryless(const Cgs& g, const Objectives& obj, std::size_t budget = 1000000) {
  require_objectives(g, obj);
  std::size_t count = 0;
  detail::for_each_memoryless_profile(g, g.initial, budget, [&](const auto& profile, const auto& strats) {
    if (detail::is_memoryless_ne(g, obj, g.initial, profile, strats)) ++count;
  });
  return count;
}

// Memoryless profiles that are memoryless NE from every state reachable from
// the initial state in the transition graph.
inline std::size_t count_spe_memoryless(const Cgs& g, const Objectives& obj, std::size_t budget = 1000000) {
  require_objectives(g, obj);
  const auto reach = detail::reachable_states(g, g.initial);
  std::size_t count = 0;
  detail::for_each_memoryless_profile(g, g.initial, budget, [&](const auto& profile, const auto& strats) {
    for (int t : reach)
      if (!detail::is_memoryless_ne(g, obj, t, profile, strats)) return;
    ++count;
  });
  return count;
}

}  // namespace gsl
