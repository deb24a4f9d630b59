#pragma once

// Seed-pinned generators and independent reference oracles shared by the unit
// tests and the acceptance suite. Nothing here calls the library routine it
// is used to check.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsl/gsl.hpp"

namespace support {

using Rng = std::mt19937_64;

inline int below(Rng& r, int n) { return static_cast<int>(r() % static_cast<std::uint64_t>(n)); }
inline bool coin(Rng& r, int percent = 50) { return below(r, 100) < percent; }
template <class T>
const T& choose(Rng& r, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(below(r, static_cast<int>(v.size())))];
}

// ---------------------------------------------------------------------------
// Models.

struct ModelShape {
  int states = 3;
  int agents = 2;
  int actions = 2;
};

inline std::string state_name(int i) { return "s" + std::to_string(i); }

// Random total CGS over atoms {p, q}; agents are named a, b.
inline gsl::Cgs random_model(Rng& r, ModelShape shape) {
  nlohmann::json doc;
  doc["atoms"] = {"p", "q"};
  std::vector<std::string> agents{"a", "b"};
  agents.resize(static_cast<std::size_t>(shape.agents));
  doc["agents"] = agents;
  std::vector<std::string> actions;
  for (int i = 0; i < shape.actions; ++i) actions.push_back(std::to_string(i));
  doc["actions"] = actions;
  std::vector<std::string> states;
  for (int i = 0; i < shape.states; ++i) states.push_back(state_name(i));
  doc["states"] = states;
  doc["initial"] = "s0";
  doc["label"] = nlohmann::json::object();
  for (const auto& s : states) {
    std::vector<std::string> lab;
    if (coin(r)) lab.push_back("p");
    if (coin(r)) lab.push_back("q");
    doc["label"][s] = lab;
  }
  doc["transitions"] = nlohmann::json::array();
  int decisions = 1;
  for (int i = 0; i < shape.agents; ++i) decisions *= shape.actions;
  for (const auto& s : states)
    for (int d = 0; d < decisions; ++d) {
      nlohmann::json dec = nlohmann::json::object();
      int x = d;
      for (const auto& ag : agents) {
        dec[ag] = actions[static_cast<std::size_t>(x % shape.actions)];
        x /= shape.actions;
      }
      doc["transitions"].push_back({{"from", s}, {"decision", dec}, {"to", choose(r, states)}});
    }
  return gsl::load_cgs(doc.dump());
}

// Turn-based game: at each state only the owner's action matters.
struct TurnBased {
  gsl::Cgs cgs;
  std::vector<int> owner;                // 0 for agent a, 1 for agent b
  std::vector<std::vector<int>> choice;  // successor per owner action
};

inline TurnBased random_turn_based(Rng& r, int n) {
  TurnBased t;
  nlohmann::json doc;
  doc["atoms"] = {"p", "q"};
  doc["agents"] = {"a", "b"};
  doc["actions"] = {"0", "1"};
  std::vector<std::string> states;
  for (int i = 0; i < n; ++i) states.push_back(state_name(i));
  doc["states"] = states;
  doc["initial"] = "s0";
  doc["label"] = nlohmann::json::object();
  for (int i = 0; i < n; ++i) doc["label"][states[i]] = coin(r, 30) ? std::vector<std::string>{"p"} : std::vector<std::string>{};
  doc["transitions"] = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    int own = below(r, 2);
    t.owner.push_back(own);
    t.choice.push_back({below(r, n), below(r, n)});
    for (int act = 0; act < 2; ++act) {
      nlohmann::json dec = own == 0 ? nlohmann::json{{"a", std::to_string(act)}, {"b", "*"}}
                                    : nlohmann::json{{"a", "*"}, {"b", std::to_string(act)}};
      doc["transitions"].push_back({{"from", states[i]}, {"decision", dec}, {"to", states[t.choice[i][act]]}});
    }
  }
  t.cgs = gsl::load_cgs(doc.dump());
  return t;
}

// States from which agent `player` forces a visit to a p-state.
inline std::vector<bool> attractor_oracle(const TurnBased& t, int player) {
  const int n = static_cast<int>(t.owner.size());
  std::vector<bool> in(n, false);
  for (int s = 0; s < n; ++s) in[s] = t.cgs.holds(s, "p");
  for (bool changed = true; changed;) {
    changed = false;
    for (int s = 0; s < n; ++s) {
      if (in[s]) continue;
      bool a = in[t.choice[s][0]], b = in[t.choice[s][1]];
      bool now = t.owner[s] == player ? (a || b) : (a && b);
      if (now) {
        in[s] = true;
        changed = true;
      }
    }
  }
  return in;
}

// ---------------------------------------------------------------------------
// Formulas.

inline gsl::Formula random_ltl(Rng& r, int depth, const std::vector<std::string>& atoms = {"p", "q"}) {
  using namespace gsl;
  if (depth == 0 || coin(r, 25)) return coin(r, 10) ? top() : atom(choose(r, atoms));
  switch (below(r, 6)) {
    case 0: return neg(random_ltl(r, depth - 1, atoms));
    case 1: return lor(random_ltl(r, depth - 1, atoms), random_ltl(r, depth - 1, atoms));
    case 2: return land(random_ltl(r, depth - 1, atoms), random_ltl(r, depth - 1, atoms));
    case 3: return next(random_ltl(r, depth - 1, atoms));
    case 4: return until(random_ltl(r, depth - 1, atoms), random_ltl(r, depth - 1, atoms));
    default: return coin(r) ? eventually(random_ltl(r, depth - 1, atoms)) : always(random_ltl(r, depth - 1, atoms));
  }
}

// Arbitrary ASTs over agents {a, b}, variables {x, y, z}, including
// infinite grades. Only core node kinds are built directly.
inline gsl::Formula random_ast(Rng& r, int depth) {
  using namespace gsl;
  static const std::vector<std::string> vars{"x", "y", "z"};
  static const std::vector<std::string> agents{"a", "b"};
  if (depth == 0 || coin(r, 15)) return atom(choose(r, std::vector<std::string>{"p", "q", "true", "goal_1"}));
  switch (below(r, 6)) {
    case 0: return neg(random_ast(r, depth - 1));
    case 1: return lor(random_ast(r, depth - 1), random_ast(r, depth - 1));
    case 2: return next(random_ast(r, depth - 1));
    case 3: return until(random_ast(r, depth - 1), random_ast(r, depth - 1));
    case 4: {
      std::vector<std::string> vs{choose(r, vars)};
      if (coin(r, 30)) {
        std::string w = choose(r, vars);
        if (w != vs[0]) vs.push_back(w);
      }
      Grade g = Grade::finite(static_cast<std::uint64_t>(below(r, 4)));
      int k = below(r, 12);
      if (k == 0) g = {Grade::Kind::Aleph0, 0};
      if (k == 1) g = {Grade::Kind::Aleph1, 0};
      if (k == 2) g = {Grade::Kind::Continuum, 0};
      return exists(vs, g, random_ast(r, depth - 1));
    }
    default: return bind(choose(r, agents), choose(r, vars), random_ast(r, depth - 1));
  }
}

// Structural equality written against the node accessors only.
inline bool same_ast(const gsl::Formula& a, const gsl::Formula& b) {
  using gsl::NodeKind;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::Atom: return a.atom() == b.atom();
    case NodeKind::Not:
    case NodeKind::Next: return same_ast(a.sub(), b.sub());
    case NodeKind::Or:
    case NodeKind::Until: return same_ast(a.left(), b.left()) && same_ast(a.right(), b.right());
    case NodeKind::Exists:
      return a.vars() == b.vars() && a.grade().kind == b.grade().kind && a.grade().n == b.grade().n &&
             same_ast(a.sub(), b.sub());
    case NodeKind::Bind: return a.agent() == b.agent() && a.var() == b.var() && same_ast(a.sub(), b.sub());
  }
  return false;
}

// The eight defining clauses of free placeholders, as name sets tagged by kind.
inline std::set<std::pair<bool, std::string>> free_direct(const gsl::Formula& f, const std::set<std::string>& agents) {
  using gsl::NodeKind;
  std::set<std::pair<bool, std::string>> out;
  switch (f.kind()) {
    case NodeKind::Atom: return out;
    case NodeKind::Not: return free_direct(f.sub(), agents);
    case NodeKind::Or: {
      out = free_direct(f.left(), agents);
      auto b = free_direct(f.right(), agents);
      out.insert(b.begin(), b.end());
      return out;
    }
    case NodeKind::Next: {
      out = free_direct(f.sub(), agents);
      for (const auto& a : agents) out.insert({true, a});
      return out;
    }
    case NodeKind::Until: {
      out = free_direct(f.left(), agents);
      auto b = free_direct(f.right(), agents);
      out.insert(b.begin(), b.end());
      for (const auto& a : agents) out.insert({true, a});
      return out;
    }
    case NodeKind::Exists: {
      out = free_direct(f.sub(), agents);
      for (const auto& v : f.vars()) out.erase({false, v});
      return out;
    }
    case NodeKind::Bind: {
      out = free_direct(f.sub(), agents);
      if (out.erase({true, f.agent()})) out.insert({false, f.var()});
      return out;
    }
  }
  return out;
}

// LTL on a lasso by the semantic clauses, with the until witness searched over
// one full unrolling (prefix + cycle positions suffice to see every position).
inline bool ltl_oracle(const gsl::Formula& f, const std::vector<int>& prefix, const std::vector<int>& cycle,
                       const gsl::Cgs& g, std::size_t pos = 0) {
  using gsl::NodeKind;
  const std::size_t P = prefix.size(), C = cycle.size(), N = P + C;
  auto norm = [&](std::size_t k) { return k < P ? k : P + (k - P) % C; };
  auto state_at = [&](std::size_t k) { return k < P ? prefix[k] : cycle[k - P]; };
  pos = norm(pos);
  switch (f.kind()) {
    case NodeKind::Atom: return g.holds(state_at(pos), f.atom());
    case NodeKind::Not: return !ltl_oracle(f.sub(), prefix, cycle, g, pos);
    case NodeKind::Or:
      return ltl_oracle(f.left(), prefix, cycle, g, pos) || ltl_oracle(f.right(), prefix, cycle, g, pos);
    case NodeKind::Next: return ltl_oracle(f.sub(), prefix, cycle, g, pos + 1);
    case NodeKind::Until:
      for (std::size_t j = pos; j < pos + N; ++j) {
        if (ltl_oracle(f.right(), prefix, cycle, g, j)) return true;
        if (!ltl_oracle(f.left(), prefix, cycle, g, j)) return false;
      }
      return false;
    default: throw std::logic_error("strategic operator in LTL oracle");
  }
}

// ---------------------------------------------------------------------------
// Automata.

inline gsl::Apt random_apt(Rng& r, int states, int priorities, const gsl::Alphabet& al) {
  gsl::Apt a(al);
  for (int q = 0; q < states; ++q) a.add_state(below(r, priorities));
  a.initial = 0;
  std::function<gsl::PosBoolPool::Id(int)> gen = [&](int depth) -> gsl::PosBoolPool::Id {
    int k = below(r, 10);
    if (depth == 0 || k < 4) {
      if (k == 0) return coin(r) ? gsl::PosBoolPool::kTrue : gsl::PosBoolPool::kFalse;
      return a.pool.atom(below(r, al.num_directions), below(r, states));
    }
    return coin(r) ? a.pool.land(gen(depth - 1), gen(depth - 1)) : a.pool.lor(gen(depth - 1), gen(depth - 1));
  };
  for (int q = 0; q < states; ++q)
    for (int l = 0; l < a.num_letters(); ++l) a.set_transition(q, l, gen(2));
  return a;
}

// Random regular tree with every direction present.
inline gsl::RegularTree random_tree(Rng& r, int nodes, int letters, int directions) {
  gsl::RegularTree t;
  for (int n = 0; n < nodes; ++n) {
    t.label.push_back(below(r, letters));
    std::vector<int> ch;
    for (int d = 0; d < directions; ++d) ch.push_back(below(r, nodes));
    t.child.push_back(ch);
  }
  return t;
}

// Every regular tree from generators with 1..max_nodes nodes (root 0).
inline std::vector<gsl::RegularTree> all_trees(int max_nodes, int letters, int directions) {
  std::vector<gsl::RegularTree> out;
  for (int n = 1; n <= max_nodes; ++n) {
    const int label_cells = n, child_cells = n * directions;
    std::uint64_t total = 1;
    for (int i = 0; i < label_cells; ++i) total *= static_cast<std::uint64_t>(letters);
    for (int i = 0; i < child_cells; ++i) total *= static_cast<std::uint64_t>(n);
    for (std::uint64_t code = 0; code < total; ++code) {
      std::uint64_t c = code;
      gsl::RegularTree t;
      t.label.resize(n);
      t.child.assign(n, std::vector<int>(directions));
      for (int i = 0; i < n; ++i) {
        t.label[i] = static_cast<int>(c % letters);
        c /= letters;
      }
      for (int i = 0; i < n; ++i)
        for (int d = 0; d < directions; ++d) {
          t.child[i][d] = static_cast<int>(c % n);
          c /= n;
        }
      out.push_back(std::move(t));
    }
  }
  return out;
}

// Some node within depth |gen|^2 of the root satisfies `pred` on its letter.
inline bool some_node(const gsl::RegularTree& t, const std::function<bool(int)>& pred) {
  const std::size_t bound = static_cast<std::size_t>(t.size()) * t.size();
  std::vector<int> frontier{t.root};
  for (std::size_t depth = 0; depth <= bound && !frontier.empty(); ++depth) {
    std::vector<int> next;
    for (int n : frontier) {
      if (pred(t.label[n])) return true;
      for (int c : t.child[n])
        if (c >= 0) next.push_back(c);
    }
    frontier = std::move(next);
    if (frontier.size() > 4096) frontier.resize(4096);
  }
  return false;
}

// Acceptance of a safety automaton (every priority even) as the greatest set
// of (node, state) pairs whose transition is satisfied by moves into the set.
inline bool safety_member_oracle(const gsl::Apt& a, const gsl::RegularTree& t) {
  const int Q = a.num_states();
  std::vector<bool> in(static_cast<std::size_t>(t.size()) * Q, true);
  auto idx = [&](int n, int q) { return static_cast<std::size_t>(n) * Q + q; };
  for (bool changed = true; changed;) {
    changed = false;
    for (int n = 0; n < t.size(); ++n)
      for (int q = 0; q < Q; ++q) {
        if (!in[idx(n, q)]) continue;
        bool ok = a.pool.eval(a.transition(q, t.label[n]), [&](const gsl::Move& m) {
          int c = t.child[n][m.dir];
          return c >= 0 && in[idx(c, m.state)];
        });
        if (!ok) {
          in[idx(n, q)] = false;
          changed = true;
        }
      }
  }
  return in[idx(t.root, a.initial)];
}

// ---------------------------------------------------------------------------
// Parity games.

inline gsl::ParityGame random_game(Rng& r, int n, int priorities) {
  gsl::ParityGame g;
  for (int v = 0; v < n; ++v) g.add_vertex(coin(r) ? gsl::Player::Verifier : gsl::Player::Refuter, below(r, priorities));
  for (int v = 0; v < n; ++v) {
    int k = 1 + below(r, 3);
    std::set<int> succ;
    for (int i = 0; i < k; ++i) succ.insert(below(r, n));
    for (int w : succ) g.add_edge(v, w);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Strategies.

inline gsl::FiniteStrategy random_strategy(Rng& r, int states, int actions, int memory) {
  gsl::FiniteStrategy f;
  f.memory = memory;
  f.num_states = states;
  f.init = below(r, memory);
  for (int i = 0; i < memory * states; ++i) {
    f.update.push_back(below(r, memory));
    f.output.push_back(below(r, actions));
  }
  return f;
}

// Agreement on every history from `start` up to length `bound`.
inline bool agree_on_histories(const gsl::Cgs& g, const gsl::FiniteStrategy& a, const gsl::FiniteStrategy& b, int start,
                               std::size_t bound) {
  std::vector<std::vector<int>> layer{{start}};
  for (std::size_t len = 1; len <= bound; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& h : layer) {
      if (a.act_on(h) != b.act_on(h)) return false;
      if (len == bound) continue;
      for (int t : g.successors[h.back()]) {
        auto e = h;
        e.push_back(t);
        next.push_back(std::move(e));
      }
    }
    layer = std::move(next);
  }
  return true;
}

inline std::string data_path(const std::string& dir, const std::string& rel) { return dir + "/" + rel; }

}  // namespace support
