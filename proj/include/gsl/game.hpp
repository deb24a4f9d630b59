#pragma once

// Concurrent game structures, finite-memory strategies, plays and LTL
// evaluation on ultimately periodic plays.

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gsl/error.hpp"
#include "gsl/formula.hpp"

namespace gsl {

struct Cgs {
  std::vector<std::string> atoms;
  std::vector<std::string> agents;
  std::vector<std::string> actions;
  std::vector<std::string> states;
  int initial = 0;
  std::vector<std::set<std::string>> label;  // per state
  std::vector<int> transition;               // state * num_decisions() + decision
  std::vector<std::vector<int>> successors;  // sorted, per state

  int num_states() const { return static_cast<int>(states.size()); }
  int num_agents() const { return static_cast<int>(agents.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }
  int num_decisions() const {
    int n = 1;
    for (int i = 0; i < num_agents(); ++i) n *= num_actions();
    return n;
  }

  // Decision index: digit i (base |Ac|, least significant first) is agent i's action.
  int decision_index(const std::vector<int>& acts) const {
    int d = 0;
    for (int i = num_agents() - 1; i >= 0; --i) d = d * num_actions() + acts[i];
    return d;
  }
  int step(int s, int decision) const { return transition[s * num_decisions() + decision]; }
  bool holds(int s, const std::string& atom) const {
    return atom == kTrueAtom || label[s].count(atom) > 0;
  }
  std::set<std::string> agent_set() const { return {agents.begin(), agents.end()}; }

  int state_index(const std::string& n) const { return index_of(states, n, "state"); }
  int agent_index(const std::string& n) const { return index_of(agents, n, "agent"); }
  int action_index(const std::string& n) const { return index_of(actions, n, "action"); }

 private:
  static int index_of(const std::vector<std::string>& v, const std::string& n, const char* what) {
    auto it = std::find(v.begin(), v.end(), n);
    if (it == v.end()) throw ModelError(std::string("unknown ") + what + " '" + n + "'");
    return static_cast<int>(it - v.begin());
  }
};

namespace detail {

inline bool is_identifier(const std::string& s) {
  if (s.empty() || !is_ident_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

inline std::vector<std::string> name_list(const nlohmann::json& doc, const char* key, bool identifiers) {
  if (!doc.contains(key) || !doc[key].is_array()) throw ModelError(std::string("missing array '") + key + "'");
  std::vector<std::string> out;
  for (const auto& e : doc[key]) {
    if (!e.is_string()) throw ModelError(std::string("non-string entry in '") + key + "'");
    std::string s = e.get<std::string>();
    if (identifiers && (!is_identifier(s) || is_keyword(s)))
      throw ModelError(std::string("invalid name '") + s + "' in '" + key + "'");
    if (std::find(out.begin(), out.end(), s) != out.end())
      throw ModelError(std::string("duplicate name '") + s + "' in '" + key + "'");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

namespace detail {

inline Cgs build_cgs(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ModelError("model document must be a JSON object");
  Cgs g;
  g.atoms = detail::name_list(doc, "atoms", true);
  g.agents = detail::name_list(doc, "agents", true);
  g.actions = detail::name_list(doc, "actions", false);
  g.states = detail::name_list(doc, "states", false);
  if (g.agents.empty()) throw ModelError("at least one agent required");
  if (g.actions.empty()) throw ModelError("at least one action required");
  if (g.states.empty()) throw ModelError("at least one state required");
  if (std::find(g.actions.begin(), g.actions.end(), "*") != g.actions.end())
    throw ModelError("action name '*' is reserved");
  for (const auto& a : g.atoms)
    if (a == "true" || a == "false") throw ModelError("atom name '" + a + "' is reserved");
  for (const auto& a : g.atoms)
    if (std::find(g.agents.begin(), g.agents.end(), a) != g.agents.end())
      throw ModelError("name '" + a + "' used as both atom and agent");

  if (!doc.contains("initial") || !doc["initial"].is_string()) throw ModelError("initial state missing");
  g.initial = g.state_index(doc["initial"].get<std::string>());

  g.label.assign(g.states.size(), {});
  if (doc.contains("label")) {
    if (!doc["label"].is_object()) throw ModelError("'label' must be an object");
    for (const auto& [st, props] : doc["label"].items()) {
      int s = g.state_index(st);
      if (!props.is_array()) throw ModelError("label of '" + st + "' must be an array");
      for (const auto& p : props) {
        if (!p.is_string()) throw ModelError("non-string atom in label of '" + st + "'");
        std::string name = p.get<std::string>();
        if (std::find(g.atoms.begin(), g.atoms.end(), name) == g.atoms.end())
          throw ModelError("unknown atom '" + name + "' in label of '" + st + "'");
        g.label[s].insert(name);
      }
    }
  }

  const int nd = g.num_decisions();
  g.transition.assign(static_cast<std::size_t>(g.num_states()) * nd, -1);
  if (!doc.contains("transitions") || !doc["transitions"].is_array()) throw ModelError("missing array 'transitions'");
  for (const auto& t : doc["transitions"]) {
    if (!t.is_object() || !t.contains("from") || !t.contains("to") || !t.contains("decision"))
      throw ModelError("transition entries need 'from', 'decision' and 'to'");
    int from = g.state_index(t["from"].get<std::string>());
    int to = g.state_index(t["to"].get<std::string>());
    const auto& dec = t["decision"];
    if (!dec.is_object()) throw ModelError("'decision' must be an object");
    std::vector<int> fixed(g.agents.size(), -2);
    for (const auto& [ag, act] : dec.items()) {
      int i = g.agent_index(ag);
      std::string a = act.get<std::string>();
      fixed[i] = a == "*" ? -1 : g.action_index(a);
    }
    for (std::size_t i = 0; i < fixed.size(); ++i)
      if (fixed[i] == -2) throw ModelError("decision does not mention agent '" + g.agents[i] + "'");
    for (int d = 0; d < nd; ++d) {
      bool match = true;
      int rest = d;
      for (std::size_t i = 0; i < fixed.size(); ++i) {
        int a = rest % g.num_actions();
        rest /= g.num_actions();
        if (fixed[i] >= 0 && fixed[i] != a) match = false;
      }
      if (!match) continue;
      int& cell = g.transition[static_cast<std::size_t>(from) * nd + d];
      if (cell >= 0) throw ModelError("overlapping transitions");
      cell = to;
    }
  }
  if (std::find(g.transition.begin(), g.transition.end(), -1) != g.transition.end())
    throw ModelError("transition not total");

  g.successors.assign(g.states.size(), {});
  for (int s = 0; s < g.num_states(); ++s) {
    std::set<int> succ;
    for (int d = 0; d < nd; ++d) succ.insert(g.step(s, d));
    g.successors[s].assign(succ.begin(), succ.end());
  }
  return g;
}

}  // namespace detail

inline Cgs load_cgs(const std::string& document) {
  try {
    return detail::build_cgs(nlohmann::json::parse(document));
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed model document: ") + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Cgs load_cgs_file(const std::string& path) { return load_cgs(read_text_file(path)); }

// ---------------------------------------------------------------------------
// Finite-memory strategies. The action on a history s0..sk is
// output(m_k, s_k) where m_k is update folded over s0..s_{k-1} from init.

struct FiniteStrategy {
  int memory = 1;
  int init = 0;
  int num_states = 0;
  std::vector<int> update;  // m * num_states + s
  std::vector<int> output;  // m * num_states + s

  static FiniteStrategy memoryless(std::vector<int> actions) {
    FiniteStrategy f;
    f.num_states = static_cast<int>(actions.size());
    f.update.assign(actions.size(), 0);
    f.output = std::move(actions);
    return f;
  }
  static FiniteStrategy constant(int num_states, int action) {
    return memoryless(std::vector<int>(num_states, action));
  }

  int action(int m, int s) const { return output[m * num_states + s]; }
  int next(int m, int s) const { return update[m * num_states + s]; }

  int memory_after(const std::vector<int>& prefix) const {
    int m = init;
    for (int s : prefix) m = next(m, s);
    return m;
  }
  int act_on(const std::vector<int>& history) const {
    int m = init;
    for (std::size_t i = 0; i + 1 < history.size(); ++i) m = next(m, history[i]);
    return action(m, history.back());
  }
  // The strategy continuing after `prefix` (all positions strictly before the new start).
  FiniteStrategy shifted(const std::vector<int>& prefix) const {
    FiniteStrategy f = *this;
    f.init = memory_after(prefix);
    return f;
  }
};

using FiniteAssignment = std::map<Placeholder, FiniteStrategy>;

// Function equality on all histories from `start`, by exploring the product.
inline bool strategies_equal(const Cgs& g, const FiniteStrategy& a, const FiniteStrategy& b, int start) {
  std::set<std::tuple<int, int, int>> seen;
  std::vector<std::tuple<int, int, int>> stack{{start, a.init, b.init}};
  seen.insert(stack.back());
  while (!stack.empty()) {
    auto [s, ma, mb] = stack.back();
    stack.pop_back();
    if (a.action(ma, s) != b.action(mb, s)) return false;
    for (int t : g.successors[s]) {
      std::tuple<int, int, int> c{t, a.next(ma, s), b.next(mb, s)};
      if (seen.insert(c).second) stack.push_back(c);
    }
  }
  return true;
}

namespace detail {

inline void require_entry(const nlohmann::json& tbl, const std::string& key, const char* what) {
  if (!tbl.is_object() || !tbl.contains(key)) throw ModelError(std::string("incomplete ") + what + " table");
}

inline FiniteStrategy parse_strategy(const Cgs& g, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("output")) throw ModelError("strategy needs an 'output' table");
  std::vector<std::string> mem{"_"};
  bool has_memory = j.contains("memory");
  if (has_memory) {
    mem.clear();
    for (const auto& m : j["memory"]) mem.push_back(m.get<std::string>());
    if (mem.empty()) throw ModelError("empty memory list");
  }
  auto mem_index = [&](const std::string& n) {
    auto it = std::find(mem.begin(), mem.end(), n);
    if (it == mem.end()) throw ModelError("unknown memory state '" + n + "'");
    return static_cast<int>(it - mem.begin());
  };
  FiniteStrategy f;
  f.memory = static_cast<int>(mem.size());
  f.num_states = g.num_states();
  f.init = j.contains("init") ? mem_index(j["init"].get<std::string>()) : 0;
  f.update.assign(static_cast<std::size_t>(f.memory) * f.num_states, 0);
  f.output.assign(static_cast<std::size_t>(f.memory) * f.num_states, 0);
  for (int m = 0; m < f.memory; ++m) {
    const nlohmann::json& out = has_memory ? j["output"].value(mem[m], nlohmann::json()) : j["output"];
    for (int s = 0; s < g.num_states(); ++s) {
      require_entry(out, g.states[s], "output");
      f.output[m * f.num_states + s] = g.action_index(out[g.states[s]].get<std::string>());
      if (has_memory && f.memory > 1) {
        if (!j.contains("update")) throw ModelError("strategy with memory needs an 'update' table");
        const nlohmann::json& up = j["update"].value(mem[m], nlohmann::json());
        require_entry(up, g.states[s], "update");
        f.update[m * f.num_states + s] = mem_index(up[g.states[s]].get<std::string>());
      }
    }
  }
  return f;
}

}  // namespace detail

// Assignment document: placeholder name -> {memory?, init?, update?, output}.
// Names of model agents denote agents, every other name a variable.
inline FiniteAssignment load_assignment(const Cgs& g, const std::string& document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed assignment document: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("assignment document must be a JSON object");
  FiniteAssignment out;
  auto ags = g.agent_set();
  for (const auto& [name, j] : doc.items()) {
    Placeholder p = ags.count(name) ? Placeholder::agent(name) : Placeholder::variable(name);
    try {
      out[p] = detail::parse_strategy(g, j);
    } catch (const nlohmann::json::exception& e) {
      throw ModelError("malformed strategy for '" + name + "': " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plays.

// Ultimately periodic play: prefix followed by the cycle repeated forever.
// Position 0 always belongs to the prefix.
struct Lasso {
  std::vector<int> prefix;
  std::vector<int> cycle;

  std::size_t size() const { return prefix.size() + cycle.size(); }
  int at(std::size_t i) const {
    if (i < prefix.size()) return prefix[i];
    return cycle[(i - prefix.size()) % cycle.size()];
  }
};

// `profile[i]` is the strategy of agent i.
inline Lasso induced_play(const Cgs& g, int start, const std::vector<FiniteStrategy>& profile) {
  if (static_cast<int>(profile.size()) != g.num_agents()) throw UsageError("profile must cover every agent");
  std::vector<int> cfg(profile.size() + 1);
  cfg[0] = start;
  for (std::size_t i = 0; i < profile.size(); ++i) cfg[i + 1] = profile[i].init;
  std::map<std::vector<int>, std::size_t> first_seen;
  std::vector<int> states;
  std::vector<int> acts(profile.size());
  for (std::size_t pos = 0;; ++pos) {
    if (pos > 0) {
      auto [it, fresh] = first_seen.emplace(cfg, pos);
      if (!fresh) {
        std::size_t i = it->second;
        Lasso l;
        l.prefix.assign(states.begin(), states.begin() + static_cast<long>(i));
        l.cycle.assign(states.begin() + static_cast<long>(i), states.end());
        return l;
      }
    }
    states.push_back(cfg[0]);
    int s = cfg[0];
    for (std::size_t i = 0; i < profile.size(); ++i) {
      acts[i] = profile[i].action(cfg[i + 1], s);
      cfg[i + 1] = profile[i].next(cfg[i + 1], s);
    }
    cfg[0] = g.step(s, g.decision_index(acts));
  }
}

// Direct step-by-step simulation of the first `steps` states of the play.
inline std::vector<int> simulate_play(const Cgs& g, int start, const std::vector<FiniteStrategy>& profile,
                                      std::size_t steps) {
  std::vector<int> mem(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) mem[i] = profile[i].init;
  std::vector<int> out;
  int s = start;
  std::vector<int> acts(profile.size());
  for (std::size_t k = 0; k < steps; ++k) {
    out.push_back(s);
    for (std::size_t i = 0; i < profile.size(); ++i) {
      acts[i] = profile[i].action(mem[i], s);
      mem[i] = profile[i].next(mem[i], s);
    }
    s = g.step(s, g.decision_index(acts));
  }
  return out;
}

namespace detail {

inline std::vector<bool> eval_positions(const Formula& f, const Lasso& l, const Cgs& g) {
  const std::size_t n = l.size();
  auto succ = [&](std::size_t i) { return i + 1 < n ? i + 1 : l.prefix.size(); };
  std::vector<bool> v(n);
  switch (f.kind()) {
    case NodeKind::Atom:
      for (std::size_t i = 0; i < n; ++i) v[i] = g.holds(l.at(i), f.atom());
      return v;
    case NodeKind::Not: {
      auto a = eval_positions(f.sub(), l, g);
      for (std::size_t i = 0; i < n; ++i) v[i] = !a[i];
      return v;
    }
    case NodeKind::Or: {
      auto a = eval_positions(f.left(), l, g);
      auto b = eval_positions(f.right(), l, g);
      for (std::size_t i = 0; i < n; ++i) v[i] = a[i] || b[i];
      return v;
    }
    case NodeKind::Next: {
      auto a = eval_positions(f.sub(), l, g);
      for (std::size_t i = 0; i < n; ++i) v[i] = a[succ(i)];
      return v;
    }
    case NodeKind::Until: {
      auto a = eval_positions(f.left(), l, g);
      auto b = eval_positions(f.right(), l, g);
      for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t k = n; k-- > 0;) {
          bool nv = b[k] || (a[k] && v[succ(k)]);
          if (nv != v[k]) {
            v[k] = nv;
            changed = true;
          }
        }
      }
      return v;
    }
    case NodeKind::Exists:
    case NodeKind::Bind: throw UsageError("LTL evaluation on a formula with strategic operators");
  }
  return v;
}

}  // namespace detail

inline bool eval_ltl_on_lasso(const Formula& f, const Lasso& l, const Cgs& g) {
  if (!is_temporal_only(f)) throw UsageError("LTL evaluation on a formula with strategic operators");
  return detail::eval_positions(f, l, g)[0];
}

}  // namespace gsl
