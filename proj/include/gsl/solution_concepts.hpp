#pragma once

// Objective-LTL payoffs and the formula generators for winning-strategy
// counting, Nash equilibria, subgame-perfect equilibria and uniqueness.

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsl/error.hpp"
#include "gsl/formula.hpp"
#include "gsl/game.hpp"

namespace gsl {

inline constexpr std::size_t kMaxGoals = 8;

// Bit j of a goal vector index is the truth of goal j (h_{j+1}).
struct ObjectiveTuple {
  std::vector<Formula> goals;
  std::vector<std::int64_t> payoff;  // 2^m entries

  std::size_t m() const { return goals.size(); }
  std::int64_t value(unsigned h) const { return payoff.at(h); }
};

// One tuple per agent, in the model's agent order.
using Objectives = std::vector<ObjectiveTuple>;

inline std::string bits_to_string(unsigned h, std::size_t m) {
  std::string s;
  for (std::size_t j = 0; j < m; ++j) s += (h >> j) & 1u ? '1' : '0';
  return s;
}

inline Objectives load_objectives(const Cgs& g, const std::string& document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("malformed objectives document: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("objectives document must be a JSON object");
  const auto agents = g.agent_set();
  Objectives out(g.agents.size());
  for (const auto& [name, _] : doc.items()) g.agent_index(name);
  for (std::size_t i = 0; i < g.agents.size(); ++i) {
    const std::string& ag = g.agents[i];
    if (!doc.contains(ag)) throw ModelError("no objective for agent '" + ag + "'");
    const auto& o = doc[ag];
    if (!o.is_object() || !o.contains("goals") || !o["goals"].is_array() || !o.contains("payoff") ||
        !o["payoff"].is_object())
      throw ModelError("objective of '" + ag + "' needs 'goals' and 'payoff'");
    for (const auto& gs : o["goals"]) {
      if (!gs.is_string()) throw ModelError("goal formulas must be strings");
      Formula f = parse_formula(gs.get<std::string>(), agents);
      if (!is_temporal_only(f)) throw ModelError("goal of '" + ag + "' has strategic operators");
      out[i].goals.push_back(f);
    }
    const std::size_t m = out[i].goals.size();
    if (m > kMaxGoals) throw ModelError("at most 8 goals per agent");
    out[i].payoff.assign(std::size_t{1} << m, 0);
    std::set<unsigned> seen;
    for (const auto& [key, val] : o["payoff"].items()) {
      if (key.size() != m || key.find_first_not_of("01") != std::string::npos)
        throw ModelError("payoff key '" + key + "' of '" + ag + "' is not a bitstring of length " + std::to_string(m));
      if (!val.is_number_integer()) throw ModelError("payoff values must be integers");
      unsigned h = 0;
      for (std::size_t j = 0; j < m; ++j)
        if (key[j] == '1') h |= 1u << j;
      seen.insert(h);
      out[i].payoff[h] = val.get<std::int64_t>();
    }
    if (seen.size() != out[i].payoff.size()) throw ModelError("payoff table of '" + ag + "' is incomplete");
  }
  return out;
}

// ---------------------------------------------------------------------------

struct PayoffClassification {
  bool win_lose = false;
  bool zero_sum = false;  // checked over all goal-vector combinations (conservative)
};

inline PayoffClassification classify(const Objectives& obj) {
  PayoffClassification c;
  c.win_lose = std::all_of(obj.begin(), obj.end(), [](const ObjectiveTuple& o) {
    return std::all_of(o.payoff.begin(), o.payoff.end(), [](std::int64_t v) { return v == 1 || v == -1; });
  });
  // Odometer over one goal vector per agent.
  std::vector<unsigned> h(obj.size(), 0);
  c.zero_sum = true;
  while (true) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < obj.size(); ++i) sum += obj[i].value(h[i]);
    if (sum != 0) {
      c.zero_sum = false;
      break;
    }
    std::size_t i = 0;
    while (i < h.size() && ++h[i] == obj[i].payoff.size()) h[i++] = 0;
    if (i == h.size()) break;
  }
  return c;
}

inline std::vector<unsigned> gd_set(const std::vector<std::int64_t>& payoff, unsigned h) {
  if (h >= payoff.size()) throw UsageError("goal vector length mismatch");
  std::vector<unsigned> out;
  for (unsigned k = 0; k < payoff.size(); ++k)
    if (payoff[k] >= payoff[h]) out.push_back(k);
  return out;
}

inline Formula eta_formula(const std::vector<Formula>& goals, unsigned h) {
  std::vector<Formula> parts;
  for (std::size_t j = 0; j < goals.size(); ++j) parts.push_back((h >> j) & 1u ? goals[j] : neg(goals[j]));
  return land_all(parts);
}

// Variable names x1.., y1.., z1.. that avoid agent names.
inline std::vector<std::string> profile_variables(const std::string& base, std::size_t n,
                                                  const std::set<std::string>& agents) {
  std::string b = base;
  auto clash = [&](const std::string& s) {
    for (std::size_t i = 1; i <= n; ++i)
      if (agents.count(s + std::to_string(i))) return true;
    return false;
  };
  while (clash(b)) b = "v" + b;
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(b + std::to_string(i));
  return out;
}

// (a1, v1) ... (an, vn) f
inline Formula bind_all(const std::vector<std::string>& agents, const std::vector<std::string>& vars, Formula f) {
  for (std::size_t i = agents.size(); i-- > 0;) f = bind(agents[i], vars[i], f);
  return f;
}

// [[v1]] ... [[vn]] f
inline Formula forall_each(const std::vector<std::string>& vars, Formula f) {
  for (std::size_t i = vars.size(); i-- > 0;) f = forall({vars[i]}, Grade::finite(1), f);
  return f;
}

struct ProfileNames {
  std::vector<std::string> x, y, z;
};

inline ProfileNames profile_names(const Cgs& g) {
  auto ags = g.agent_set();
  return {profile_variables("x", g.agents.size(), ags), profile_variables("y", g.agents.size(), ags),
          profile_variables("z", g.agents.size(), ags)};
}

namespace detail {

inline std::vector<std::string> deviate(const std::vector<std::string>& x, const std::vector<std::string>& y,
                                        std::size_t i) {
  auto v = x;
  v[i] = y[i];
  return v;
}

}  // namespace detail

// [[y1]]...[[yn]] /\_i ((b_i phi_i) -> b phi_i), one goal per agent.
inline Formula ne_formula_winlose(const Cgs& g, const std::vector<Formula>& goals) {
  if (goals.size() != g.agents.size()) throw UsageError("one goal per agent required");
  auto names = profile_names(g);
  std::vector<Formula> conj;
  for (std::size_t i = 0; i < goals.size(); ++i)
    conj.push_back(implies(bind_all(g.agents, detail::deviate(names.x, names.y, i), goals[i]),
                           bind_all(g.agents, names.x, goals[i])));
  return forall_each(names.y, land_all(conj));
}

inline Formula ne_formula_general(const Cgs& g, const Objectives& obj, bool simplify = true) {
  if (obj.size() != g.agents.size()) throw UsageError("one objective tuple per agent required");
  auto names = profile_names(g);
  std::vector<Formula> all, kept;
  for (std::size_t i = 0; i < obj.size(); ++i) {
    auto dev = detail::deviate(names.x, names.y, i);
    for (unsigned h = 0; h < obj[i].payoff.size(); ++h) {
      auto gd = gd_set(obj[i].payoff, h);
      std::vector<Formula> alts;
      for (unsigned k : gd) alts.push_back(bind_all(g.agents, names.x, eta_formula(obj[i].goals, k)));
      Formula c = implies(bind_all(g.agents, dev, eta_formula(obj[i].goals, h)), lor_all(alts));
      all.push_back(c);
      if (gd.size() != obj[i].payoff.size()) kept.push_back(c);
    }
  }
  // Conjuncts whose good set is full hold on every play.
  const auto& use = simplify && !kept.empty() ? kept : all;
  return forall_each(names.y, land_all(use));
}

// True when every agent has one goal with payoff 1 if it holds and -1 otherwise.
inline bool is_single_goal_winlose(const Objectives& obj) {
  return std::all_of(obj.begin(), obj.end(), [](const ObjectiveTuple& o) {
    return o.m() == 1 && o.payoff[0] == -1 && o.payoff[1] == 1;
  });
}

inline Formula ne_formula(const Cgs& g, const Objectives& obj, bool simplify = true) {
  if (is_single_goal_winlose(obj)) {
    std::vector<Formula> goals;
    for (const auto& o : obj) goals.push_back(o.goals[0]);
    return ne_formula_winlose(g, goals);
  }
  return ne_formula_general(g, obj, simplify);
}

// [[z1,...,zn]] (a1,z1)...(an,zn) G ne
inline Formula spe_formula(const Cgs& g, const Formula& ne) {
  auto names = profile_names(g);
  return forall(names.z, Grade::finite(1), bind_all(g.agents, names.z, always(ne)));
}

// <<x>>^>=1 body && !<<x>>^>=2 body
inline Formula uniqueness_formula(const Formula& body, const std::vector<std::string>& xs,
                                  const std::set<std::string>& agents) {
  for (const auto& p : free_placeholders(body, agents))
    if (p.is_agent() || std::find(xs.begin(), xs.end(), p.name) == xs.end())
      throw UsageError("free placeholder '" + p.name + "' of the body is not a profile variable");
  return land(exists(xs, Grade::finite(1), body), neg(exists(xs, Grade::finite(2), body)));
}

// <<x>>^>=k [[y]] b goal && !<<x>>^>=k+1 [[y]] b goal, with b binding the
// protagonist to x and the antagonists to y (or y1, y2, ...).
inline Formula winning_count_formula(const Cgs& g, const std::string& protagonist, const Formula& goal,
                                     std::uint64_t k) {
  g.agent_index(protagonist);
  if (!is_temporal_only(goal)) throw UsageError("goal must be an LTL formula");
  auto ags = g.agent_set();
  std::string x = profile_variables("x", 1, ags)[0];
  x.pop_back();
  std::vector<std::string> antagonists;
  for (const auto& a : g.agents)
    if (a != protagonist) antagonists.push_back(a);
  std::vector<std::string> ys;
  if (antagonists.size() == 1) {
    std::string y = profile_variables("y", 1, ags)[0];
    y.pop_back();
    ys.push_back(y);
  } else {
    ys = profile_variables("y", antagonists.size(), ags);
  }
  std::vector<std::string> order{protagonist};
  std::vector<std::string> vars{x};
  order.insert(order.end(), antagonists.begin(), antagonists.end());
  vars.insert(vars.end(), ys.begin(), ys.end());
  Formula bound = bind_all(order, vars, goal);
  Formula inner = ys.empty() ? bound : forall(ys, Grade::finite(1), bound);
  return land(exists({x}, Grade::finite(k), inner), neg(exists({x}, Grade::finite(k + 1), inner)));
}

}  // namespace gsl
