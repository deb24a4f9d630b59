#pragma once

// Model checking: compile, build the encoding of the assignment (the
// unwinding of the game for sentences) and decide membership.

#include <map>
#include <string>
#include <vector>

#include "gsl/automata.hpp"
#include "gsl/compiler.hpp"
#include "gsl/error.hpp"
#include "gsl/formula.hpp"
#include "gsl/game.hpp"

namespace gsl {

// Tree of histories from `start`, each node labeled with its last state and
// the actions the assigned strategies prescribe there (one coordinate per
// alphabet coordinate). Nodes are product configurations (state, memories).
inline RegularTree encode_assignment(const Cgs& g, const Alphabet& al, const FiniteAssignment& chi, int start) {
  std::vector<const FiniteStrategy*> strat;
  for (const auto& c : al.coords) {
    const FiniteStrategy* s = nullptr;
    for (const auto& [p, f] : chi)
      if (p.name == c) s = &f;
    if (!s) throw UsageError("no strategy assigned to '" + c + "'");
    strat.push_back(s);
  }
  RegularTree t;
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> work;
  auto node = [&](std::vector<int> cfg) {
    auto [it, fresh] = ids.emplace(cfg, static_cast<int>(t.label.size()));
    if (fresh) {
      t.label.push_back(0);
      t.child.emplace_back(g.num_states(), -1);
      work.push_back(std::move(cfg));
    }
    return it->second;
  };
  std::vector<int> root{start};
  for (const auto* s : strat) root.push_back(s->init);
  t.root = node(root);
  while (!work.empty()) {
    std::vector<int> cfg = std::move(work.back());
    work.pop_back();
    const int id = ids[cfg];
    const int s = cfg[0];
    int f = 0;
    for (int i = static_cast<int>(strat.size()) - 1; i >= 0; --i) f = f * al.num_values + strat[i]->action(cfg[i + 1], s);
    t.label[id] = al.letter(f, s);
    for (int d : g.successors[s]) {
      std::vector<int> next{d};
      for (std::size_t i = 0; i < strat.size(); ++i) next.push_back(strat[i]->next(cfg[i + 1], s));
      int c = node(std::move(next));
      t.child[id][d] = c;
    }
  }
  return t;
}

struct CheckOptions {
  CompileOptions compile;
  std::string emit_dir;
};

struct CheckReport {
  bool holds = false;
  FragmentReport fragment;
  std::vector<StageRecord> stages;
  unsigned nondeterminization_depth = 0;
  unsigned nondeterminization_count = 0;
  std::size_t automaton_states = 0;
  std::size_t game_vertices = 0;
};

inline void check_atoms(const Cgs& g, const Formula& f) {
  std::set<std::string> atoms;
  collect_atoms(f, atoms);
  for (const auto& a : atoms)
    if (std::find(g.atoms.begin(), g.atoms.end(), a) == g.atoms.end())
      throw UsageError("unknown atom '" + a + "'");
}

// Decides G, chi, s0 |= f. Free placeholders of f must be assigned in chi.
inline CheckReport check(const Cgs& g, const Formula& f, const FiniteAssignment& chi = {},
                         const CheckOptions& opt = {}) {
  const auto agents = g.agent_set();
  CheckReport rep;
  rep.fragment = analyze_fragment(f, agents);
  if (!rep.fragment.grades_all_finite) throw UnsupportedGrade();
  check_atoms(g, f);
  for (const auto& p : free_placeholders(f, agents))
    if (!chi.count(p)) throw UsageError("formula is not a sentence: no strategy for '" + p.name + "'");
  Compiler c(g, opt.compile);
  if (!opt.emit_dir.empty()) c.emit_stages_to(opt.emit_dir);
  auto res = c.compile(f);
  rep.stages = c.stages();
  rep.nondeterminization_depth = res.depth;
  rep.nondeterminization_count = c.nondeterminization_count();
  rep.automaton_states = static_cast<std::size_t>(res.automaton.num_states());
  RegularTree t = encode_assignment(g, res.automaton.alphabet, chi, g.initial);
  auto mg = membership_game(res.automaton, t);
  rep.game_vertices = static_cast<std::size_t>(mg.game.size());
  rep.holds = solve_zielonka(mg.game).verifier_wins(mg.initial);
  return rep;
}

inline bool holds(const Cgs& g, const Formula& f, const FiniteAssignment& chi = {}, const CompileOptions& opt = {}) {
  return check(g, f, chi, {opt, {}}).holds;
}

}  // namespace gsl
