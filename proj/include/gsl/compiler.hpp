#pragma once

// Compilation of formulas with finite grades into alternating parity tree
// automata over encodings of assignments: trees whose nodes are the histories
// of the game, labeled with the current state and the action each free
// placeholder prescribes there.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "gsl/automata.hpp"
#include "gsl/error.hpp"
#include "gsl/formula.hpp"
#include "gsl/game.hpp"
#include "gsl/nondeterminize.hpp"

namespace gsl {

struct CompileOptions {
  bool block = true;          // one alternation removal per maximal quantifier block
  bool distinctness = true;   // conjoin the distinctness automaton
  bool short_circuit = true;  // skip the vacuous distinctness conjunct when g <= 1
  bool reduce = true;
  std::size_t budget = kDefaultStateBudget;
};

struct StageRecord {
  std::string step;
  unsigned depth = 0;  // alternation-removal nesting of the produced automaton
  std::size_t states_in = 0;
  std::size_t states_out = 0;
  double millis = 0;
};

class Compiler {
 public:
  Compiler(const Cgs& g, CompileOptions opt = {}) : g_(g), opt_(opt), agents_(g.agent_set()) {}

  // Dump every produced automaton of the quantifier pipeline into `dir`.
  void emit_stages_to(std::string dir) { emit_dir_ = std::move(dir); }

  const std::vector<StageRecord>& stages() const { return stages_; }
  unsigned nondeterminization_count() const { return nondet_count_; }

  // Alphabet of automata for formulas with free placeholders `free`.
  Alphabet alphabet_for(const PlaceholderSet& free) const {
    std::vector<std::string> coords;
    for (const auto& p : free) coords.push_back(p.name);
    return alphabet_with(std::move(coords));
  }

  Alphabet alphabet_with(std::vector<std::string> coords) const {
    Alphabet a;
    a.coords = std::move(coords);
    a.num_values = g_.num_actions();
    a.num_states = g_.num_states();
    a.num_directions = g_.num_states();
    a.dirs = g_.successors;
    return a;
  }

  struct Result {
    Apt automaton;
    unsigned depth = 0;  // nesting of alternation removals
  };

  Result compile(const Formula& f) {
    if (!all_grades_finite(f)) throw UnsupportedGrade();
    std::string key = print_formula(f);
    auto it = cache_.find(key);
    if (it != cache_.end()) return *it->second;
    Result r = compile_node(f);
    cache_.emplace(key, std::make_shared<Result>(r));
    return r;
  }

 private:
  using Id = PosBoolPool::Id;

  Apt maybe_reduce(Apt a) { return opt_.reduce ? reduce(a) : a; }

  // Decision index of the agents' coordinates in valuation f.
  std::vector<int> agent_coords(const Alphabet& al) const {
    std::vector<int> out;
    for (const auto& ag : g_.agents) {
      int i = al.coord_index(ag);
      if (i < 0) throw UsageError("agent '" + ag + "' not in alphabet");
      out.push_back(i);
    }
    return out;
  }
  int play_direction(const Alphabet& al, const std::vector<int>& ac, int letter) const {
    int f = al.valuation_of(letter);
    std::vector<int> acts;
    for (int i : ac) acts.push_back(al.value(f, i));
    return g_.step(al.state_of(letter), g_.decision_index(acts));
  }

  Apt lift(const Formula& f, const Alphabet& target) {
    Apt a = compile(f).automaton;
    if (a.alphabet == target) return a;
    return relabel(a, target, coordinate_map(a.alphabet, target));
  }

  Result compile_node(const Formula& f) {
    const Alphabet al = alphabet_for(free_placeholders(f, agents_));
    switch (f.kind()) {
      case NodeKind::Atom: {
        Apt a(al);
        a.initial = a.add_state(0);
        for (int l = 0; l < a.num_letters(); ++l)
          a.set_transition(0, l, g_.holds(al.state_of(l), f.atom()) ? PosBoolPool::kTrue : PosBoolPool::kFalse);
        return {a, 0};
      }
      case NodeKind::Not: {
        auto r = compile(f.sub());
        return {dualize(r.automaton), r.depth};
      }
      case NodeKind::Or: {
        unsigned d = std::max(compile(f.left()).depth, compile(f.right()).depth);
        return {maybe_reduce(disjoin(lift(f.left(), al), lift(f.right(), al))), d};
      }
      case NodeKind::Next: {
        unsigned d = compile(f.sub()).depth;
        Apt inner = lift(f.sub(), al);
        Apt a(al);
        int off = detail::append_states(a, inner);
        int q = a.add_state(0);
        auto ac = agent_coords(al);
        for (int l = 0; l < a.num_letters(); ++l) a.set_transition(q, l, a.pool.atom(play_direction(al, ac, l), inner.initial + off));
        a.initial = q;
        return {maybe_reduce(std::move(a)), d};
      }
      case NodeKind::Until: {
        unsigned d = std::max(compile(f.left()).depth, compile(f.right()).depth);
        Apt a1 = lift(f.left(), al);
        Apt a2 = lift(f.right(), al);
        Apt a(al);
        int o1 = detail::append_states(a, a1);
        int o2 = detail::append_states(a, a2);
        int u = a.add_state(1);
        auto ac = agent_coords(al);
        for (int l = 0; l < a.num_letters(); ++l) {
          Id keep = a.pool.land(a.transition(a1.initial + o1, l), a.pool.atom(play_direction(al, ac, l), u));
          a.set_transition(u, l, a.pool.lor(a.transition(a2.initial + o2, l), keep));
        }
        a.initial = u;
        return {maybe_reduce(std::move(a)), d};
      }
      case NodeKind::Bind: {
        auto r = compile(f.sub());
        if (r.automaton.alphabet == al) return r;
        return {relabel(r.automaton, al, coordinate_map(r.automaton.alphabet, al, {{f.agent(), f.var()}})), r.depth};
      }
      case NodeKind::Exists: return compile_quantifiers(f, al);
    }
    throw UsageError("unknown formula node");
  }

  struct Level {
    std::vector<std::string> vars;
    std::uint64_t grade;
  };

  static std::string path_name(const std::vector<int>& path) {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "." : "") + std::to_string(path[i]);
    return s;
  }

  Result compile_quantifiers(const Formula& f, const Alphabet& al) {
    // Collect the block.
    std::vector<Level> levels;
    Formula body;
    if (opt_.block) {
      auto chain = quantifier_chain(f);
      std::size_t k = 0;
      while (k < chain.links.size() && (k == 0 || !chain.links[k].switches)) {
        const Formula& n = chain.links[k].node;
        levels.push_back({n.vars(), n.grade().n});
        body = n.sub();
        ++k;
      }
    } else {
      levels.push_back({f.vars(), f.grade().n});
      body = f.sub();
    }
    // A level with grade 0 is satisfied vacuously.
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (levels[i].grade == 0) {
        if (i == 0) return {accept_all(al), 0};
        levels.resize(i);
        body = top();
        break;
      }
    while (body.kind() == NodeKind::Not && body.sub().kind() == NodeKind::Not) body = body.sub().sub();

    auto body_res = compile(body);
    const Apt& body_apt = body_res.automaton;

    // Enumerate copy paths level by level.
    std::vector<std::vector<std::vector<int>>> paths(levels.size() + 1);
    paths[0].push_back({});
    for (std::size_t i = 0; i < levels.size(); ++i)
      for (const auto& p : paths[i])
        for (std::uint64_t j = 1; j <= levels[i].grade; ++j) {
          auto q = p;
          q.push_back(static_cast<int>(j));
          paths[i + 1].push_back(std::move(q));
        }
    auto grid_name = [](const std::string& v, const std::vector<int>& path) { return v + "#" + path_name(path); };

    std::vector<std::string> coords = al.coords;
    std::vector<std::string> grid;
    for (std::size_t i = 0; i < levels.size(); ++i)
      for (const auto& p : paths[i + 1])
        for (const auto& v : levels[i].vars) grid.push_back(grid_name(v, p));
    coords.insert(coords.end(), grid.begin(), grid.end());
    const Alphabet wide = alphabet_with(coords);

    auto t0 = std::chrono::steady_clock::now();
    std::vector<Apt> parts;
    for (const auto& leaf : paths.back()) {
      std::map<std::string, std::string> ren;
      for (std::size_t i = 0; i < levels.size(); ++i) {
        std::vector<int> prefix(leaf.begin(), leaf.begin() + static_cast<long>(i) + 1);
        for (const auto& v : levels[i].vars) ren[v] = grid_name(v, prefix);
      }
      parts.push_back(relabel(body_apt, wide, coordinate_map(body_apt.alphabet, wide, ren)));
    }
    bool any_pairs = false;
    if (opt_.distinctness) {
      std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;
      for (std::size_t i = 0; i < levels.size(); ++i)
        for (const auto& parent : paths[i])
          for (std::uint64_t a = 1; a <= levels[i].grade; ++a)
            for (std::uint64_t b = a + 1; b <= levels[i].grade; ++b) {
              std::pair<std::vector<int>, std::vector<int>> pr;
              auto pa = parent, pb = parent;
              pa.push_back(static_cast<int>(a));
              pb.push_back(static_cast<int>(b));
              for (const auto& v : levels[i].vars) {
                pr.first.push_back(wide.coord_index(grid_name(v, pa)));
                pr.second.push_back(wide.coord_index(grid_name(v, pb)));
              }
              pairs.push_back(std::move(pr));
            }
      any_pairs = !pairs.empty();
      if (any_pairs || !opt_.short_circuit) parts.push_back(distinctness_apt(wide, pairs));
    }
    std::vector<const Apt*> ptrs;
    for (const auto& p : parts) ptrs.push_back(&p);
    Apt conj = parts.size() == 1 ? parts[0] : conjoin_all(ptrs);
    std::size_t conj_states = static_cast<std::size_t>(conj.num_states());
    conj = maybe_reduce(std::move(conj));
    const unsigned depth = body_res.depth + 1;
    record("conjoin copies=" + std::to_string(paths.back().size()) + (any_pairs ? " +distinct" : ""), depth,
           conj_states, conj.num_states(), t0);
    emit("conjoin", conj);

    t0 = std::chrono::steady_clock::now();
    NondeterminizeStats st;
    Npt n = nondeterminize(conj, opt_.budget, &st, true);
    ++nondet_count_;
    record("nondeterminize", depth, conj.num_states(), n.apt().num_states(), t0);
    emit("nondeterminize", n.apt());

    t0 = std::chrono::steady_clock::now();
    Npt p = project(n, grid);
    Apt out = maybe_reduce(p.apt());
    record("project", depth, p.apt().num_states(), out.num_states(), t0);
    emit("project", out);
    return {std::move(out), depth};
  }

  void record(std::string step, unsigned depth, std::size_t in, std::size_t out,
              std::chrono::steady_clock::time_point t0) {
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    stages_.push_back({std::move(step), depth, in, out, ms});
  }

  void emit(const std::string& what, const Apt& a) {
    if (emit_dir_.empty()) return;
    std::filesystem::create_directories(emit_dir_);
    char name[64];
    std::snprintf(name, sizeof name, "stage%03zu_%s.txt", ++emitted_, what.c_str());
    std::ofstream out(std::filesystem::path(emit_dir_) / name);
    emit_automaton(out, a);
  }

  const Cgs& g_;
  CompileOptions opt_;
  std::set<std::string> agents_;
  std::unordered_map<std::string, std::shared_ptr<Result>> cache_;
  std::vector<StageRecord> stages_;
  unsigned nondet_count_ = 0;
  std::string emit_dir_;
  std::size_t emitted_ = 0;
};

}  // namespace gsl
