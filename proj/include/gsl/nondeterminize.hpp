#pragma once

// Alternation removal for parity tree automata.
//
// A run of the alternating automaton is guessed positionally: at every node
// the nondeterministic automaton picks, for each live state, a minimal model
// of its transition condition. Along each branch the picked moves form a word
// over "local strategies"; a Büchi word automaton guesses a trace with odd
// least-recurring priority, a Safra construction determinizes it into a
// parity automaton, and the complement of that automaton is run along the
// branches.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gsl/automata.hpp"
#include "gsl/error.hpp"

namespace gsl {

inline constexpr std::size_t kDefaultStateBudget = 1000000;

struct NondeterminizeStats {
  std::size_t safra_trees = 0;
  std::size_t states = 0;
};

namespace detail {

struct VecHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = v.size();
    for (int x : v) h = h * 1000003u ^ static_cast<std::size_t>(x + 1);
    return h;
  }
};

// Safra trees: nodes in age order (index 0 is the root, parents precede
// children); labels are sorted sets of Büchi states.
struct SafraTree {
  std::vector<int> parent;
  std::vector<std::vector<int>> label;

  std::vector<int> key() const {
    std::vector<int> k;
    for (std::size_t i = 0; i < parent.size(); ++i) {
      k.push_back(parent[i]);
      k.push_back(static_cast<int>(label[i].size()));
      k.insert(k.end(), label[i].begin(), label[i].end());
    }
    return k;
  }
};

class Nondeterminizer {
 public:
  Nondeterminizer(const Apt& a, std::size_t budget, bool encodings)
      : a_(a), budget_(budget), encodings_(encodings), out_(a.alphabet) {
    for (int p : a.priority)
      if (p % 2 == 1 && std::find(odd_.begin(), odd_.end(), p) == odd_.end()) odd_.push_back(p);
    std::sort(odd_.begin(), odd_.end());
    width_ = 1 + static_cast<int>(odd_.size());
    none_ = 2 * a.num_states() * width_ + 3;
  }

  Npt run(NondeterminizeStats* stats) {
    top_ = out_.add_state(0);
    for (int l = 0; l < out_.num_letters(); ++l) {
      std::vector<PosBoolPool::Id> xs;
      for (int d : out_.alphabet.directions(l)) xs.push_back(out_.pool.atom(d, top_));
      out_.set_transition(top_, l, out_.pool.conj(xs));
    }
    SafraTree t0;
    t0.parent.push_back(-1);
    std::vector<int> init{nbw(a_.initial, 0)};
    if (a_.priority[a_.initial] % 2 == 1) init.push_back(nbw(a_.initial, odd_index(a_.priority[a_.initial]) + 1));
    std::sort(init.begin(), init.end());
    t0.label.push_back(init);
    out_.initial = state_for(tree_id(std::move(t0)), none_, -1);
    for (std::size_t k = 0; k < work_.size(); ++k) expand(work_[k]);
    if (stats) {
      stats->safra_trees = trees_.size();
      stats->states = static_cast<std::size_t>(out_.num_states());
    }
    return Npt(std::move(out_));
  }

 private:
  int nbw(int q, int c) const { return q * width_ + c; }
  int nbw_state(int x) const { return x / width_; }
  int nbw_commit(int x) const { return x % width_; }
  int odd_index(int p) const {
    return static_cast<int>(std::lower_bound(odd_.begin(), odd_.end(), p) - odd_.begin());
  }
  bool accepting(int x) const {
    int c = nbw_commit(x);
    return c > 0 && a_.priority[nbw_state(x)] == odd_[c - 1];
  }

  int tree_id(SafraTree t) {
    auto k = t.key();
    auto it = tree_index_.find(k);
    if (it != tree_index_.end()) return it->second;
    int id = static_cast<int>(trees_.size());
    trees_.push_back(std::move(t));
    tree_index_.emplace(std::move(k), id);
    return id;
  }

  // NPT state for (tree, parity-automaton priority of the step into it, state
  // component of the letters it will read or -1 for any).
  int state_for(int tree, int dpw_priority, int component) {
    auto [it, fresh] = states_.emplace(std::array<int, 3>{tree, dpw_priority, component}, 0);
    if (fresh) {
      if (static_cast<std::size_t>(out_.num_states()) >= budget_)
        throw ResourceError("state budget exceeded during alternation removal");
      it->second = out_.add_state(dpw_priority + 1);
      work_.push_back(it->second);
      tree_of_.resize(out_.num_states(), -1);
      tree_of_[it->second] = tree;
      component_of_.resize(out_.num_states(), -1);
      component_of_[it->second] = component;
    }
    return it->second;
  }

  // One Safra step. `moves[q]` lists successor automaton states of q in the
  // chosen direction. Returns (tree id or -1 for the empty tree, priority).
  std::pair<int, int> step(int tree, const std::vector<std::vector<int>>& moves) {
    const SafraTree& t = trees_[tree];
    const int n0 = static_cast<int>(t.parent.size());
    std::vector<int> parent = t.parent;
    std::vector<std::vector<int>> label = t.label;
    // Branch on accepting states.
    for (int v = 0; v < n0; ++v) {
      std::vector<int> acc;
      for (int x : label[v])
        if (accepting(x)) acc.push_back(x);
      if (!acc.empty()) {
        parent.push_back(v);
        label.push_back(std::move(acc));
      }
    }
    // Successors.
    for (auto& lab : label) {
      std::vector<int> next;
      for (int x : lab) {
        int q = nbw_state(x), c = nbw_commit(x);
        for (int r : moves[q]) {
          int p = a_.priority[r];
          if (c == 0) {
            next.push_back(nbw(r, 0));
            if (p % 2 == 1) next.push_back(nbw(r, odd_index(p) + 1));
          } else if (p >= odd_[c - 1]) {
            next.push_back(nbw(r, c));
          }
        }
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      lab = std::move(next);
    }
    const int n = static_cast<int>(parent.size());
    std::vector<std::vector<int>> children(n);
    for (int v = 1; v < n; ++v) children[parent[v]].push_back(v);
    // Horizontal merge: older siblings (and their subtrees) claim states first.
    std::vector<int> blocked;
    horizontal(0, blocked, label, children);
    // Removal of empty nodes and vertical merge.
    std::vector<bool> alive(n, true);
    int best = none_;
    auto kill_subtree = [&](int v, auto&& self) -> void {
      alive[v] = false;
      if (v < n0) best = std::min(best, 2 * v + 1);
      for (int c : children[v]) self(c, self);
    };
    for (int v = 0; v < n; ++v)
      if (alive[v] && label[v].empty()) kill_subtree(v, kill_subtree);
    for (int v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      std::vector<int> uni;
      bool any = false;
      for (int c : children[v]) {
        if (!alive[c]) continue;
        any = true;
        uni.insert(uni.end(), label[c].begin(), label[c].end());
      }
      if (!any) continue;
      std::sort(uni.begin(), uni.end());
      uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
      if (uni == label[v]) {
        if (v < n0) best = std::min(best, 2 * v + 2);
        for (int c : children[v])
          if (alive[c]) kill_subtree(c, kill_subtree);
      }
    }
    if (!alive[0]) return {-1, best};
    SafraTree r;
    std::vector<int> renum(n, -1);
    for (int v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      renum[v] = static_cast<int>(r.parent.size());
      r.parent.push_back(v == 0 ? -1 : renum[parent[v]]);
      r.label.push_back(std::move(label[v]));
    }
    return {tree_id(std::move(r)), best};
  }

  static void horizontal(int v, std::vector<int>& blocked, std::vector<std::vector<int>>& label,
                         const std::vector<std::vector<int>>& children) {
    std::vector<int> kept;
    std::set_difference(label[v].begin(), label[v].end(), blocked.begin(), blocked.end(), std::back_inserter(kept));
    label[v] = std::move(kept);
    std::vector<int> local = blocked;
    for (int c : children[v]) {
      horizontal(c, local, label, children);
      std::vector<int> merged;
      std::set_union(local.begin(), local.end(), label[c].begin(), label[c].end(), std::back_inserter(merged));
      local = std::move(merged);
    }
  }

  void expand(int state) {
    const int tree = tree_of_[state];
    const int component = component_of_[state];
    std::vector<int> live;
    for (int x : trees_[tree].label[0])
      if (nbw_commit(x) == 0) live.push_back(nbw_state(x));
    for (int l = 0; l < out_.num_letters(); ++l) {
      if (component >= 0 && out_.alphabet.state_of(l) != component) continue;
      std::vector<int> key{tree, out_.alphabet.state_of(l)};
      for (int q : live) key.push_back(static_cast<int>(a_.transition(q, l)));
      auto it = memo_.find(key);
      if (it != memo_.end()) {
        out_.set_transition(state, l, it->second);
        continue;
      }
      auto x = transition(tree, live, l);
      memo_.emplace(std::move(key), x);
      out_.set_transition(state, l, x);
    }
  }

  PosBoolPool::Id transition(int tree, const std::vector<int>& live, int l) {
    const auto& dirs = a_.alphabet.directions(l);
    auto allowed = [&](const Move& m) { return std::find(dirs.begin(), dirs.end(), m.dir) != dirs.end(); };
    std::vector<std::vector<std::vector<Move>>> models;
    for (int q : live) {
      models.push_back(a_.pool.minimal_models(a_.transition(q, l), allowed));
      if (models.back().empty()) return PosBoolPool::kFalse;
    }
    std::vector<PosBoolPool::Id> disjuncts;
    std::vector<std::size_t> pick(live.size(), 0);
    std::vector<std::vector<int>> moves(a_.num_states());
    while (true) {
      std::vector<PosBoolPool::Id> conj;
      for (int d : dirs) {
        for (int q : live) moves[q].clear();
        for (std::size_t i = 0; i < live.size(); ++i)
          for (const Move& m : models[i][pick[i]])
            if (m.dir == d) moves[live[i]].push_back(m.state);
        std::vector<int> mkey{tree, encodings_ ? d : -1};
        for (int q : live) {
          auto& mv = moves[q];
          std::sort(mv.begin(), mv.end());
          mv.erase(std::unique(mv.begin(), mv.end()), mv.end());
          mkey.push_back(static_cast<int>(mv.size()));
          mkey.insert(mkey.end(), mv.begin(), mv.end());
        }
        int target;
        auto it = step_memo_.find(mkey);
        if (it != step_memo_.end()) {
          target = it->second;
        } else {
          auto [t, p] = step(tree, moves);
          target = t < 0 ? top_ : state_for(t, p, encodings_ ? d : -1);
          step_memo_.emplace(std::move(mkey), target);
        }
        conj.push_back(out_.pool.atom(d, target));
      }
      disjuncts.push_back(out_.pool.conj(conj));
      std::size_t i = 0;
      while (i < pick.size() && ++pick[i] == models[i].size()) pick[i++] = 0;
      if (i == pick.size()) break;
      if (disjuncts.size() > budget_) throw ResourceError("state budget exceeded during alternation removal");
    }
    return out_.pool.disj(disjuncts);
  }

  const Apt& a_;
  std::size_t budget_;
  bool encodings_;
  Apt out_;
  std::vector<int> odd_;
  int width_ = 1;
  int none_ = 1;
  int top_ = 0;
  std::vector<SafraTree> trees_;
  std::unordered_map<std::vector<int>, int, VecHash> tree_index_;
  std::map<std::array<int, 3>, int> states_;
  std::vector<int> tree_of_;
  std::vector<int> component_of_;
  std::vector<int> work_;
  std::unordered_map<std::vector<int>, PosBoolPool::Id, VecHash> memo_;
  std::unordered_map<std::vector<int>, int, VecHash> step_memo_;
};

}  // namespace detail

// With `encodings` set, the result is only guaranteed to agree with `a` on
// trees whose child in direction d carries state component d (encodings of
// assignments); states then track the component they will read, and letters
// of any other component are rejected.
inline Npt nondeterminize(const Apt& a, std::size_t budget = kDefaultStateBudget,
                          NondeterminizeStats* stats = nullptr, bool encodings = false) {
  if (is_npt_shaped(a)) {
    if (stats) *stats = {0, static_cast<std::size_t>(a.num_states())};
    return Npt(a);
  }
  if (encodings && a.alphabet.num_directions != a.alphabet.num_states)
    throw UsageError("directions must be state components");
  return detail::Nondeterminizer(a, budget, encodings).run(stats);
}

}  // namespace gsl
