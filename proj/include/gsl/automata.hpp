#pragma once

// Alternating parity tree automata over letters (valuation, state) with
// per-letter available directions, and the Boolean, relabeling, projection
// and distinctness constructions on them.

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gsl/error.hpp"
#include "gsl/parity_game.hpp"
#include "gsl/posbool.hpp"

namespace gsl {

// Letters are pairs (f, s): f is a valuation of `coords` into
// {0..num_values-1} (coordinate i is digit i, least significant first) and s
// a state component that also fixes the directions available at the node.
struct Alphabet {
  std::vector<std::string> coords;
  int num_values = 1;
  int num_states = 1;
  int num_directions = 1;
  std::vector<std::vector<int>> dirs;  // per state component

  int num_valuations() const {
    int n = 1;
    for (std::size_t i = 0; i < coords.size(); ++i) n *= num_values;
    return n;
  }
  int num_letters() const { return num_valuations() * num_states; }
  int letter(int f, int s) const { return f * num_states + s; }
  int valuation_of(int letter) const { return letter / num_states; }
  int state_of(int letter) const { return letter % num_states; }
  int value(int f, int coord) const {
    for (int i = 0; i < coord; ++i) f /= num_values;
    return f % num_values;
  }
  int coord_index(const std::string& name) const {
    auto it = std::find(coords.begin(), coords.end(), name);
    return it == coords.end() ? -1 : static_cast<int>(it - coords.begin());
  }
  const std::vector<int>& directions(int letter) const { return dirs[state_of(letter)]; }

  // Unstructured alphabet: `letters` plain letters, every direction available.
  static Alphabet plain(int letters, int directions) {
    Alphabet a;
    a.num_states = letters;
    a.num_directions = directions;
    std::vector<int> all(directions);
    for (int d = 0; d < directions; ++d) all[d] = d;
    a.dirs.assign(letters, all);
    return a;
  }

  bool operator==(const Alphabet&) const = default;
};

struct Apt {
  Alphabet alphabet;
  PosBoolPool pool;
  int initial = 0;
  std::vector<int> priority;
  std::vector<PosBoolPool::Id> delta;  // q * num_letters + letter

  int num_states() const { return static_cast<int>(priority.size()); }
  int num_letters() const { return alphabet.num_letters(); }
  PosBoolPool::Id transition(int q, int letter) const {
    return delta[static_cast<std::size_t>(q) * num_letters() + letter];
  }
  void set_transition(int q, int letter, PosBoolPool::Id x) {
    delta[static_cast<std::size_t>(q) * num_letters() + letter] = x;
  }
  int add_state(int prio) {
    priority.push_back(prio);
    delta.resize(delta.size() + num_letters(), PosBoolPool::kFalse);
    return num_states() - 1;
  }
  int num_priorities() const {
    std::set<int> s(priority.begin(), priority.end());
    return static_cast<int>(s.size());
  }

  explicit Apt(Alphabet a = Alphabet()) : alphabet(std::move(a)) {}
};

// Tree in which every disjunct of every transition sends exactly one copy in
// each available direction.
inline bool is_npt_shaped(const Apt& a) {
  using Op = PosBoolPool::Op;
  for (int q = 0; q < a.num_states(); ++q)
    for (int l = 0; l < a.num_letters(); ++l) {
      auto x = a.transition(q, l);
      const auto& dirs = a.alphabet.directions(l);
      if (x == PosBoolPool::kFalse) continue;
      std::vector<PosBoolPool::Id> disjuncts;
      if (a.pool.op(x) == Op::Or) disjuncts = a.pool.args(x);
      else disjuncts.push_back(x);
      for (auto c : disjuncts) {
        std::vector<int> seen;
        if (a.pool.op(c) == Op::Atom) {
          seen.push_back(a.pool.move(c).dir);
        } else if (a.pool.op(c) == Op::And) {
          for (auto y : a.pool.args(c)) {
            if (a.pool.op(y) != Op::Atom) return false;
            seen.push_back(a.pool.move(y).dir);
          }
        } else if (!(a.pool.op(c) == Op::True && dirs.empty())) {
          return false;
        }
        std::sort(seen.begin(), seen.end());
        if (seen != dirs) return false;
      }
    }
  return true;
}

class Npt {
 public:
  explicit Npt(Apt a) : apt_(std::move(a)) {
    if (!is_npt_shaped(apt_)) throw UsageError("automaton is not nondeterministic");
  }
  const Apt& apt() const { return apt_; }

 private:
  Apt apt_;
};

// ---------------------------------------------------------------------------
// Basic automata and Boolean operations.

inline Apt constant_apt(const Alphabet& al, bool accept) {
  Apt a(al);
  a.initial = a.add_state(0);
  for (int l = 0; l < a.num_letters(); ++l) {
    if (!accept) continue;
    std::vector<PosBoolPool::Id> xs;
    for (int d : al.directions(l)) xs.push_back(a.pool.atom(d, 0));
    a.set_transition(0, l, a.pool.conj(xs));
  }
  return a;
}
inline Apt accept_all(const Alphabet& al) { return constant_apt(al, true); }
inline Apt reject_all(const Alphabet& al) { return constant_apt(al, false); }

inline Apt dualize(const Apt& a) {
  Apt r(a.alphabet);
  r.initial = a.initial;
  for (int p : a.priority) r.add_state(p + 1);
  std::unordered_map<PosBoolPool::Id, PosBoolPool::Id> memo;
  for (int q = 0; q < a.num_states(); ++q)
    for (int l = 0; l < a.num_letters(); ++l) r.set_transition(q, l, r.pool.dual(a.pool, a.transition(q, l), memo));
  return r;
}

namespace detail {

// Appends the states of `b` to `r` (offset by r's current size); returns the offset.
inline int append_states(Apt& r, const Apt& b) {
  const int off = r.num_states();
  for (int p : b.priority) r.add_state(p);
  std::unordered_map<PosBoolPool::Id, PosBoolPool::Id> memo;
  auto shift = [&](const Move& m) { return r.pool.atom(m.dir, m.state + off); };
  for (int q = 0; q < b.num_states(); ++q)
    for (int l = 0; l < b.num_letters(); ++l)
      r.set_transition(q + off, l, r.pool.import(b.pool, b.transition(q, l), shift, memo));
  return off;
}

inline Apt combine(const std::vector<const Apt*>& parts, bool conjunctive) {
  if (parts.empty()) throw UsageError("empty combination");
  for (const Apt* p : parts)
    if (!(p->alphabet == parts[0]->alphabet)) throw UsageError("alphabet mismatch");
  Apt r(parts[0]->alphabet);
  std::vector<int> inits;
  for (const Apt* p : parts) inits.push_back(append_states(r, *p) + p->initial);
  r.initial = r.add_state(0);
  for (int l = 0; l < r.num_letters(); ++l) {
    std::vector<PosBoolPool::Id> xs;
    for (int q : inits) xs.push_back(r.transition(q, l));
    r.set_transition(r.initial, l, conjunctive ? r.pool.conj(xs) : r.pool.disj(xs));
  }
  return r;
}

}  // namespace detail

inline Apt conjoin(const Apt& a, const Apt& b) { return detail::combine({&a, &b}, true); }
inline Apt disjoin(const Apt& a, const Apt& b) { return detail::combine({&a, &b}, false); }
inline Apt conjoin_all(const std::vector<const Apt*>& parts) { return detail::combine(parts, true); }

// delta'(q, l') = delta(q, h(l')). Directions of `target` must match.
inline Apt relabel(const Apt& a, const Alphabet& target, const std::function<int(int)>& h) {
  if (target.num_directions != a.alphabet.num_directions) throw UsageError("direction mismatch in relabel");
  Apt r(target);
  r.pool = a.pool;
  r.initial = a.initial;
  for (int p : a.priority) r.add_state(p);
  for (int q = 0; q < a.num_states(); ++q)
    for (int l = 0; l < r.num_letters(); ++l) r.set_transition(q, l, a.transition(q, h(l)));
  return r;
}

// Letter map from `target` to `source` where every source coordinate is read
// from the target coordinate named by `rename` (identity by default).
inline std::function<int(int)> coordinate_map(const Alphabet& source, const Alphabet& target,
                                              const std::map<std::string, std::string>& rename = {}) {
  if (source.num_values != target.num_values || source.num_states != target.num_states)
    throw UsageError("incompatible alphabets");
  std::vector<int> from;
  for (const auto& c : source.coords) {
    auto it = rename.find(c);
    const std::string& name = it == rename.end() ? c : it->second;
    int i = target.coord_index(name);
    if (i < 0) throw UsageError("coordinate '" + name + "' missing from target alphabet");
    from.push_back(i);
  }
  std::vector<int> table(target.num_letters());
  for (int l = 0; l < target.num_letters(); ++l) {
    int f = target.valuation_of(l);
    int g = 0;
    for (int i = static_cast<int>(from.size()) - 1; i >= 0; --i) g = g * source.num_values + target.value(f, from[i]);
    table[l] = source.letter(g, target.state_of(l));
  }
  return [table](int l) { return table[l]; };
}

// Accepts iff for every listed pair of coordinate tuples some node of the
// tree has a valuation that differs between the two tuples.
inline Apt distinctness_apt(const Alphabet& al, const std::vector<std::pair<std::vector<int>, std::vector<int>>>& pairs) {
  if (pairs.empty()) return accept_all(al);
  Apt a(al);
  std::vector<int> walkers;
  for (std::size_t k = 0; k < pairs.size(); ++k) walkers.push_back(a.add_state(1));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& [xs, ys] = pairs[k];
    if (xs.size() != ys.size()) throw UsageError("tuple size mismatch");
    for (int l = 0; l < a.num_letters(); ++l) {
      int f = al.valuation_of(l);
      bool differs = false;
      for (std::size_t i = 0; i < xs.size() && !differs; ++i) differs = al.value(f, xs[i]) != al.value(f, ys[i]);
      if (differs) {
        a.set_transition(walkers[k], l, PosBoolPool::kTrue);
      } else {
        std::vector<PosBoolPool::Id> mv;
        for (int d : al.directions(l)) mv.push_back(a.pool.atom(d, walkers[k]));
        a.set_transition(walkers[k], l, a.pool.disj(mv));
      }
    }
  }
  a.initial = a.add_state(0);
  for (int l = 0; l < a.num_letters(); ++l) {
    std::vector<PosBoolPool::Id> xs;
    for (int w : walkers) xs.push_back(a.transition(w, l));
    a.set_transition(a.initial, l, a.pool.conj(xs));
  }
  return a;
}

// Grid form: coordinates grid[j][i] hold variable i of copy j; every pair of
// copies must differ somewhere.
inline Apt distinctness_apt(const Alphabet& al, const std::vector<std::vector<std::string>>& grid) {
  std::vector<std::vector<int>> idx;
  for (const auto& row : grid) {
    std::vector<int> r;
    for (const auto& n : row) {
      int i = al.coord_index(n);
      if (i < 0) throw UsageError("grid coordinate '" + n + "' not in alphabet");
      r.push_back(i);
    }
    idx.push_back(std::move(r));
  }
  std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) pairs.emplace_back(idx[a], idx[b]);
  return distinctness_apt(al, pairs);
}

// Existential projection of the named coordinates.
inline Npt project(const Npt& n, const std::vector<std::string>& remove) {
  const Apt& a = n.apt();
  Alphabet out = a.alphabet;
  out.coords.clear();
  std::vector<int> keep;
  for (std::size_t i = 0; i < a.alphabet.coords.size(); ++i) {
    if (std::find(remove.begin(), remove.end(), a.alphabet.coords[i]) != remove.end()) continue;
    keep.push_back(static_cast<int>(i));
    out.coords.push_back(a.alphabet.coords[i]);
  }
  for (const auto& c : remove)
    if (a.alphabet.coord_index(c) < 0) throw UsageError("projected coordinate '" + c + "' not in alphabet");
  // Group source letters by their image.
  std::vector<std::vector<int>> preimage(out.num_letters());
  for (int l = 0; l < a.num_letters(); ++l) {
    int f = a.alphabet.valuation_of(l);
    int g = 0;
    for (int i = static_cast<int>(keep.size()) - 1; i >= 0; --i) g = g * out.num_values + a.alphabet.value(f, keep[i]);
    preimage[out.letter(g, a.alphabet.state_of(l))].push_back(l);
  }
  Apt r(out);
  r.pool = a.pool;
  r.initial = a.initial;
  for (int p : a.priority) r.add_state(p);
  for (int q = 0; q < a.num_states(); ++q)
    for (int l = 0; l < r.num_letters(); ++l) {
      std::vector<PosBoolPool::Id> xs;
      for (int src : preimage[l]) xs.push_back(a.transition(q, src));
      r.set_transition(q, l, r.pool.disj(xs));
    }
  return Npt(std::move(r));
}

// ---------------------------------------------------------------------------
// Size reduction: unreachable states, bisimulation quotient, priority
// compression. The language is unchanged.

inline std::vector<int> compress_priorities(const std::vector<int>& prio) {
  std::vector<int> vals(prio.begin(), prio.end());
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::map<int, int> m;
  int cur = vals.empty() ? 0 : vals.front() % 2;
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (k > 0 && vals[k] % 2 != vals[k - 1] % 2) ++cur;
    m[vals[k]] = cur;
  }
  std::vector<int> out;
  for (int p : prio) out.push_back(m[p]);
  return out;
}

namespace detail {

// Priorities renumbered per strongly connected component of the state graph
// (an infinite branch eventually stays in one component); states on no cycle
// get priority 0. `order` lists the reachable states, `index` inverts it.
inline std::vector<int> scc_priorities(const Apt& a, const std::vector<int>& order, const std::vector<int>& index) {
  const int n = static_cast<int>(order.size());
  std::vector<std::vector<int>> succ(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Move> mv;
    for (int l = 0; l < a.num_letters(); ++l) a.pool.collect_moves(a.transition(order[i], l), mv);
    for (const Move& m : mv) succ[i].push_back(index[m.state]);
    std::sort(succ[i].begin(), succ[i].end());
    succ[i].erase(std::unique(succ[i].begin(), succ[i].end()), succ[i].end());
  }
  // Iterative Tarjan.
  std::vector<int> low(n, 0), num(n, -1), comp(n, -1), stack;
  std::vector<bool> on(n, false);
  std::vector<std::pair<int, std::size_t>> call;
  int counter = 0, ncomp = 0;
  for (int root = 0; root < n; ++root) {
    if (num[root] >= 0) continue;
    call.emplace_back(root, 0);
    num[root] = low[root] = counter++;
    stack.push_back(root);
    on[root] = true;
    while (!call.empty()) {
      auto& [v, k] = call.back();
      if (k < succ[v].size()) {
        int w = succ[v][k++];
        if (num[w] < 0) {
          num[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = true;
          call.emplace_back(w, 0);
        } else if (on[w]) {
          low[v] = std::min(low[v], num[w]);
        }
        continue;
      }
      const int u = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[u]);
      if (low[u] == num[u]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on[w] = false;
          comp[w] = ncomp;
          if (w == u) break;
        }
        ++ncomp;
      }
    }
  }
  std::vector<std::vector<int>> members(ncomp);
  for (int i = 0; i < n; ++i) members[comp[i]].push_back(i);
  std::vector<int> out(n, 0);
  for (const auto& mem : members) {
    bool cyclic = mem.size() > 1 || std::binary_search(succ[mem[0]].begin(), succ[mem[0]].end(), mem[0]);
    if (!cyclic) continue;
    std::vector<int> prio;
    for (int i : mem) prio.push_back(a.priority[order[i]]);
    prio = compress_priorities(prio);
    for (std::size_t k = 0; k < mem.size(); ++k) out[mem[k]] = prio[k];
  }
  return out;
}

}  // namespace detail

inline Apt reduce(const Apt& a) {
  const int L = a.num_letters();
  // Reachable states.
  std::vector<int> order;
  std::vector<int> index(a.num_states(), -1);
  order.push_back(a.initial);
  index[a.initial] = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::vector<Move> mv;
    for (int l = 0; l < L; ++l) a.pool.collect_moves(a.transition(order[k], l), mv);
    for (const Move& m : mv)
      if (index[m.state] < 0) {
        index[m.state] = static_cast<int>(order.size());
        order.push_back(m.state);
      }
  }
  const int n = static_cast<int>(order.size());
  const std::vector<int> np = detail::scc_priorities(a, order, index);
  // Partition refinement, starting from priorities.
  std::vector<int> cls(n);
  {
    std::map<int, int> ids;
    for (int i = 0; i < n; ++i) cls[i] = ids.emplace(np[i], static_cast<int>(ids.size())).first->second;
  }
  int num_classes = 0;
  for (int c : cls) num_classes = std::max(num_classes, c + 1);
  while (true) {
    PosBoolPool tmp;
    std::unordered_map<PosBoolPool::Id, PosBoolPool::Id> memo;
    auto to_class = [&](const Move& m) { return tmp.atom(m.dir, cls[index[m.state]]); };
    std::map<std::vector<PosBoolPool::Id>, int> sig_ids;
    std::vector<int> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<PosBoolPool::Id> sig;
      sig.reserve(L + 1);
      sig.push_back(static_cast<PosBoolPool::Id>(cls[i]));
      for (int l = 0; l < L; ++l) sig.push_back(tmp.import(a.pool, a.transition(order[i], l), to_class, memo));
      next[i] = sig_ids.emplace(std::move(sig), static_cast<int>(sig_ids.size())).first->second;
    }
    int nc = static_cast<int>(sig_ids.size());
    cls = std::move(next);
    if (nc == num_classes) break;
    num_classes = nc;
  }
  // Quotient.
  Apt r(a.alphabet);
  std::vector<int> rep(num_classes, -1);
  for (int i = 0; i < n; ++i)
    if (rep[cls[i]] < 0) rep[cls[i]] = i;
  std::vector<int> prio(num_classes);
  for (int c = 0; c < num_classes; ++c) prio[c] = np[rep[c]];
  prio = compress_priorities(prio);
  for (int c = 0; c < num_classes; ++c) r.add_state(prio[c]);
  std::unordered_map<PosBoolPool::Id, PosBoolPool::Id> memo;
  auto to_class = [&](const Move& m) { return r.pool.atom(m.dir, cls[index[m.state]]); };
  for (int c = 0; c < num_classes; ++c)
    for (int l = 0; l < L; ++l) r.set_transition(c, l, r.pool.import(a.pool, a.transition(order[rep[c]], l), to_class, memo));
  r.initial = cls[0];
  return r;
}

// ---------------------------------------------------------------------------
// Priority function <-> chain F1 ⊆ ... ⊆ Fk (index of q = least i with q ∈ Fi).

inline std::vector<std::set<int>> priorities_to_chain(const std::vector<int>& prio) {
  int shift = 0;
  for (int p : prio)
    if (p < 1) shift = 2;
  int k = 0;
  for (int p : prio) k = std::max(k, p + shift);
  std::vector<std::set<int>> chain(k);
  for (std::size_t q = 0; q < prio.size(); ++q)
    for (int i = prio[q] + shift; i <= k; ++i) chain[i - 1].insert(static_cast<int>(q));
  return chain;
}

inline std::vector<int> chain_to_priorities(const std::vector<std::set<int>>& chain, int num_states) {
  for (std::size_t i = 1; i < chain.size(); ++i)
    if (!std::includes(chain[i].begin(), chain[i].end(), chain[i - 1].begin(), chain[i - 1].end()))
      throw UsageError("acceptance sets do not form a chain");
  std::vector<int> prio(num_states, -1);
  for (std::size_t i = 0; i < chain.size(); ++i)
    for (int q : chain[i])
      if (prio[q] < 0) prio[q] = static_cast<int>(i) + 1;
  for (int p : prio)
    if (p < 0) throw UsageError("last acceptance set must contain every state");
  return prio;
}

// ---------------------------------------------------------------------------
// Text dump.

inline void emit_automaton(std::ostream& os, const Apt& a) {
  os << (is_npt_shaped(a) ? "npt" : "apt") << " states=" << a.num_states() << " priorities=" << a.num_priorities()
     << '\n';
  os << "letters " << a.num_letters() << " coords";
  for (const auto& c : a.alphabet.coords) os << ' ' << c;
  os << '\n';
  os << "initial " << a.initial << '\n';
  for (int q = 0; q < a.num_states(); ++q) os << "priority " << q << ' ' << a.priority[q] << '\n';
  for (int q = 0; q < a.num_states(); ++q)
    for (int l = 0; l < a.num_letters(); ++l) os << q << ' ' << l << ' ' << a.pool.to_prefix(a.transition(q, l)) << '\n';
}

// ---------------------------------------------------------------------------
// Regular trees and membership.

// Finite generator of a Σ-labeled tree: node n carries letter label[n], and
// its child in direction d is child[n][d] (-1 when the direction is absent).
struct RegularTree {
  int root = 0;
  std::vector<int> label;
  std::vector<std::vector<int>> child;

  int size() const { return static_cast<int>(label.size()); }
};

struct MembershipGame {
  ParityGame game;
  int initial = 0;
};

inline MembershipGame membership_game(const Apt& a, const RegularTree& t) {
  using Op = PosBoolPool::Op;
  for (int n = 0; n < t.size(); ++n) {
    if (t.label[n] < 0 || t.label[n] >= a.num_letters()) throw UsageError("tree label outside the alphabet");
    if (static_cast<int>(t.child[n].size()) != a.alphabet.num_directions) throw UsageError("tree branching mismatch");
  }
  int neutral = 0;
  for (int p : a.priority) neutral = std::max(neutral, p);
  MembershipGame mg;
  std::map<std::pair<int, int>, int> state_vertex;                  // (node, q)
  std::map<std::pair<int, PosBoolPool::Id>, int> formula_vertex;     // (node, formula)
  std::vector<std::pair<int, int>> pending_states;
  std::vector<std::pair<int, PosBoolPool::Id>> pending_formulas;
  auto sv = [&](int node, int q) {
    auto [it, fresh] = state_vertex.emplace(std::make_pair(node, q), 0);
    if (fresh) {
      it->second = mg.game.add_vertex(Player::Verifier, a.priority[q]);
      pending_states.emplace_back(node, q);
    }
    return it->second;
  };
  auto fv = [&](int node, PosBoolPool::Id x) {
    auto [it, fresh] = formula_vertex.emplace(std::make_pair(node, x), 0);
    if (fresh) {
      Op op = a.pool.op(x);
      Player owner = (op == Op::And || op == Op::True) ? Player::Refuter : Player::Verifier;
      it->second = mg.game.add_vertex(owner, neutral);
      pending_formulas.emplace_back(node, x);
    }
    return it->second;
  };
  mg.initial = sv(t.root, a.initial);
  while (!pending_states.empty() || !pending_formulas.empty()) {
    if (!pending_states.empty()) {
      auto [node, q] = pending_states.back();
      pending_states.pop_back();
      int v = state_vertex[{node, q}];
      mg.game.add_edge(v, fv(node, a.transition(q, t.label[node])));
      continue;
    }
    auto [node, x] = pending_formulas.back();
    pending_formulas.pop_back();
    int v = formula_vertex[{node, x}];
    switch (a.pool.op(x)) {
      case Op::False:
      case Op::True: break;  // dead end, lost by its owner
      case Op::Atom: {
        const Move& m = a.pool.move(x);
        int c = m.dir < static_cast<int>(t.child[node].size()) ? t.child[node][m.dir] : -1;
        if (c >= 0) mg.game.add_edge(v, sv(c, m.state));
        break;
      }
      case Op::And:
      case Op::Or:
        for (auto y : a.pool.args(x)) mg.game.add_edge(v, fv(node, y));
        break;
    }
  }
  mg.game.resolve_dead_ends();
  return mg;
}

inline bool member(const Apt& a, const RegularTree& t) {
  auto mg = membership_game(a, t);
  return solve_zielonka(mg.game).verifier_wins(mg.initial);
}

}  // namespace gsl
