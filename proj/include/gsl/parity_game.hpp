#pragma once

// Two-player parity games under the min-parity convention: a play is won by
// the Verifier iff the least priority occurring infinitely often is even.

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "gsl/error.hpp"

namespace gsl {

enum class Player : int { Verifier = 0, Refuter = 1 };

inline Player opponent(Player p) { return p == Player::Verifier ? Player::Refuter : Player::Verifier; }
inline Player winner_of_priority(int p) { return p % 2 == 0 ? Player::Verifier : Player::Refuter; }

class ParityGame {
 public:
  int add_vertex(Player owner, int priority) {
    owner_.push_back(owner);
    priority_.push_back(priority);
    succ_.emplace_back();
    return static_cast<int>(owner_.size()) - 1;
  }
  void add_edge(int from, int to) { succ_[from].push_back(to); }

  // Every vertex without successors is lost by its owner: route it to a
  // self-looping sink won by the other player.
  void resolve_dead_ends() {
    int win_v = -1, win_r = -1;
    const int n = size();
    for (int v = 0; v < n; ++v) {
      if (!succ_[v].empty()) continue;
      if (owner_[v] == Player::Verifier) {
        if (win_r < 0) {
          win_r = add_vertex(Player::Refuter, 1);
          add_edge(win_r, win_r);
        }
        add_edge(v, win_r);
      } else {
        if (win_v < 0) {
          win_v = add_vertex(Player::Verifier, 0);
          add_edge(win_v, win_v);
        }
        add_edge(v, win_v);
      }
    }
  }

  int size() const { return static_cast<int>(owner_.size()); }
  Player owner(int v) const { return owner_[v]; }
  int priority(int v) const { return priority_[v]; }
  const std::vector<int>& successors(int v) const { return succ_[v]; }

  void dump(std::ostream& os) const {
    for (int v = 0; v < size(); ++v) {
      os << v << ' ' << (owner_[v] == Player::Verifier ? 'V' : 'R') << ' ' << priority_[v];
      for (int w : succ_[v]) os << ' ' << w;
      os << '\n';
    }
  }

 private:
  std::vector<Player> owner_;
  std::vector<int> priority_;
  std::vector<std::vector<int>> succ_;
};

struct ParitySolution {
  std::vector<Player> winner;  // per vertex
  std::vector<int> strategy;   // chosen successor for the winner's own vertices, else -1

  bool verifier_wins(int v) const { return winner[v] == Player::Verifier; }
};

namespace detail {

// Attractor of `target` for player `p` inside the subgame `in`. Fills `strat`
// for p-vertices that are attracted through an edge choice.
inline std::vector<bool> attractor(const ParityGame& g, const std::vector<bool>& in, const std::vector<bool>& target,
                                   Player p, std::vector<int>& strat,
                                   const std::vector<std::vector<int>>& pred) {
  const int n = g.size();
  std::vector<bool> attr(n, false);
  std::vector<int> count(n, 0);
  std::deque<int> queue;
  for (int v = 0; v < n; ++v) {
    if (!in[v]) continue;
    if (target[v]) {
      attr[v] = true;
      queue.push_back(v);
    }
    if (g.owner(v) != p)
      for (int w : g.successors(v)) count[v] += in[w] ? 1 : 0;
  }
  while (!queue.empty()) {
    int w = queue.front();
    queue.pop_front();
    for (int v : pred[w]) {
      if (!in[v] || attr[v]) continue;
      if (g.owner(v) == p) {
        attr[v] = true;
        strat[v] = w;
        queue.push_back(v);
      } else if (--count[v] == 0) {
        attr[v] = true;
        queue.push_back(v);
      }
    }
  }
  return attr;
}

inline void zielonka(const ParityGame& g, const std::vector<bool>& in, const std::vector<std::vector<int>>& pred,
                     std::vector<Player>& win, std::vector<int>& strat) {
  const int n = g.size();
  int p = -1;
  for (int v = 0; v < n; ++v)
    if (in[v] && (p < 0 || g.priority(v) < p)) p = g.priority(v);
  if (p < 0) return;
  const Player i = winner_of_priority(p);
  const Player o = opponent(i);

  std::vector<bool> top(n, false);
  for (int v = 0; v < n; ++v) top[v] = in[v] && g.priority(v) == p;
  std::vector<int> attr_strat(n, -1);
  auto a = attractor(g, in, top, i, attr_strat, pred);

  std::vector<bool> rest(n, false);
  bool rest_nonempty = false;
  for (int v = 0; v < n; ++v) {
    rest[v] = in[v] && !a[v];
    rest_nonempty = rest_nonempty || rest[v];
  }
  std::vector<Player> w1(n, i);
  std::vector<int> s1(n, -1);
  if (rest_nonempty) zielonka(g, rest, pred, w1, s1);

  bool opp_wins_some = false;
  for (int v = 0; v < n; ++v) opp_wins_some = opp_wins_some || (rest[v] && w1[v] == o);

  if (!opp_wins_some) {
    for (int v = 0; v < n; ++v) {
      if (!in[v]) continue;
      win[v] = i;
      if (g.owner(v) != i) continue;
      if (rest[v]) {
        strat[v] = s1[v];
      } else if (top[v]) {
        for (int w : g.successors(v))
          if (in[w]) {
            strat[v] = w;
            break;
          }
      } else {
        strat[v] = attr_strat[v];
      }
    }
    return;
  }

  std::vector<bool> wo(n, false);
  for (int v = 0; v < n; ++v) wo[v] = rest[v] && w1[v] == o;
  std::vector<int> b_strat(n, -1);
  auto b = attractor(g, in, wo, o, b_strat, pred);
  std::vector<bool> rest2(n, false);
  bool rest2_nonempty = false;
  for (int v = 0; v < n; ++v) {
    rest2[v] = in[v] && !b[v];
    rest2_nonempty = rest2_nonempty || rest2[v];
  }
  std::vector<Player> w2(n, i);
  std::vector<int> s2(n, -1);
  if (rest2_nonempty) zielonka(g, rest2, pred, w2, s2);
  for (int v = 0; v < n; ++v) {
    if (!in[v]) continue;
    if (b[v]) {
      win[v] = o;
      if (g.owner(v) == o) strat[v] = wo[v] ? s1[v] : b_strat[v];
    } else {
      win[v] = w2[v];
      if (g.owner(v) == w2[v]) strat[v] = s2[v];
    }
  }
}

}  // namespace detail

// Recursive (Zielonka) solver with positional strategies for both players.
inline ParitySolution solve_zielonka(const ParityGame& g) {
  const int n = g.size();
  for (int v = 0; v < n; ++v)
    if (g.successors(v).empty()) throw UsageError("parity game has a dead end");
  std::vector<std::vector<int>> pred(n);
  for (int v = 0; v < n; ++v)
    for (int w : g.successors(v)) pred[w].push_back(v);
  ParitySolution sol;
  sol.winner.assign(n, Player::Verifier);
  sol.strategy.assign(n, -1);
  detail::zielonka(g, std::vector<bool>(n, true), pred, sol.winner, sol.strategy);
  return sol;
}

// Nested fixpoint evaluation  W = nu Z0. mu Z1. nu Z2 ...  U_i (P_i & CPre(Z_i))
// over compressed priorities. Exponential in the number of priorities.
inline std::vector<Player> solve_fixpoint(const ParityGame& g, int vertex_budget = 64) {
  const int n = g.size();
  if (n > vertex_budget) throw ResourceError("game too large for the fixpoint solver");
  std::vector<int> prios;
  for (int v = 0; v < n; ++v) prios.push_back(g.priority(v));
  std::sort(prios.begin(), prios.end());
  prios.erase(std::unique(prios.begin(), prios.end()), prios.end());
  // Levels 0..d: level k collects priority k; start at parity of the minimum.
  std::map<int, int> level;
  int cur = prios.empty() ? 0 : prios.front() % 2;
  for (std::size_t k = 0; k < prios.size(); ++k) {
    if (k > 0 && prios[k] % 2 != prios[k - 1] % 2) ++cur;
    level[prios[k]] = cur;
  }
  const int d = cur + 1;
  using Set = std::vector<bool>;
  auto cpre = [&](const Set& z, int v) {
    const auto& s = g.successors(v);
    if (g.owner(v) == Player::Verifier) return std::any_of(s.begin(), s.end(), [&](int w) { return z[w]; });
    return std::all_of(s.begin(), s.end(), [&](int w) { return z[w]; });
  };
  std::vector<Set> env(d, Set(n, false));
  std::function<Set(int)> eval = [&](int k) -> Set {
    bool greatest = k % 2 == 0;
    Set z(n, greatest);
    while (true) {
      env[k] = z;
      Set inner = k + 1 < d ? eval(k + 1) : Set();
      Set next(n, false);
      for (int v = 0; v < n; ++v) {
        int lv = level[g.priority(v)];
        if (lv == k) {
          next[v] = cpre(z, v);
        } else if (lv > k) {
          next[v] = inner[v];
        } else {
          next[v] = cpre(env[lv], v);
        }
      }
      if (next == z) return z;
      z = next;
    }
  };
  Set w = eval(0);
  std::vector<Player> out(n);
  for (int v = 0; v < n; ++v) out[v] = w[v] ? Player::Verifier : Player::Refuter;
  return out;
}

// Checks that `strategy` (positional, defined on `player`'s vertices of
// `region`) keeps every play inside the region and wins it for `player`.
inline bool verify_strategy(const ParityGame& g, const std::vector<bool>& region, const std::vector<int>& strategy,
                            Player player) {
  const int n = g.size();
  std::vector<std::vector<int>> edges(n);
  for (int v = 0; v < n; ++v) {
    if (!region[v]) continue;
    if (g.owner(v) == player) {
      int w = strategy[v];
      const auto& s = g.successors(v);
      if (w < 0 || std::find(s.begin(), s.end(), w) == s.end() || !region[w]) return false;
      edges[v].push_back(w);
    } else {
      for (int w : g.successors(v)) {
        if (!region[w]) return false;
        edges[v].push_back(w);
      }
    }
  }
  // A losing cycle exists iff for some priority p of the opponent's parity, a
  // vertex of priority p lies on a cycle among vertices of priority >= p.
  for (int v = 0; v < n; ++v) {
    if (!region[v] || winner_of_priority(g.priority(v)) == player) continue;
    const int p = g.priority(v);
    std::vector<bool> seen(n, false);
    std::vector<int> stack;
    for (int w : edges[v])
      if (g.priority(w) >= p && !seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      if (u == v) return false;
      for (int w : edges[u])
        if (g.priority(w) >= p && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
    }
  }
  return true;
}

}  // namespace gsl
