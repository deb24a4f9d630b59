#pragma once

// Positive Boolean formulas over moves (direction, state), hash-consed in a
// per-automaton pool. Conjunctions and disjunctions are flattened, sorted and
// deduplicated, and constants are absorbed, so structurally equal formulas
// share one id.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gsl/error.hpp"

namespace gsl {

struct Move {
  int dir = 0;
  int state = 0;
  auto operator<=>(const Move&) const = default;
};

class PosBoolPool {
 public:
  using Id = std::uint32_t;
  enum class Op : std::uint8_t { False, True, Atom, And, Or };
  static constexpr Id kFalse = 0;
  static constexpr Id kTrue = 1;

  PosBoolPool() {
    nodes_.push_back({Op::False, {}, {}});
    nodes_.push_back({Op::True, {}, {}});
  }

  Op op(Id x) const { return nodes_[x].op; }
  const Move& move(Id x) const { return nodes_[x].move; }
  const std::vector<Id>& args(Id x) const { return nodes_[x].args; }
  std::size_t size() const { return nodes_.size(); }

  Id atom(int dir, int state) { return intern({Op::Atom, {dir, state}, {}}); }
  Id atom(Move m) { return atom(m.dir, m.state); }

  Id conj(std::vector<Id> xs) { return nary(Op::And, std::move(xs)); }
  Id disj(std::vector<Id> xs) { return nary(Op::Or, std::move(xs)); }
  Id land(Id a, Id b) { return conj({a, b}); }
  Id lor(Id a, Id b) { return disj({a, b}); }

  bool eval(Id x, const std::function<bool(const Move&)>& val) const {
    switch (op(x)) {
      case Op::False: return false;
      case Op::True: return true;
      case Op::Atom: return val(move(x));
      case Op::And:
        for (Id a : args(x))
          if (!eval(a, val)) return false;
        return true;
      case Op::Or:
        for (Id a : args(x))
          if (eval(a, val)) return true;
        return false;
    }
    return false;
  }

  // Copies `x` from `src` into this pool, rewriting every atom through `f`
  // (which may return any formula of this pool). `memo` is keyed by src ids.
  Id import(const PosBoolPool& src, Id x, const std::function<Id(const Move&)>& f,
            std::unordered_map<Id, Id>& memo) {
    auto it = memo.find(x);
    if (it != memo.end()) return it->second;
    Id r = kFalse;
    switch (src.op(x)) {
      case Op::False: r = kFalse; break;
      case Op::True: r = kTrue; break;
      case Op::Atom: r = f(src.move(x)); break;
      case Op::And:
      case Op::Or: {
        std::vector<Id> xs;
        xs.reserve(src.args(x).size());
        for (Id a : src.args(x)) xs.push_back(import(src, a, f, memo));
        r = src.op(x) == Op::And ? conj(std::move(xs)) : disj(std::move(xs));
        break;
      }
    }
    memo.emplace(x, r);
    return r;
  }

  // Swaps conjunction/disjunction and the constants; atoms are kept.
  Id dual(const PosBoolPool& src, Id x, std::unordered_map<Id, Id>& memo) {
    auto it = memo.find(x);
    if (it != memo.end()) return it->second;
    Id r = kFalse;
    switch (src.op(x)) {
      case Op::False: r = kTrue; break;
      case Op::True: r = kFalse; break;
      case Op::Atom: r = atom(src.move(x)); break;
      case Op::And:
      case Op::Or: {
        std::vector<Id> xs;
        for (Id a : src.args(x)) xs.push_back(dual(src, a, memo));
        r = src.op(x) == Op::And ? disj(std::move(xs)) : conj(std::move(xs));
        break;
      }
    }
    memo.emplace(x, r);
    return r;
  }

  // Minimal satisfying sets of moves (each sorted), restricted to moves for
  // which `allowed` holds; disallowed atoms count as false.
  std::vector<std::vector<Move>> minimal_models(Id x, const std::function<bool(const Move&)>& allowed) const {
    auto ms = models(x, allowed);
    return minimize(std::move(ms));
  }

  std::string to_prefix(Id x) const {
    switch (op(x)) {
      case Op::False: return "false";
      case Op::True: return "true";
      case Op::Atom: return std::to_string(move(x).dir) + ":" + std::to_string(move(x).state);
      case Op::And:
      case Op::Or: {
        std::string s = op(x) == Op::And ? "(&" : "(|";
        for (Id a : args(x)) s += " " + to_prefix(a);
        return s + ")";
      }
    }
    return "?";
  }

  // Moves occurring in x.
  void collect_moves(Id x, std::vector<Move>& out) const {
    switch (op(x)) {
      case Op::Atom: out.push_back(move(x)); return;
      case Op::And:
      case Op::Or:
        for (Id a : args(x)) collect_moves(a, out);
        return;
      default: return;
    }
  }

 private:
  struct Node {
    Op op;
    Move move;
    std::vector<Id> args;
  };
  struct KeyHash {
    std::size_t operator()(const Node& n) const {
      std::size_t h = static_cast<std::size_t>(n.op) * 1000003u;
      h ^= static_cast<std::size_t>(n.move.dir) * 7919u + static_cast<std::size_t>(n.move.state) * 104729u;
      for (Id a : n.args) h = h * 31u + a;
      return h;
    }
  };
  struct KeyEq {
    bool operator()(const Node& a, const Node& b) const {
      return a.op == b.op && a.move == b.move && a.args == b.args;
    }
  };

  Id intern(Node n) {
    auto it = index_.find(n);
    if (it != index_.end()) return it->second;
    Id id = static_cast<Id>(nodes_.size());
    nodes_.push_back(n);
    index_.emplace(std::move(n), id);
    return id;
  }

  Id nary(Op o, std::vector<Id> xs) {
    const Id absorb = o == Op::And ? kFalse : kTrue;
    const Id unit = o == Op::And ? kTrue : kFalse;
    std::vector<Id> flat;
    flat.reserve(xs.size());
    for (Id x : xs) {
      if (x == absorb) return absorb;
      if (x == unit) continue;
      if (op(x) == o) {
        for (Id a : args(x)) flat.push_back(a);
      } else {
        flat.push_back(x);
      }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    if (flat.empty()) return unit;
    if (flat.size() == 1) return flat[0];
    return intern({o, {}, std::move(flat)});
  }

  static std::vector<std::vector<Move>> minimize(std::vector<std::vector<Move>> ms) {
    for (auto& m : ms) {
      std::sort(m.begin(), m.end());
      m.erase(std::unique(m.begin(), m.end()), m.end());
    }
    std::sort(ms.begin(), ms.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    std::vector<std::vector<Move>> out;
    for (auto& m : ms) {
      bool dominated = std::any_of(out.begin(), out.end(), [&](const std::vector<Move>& k) {
        return std::includes(m.begin(), m.end(), k.begin(), k.end());
      });
      if (!dominated) out.push_back(std::move(m));
    }
    return out;
  }

  std::vector<std::vector<Move>> models(Id x, const std::function<bool(const Move&)>& allowed) const {
    switch (op(x)) {
      case Op::False: return {};
      case Op::True: return {{}};
      case Op::Atom:
        if (!allowed(move(x))) return {};
        return {{move(x)}};
      case Op::Or: {
        std::vector<std::vector<Move>> out;
        for (Id a : args(x)) {
          auto sub = models(a, allowed);
          out.insert(out.end(), sub.begin(), sub.end());
        }
        return minimize(std::move(out));
      }
      case Op::And: {
        std::vector<std::vector<Move>> acc{{}};
        for (Id a : args(x)) {
          auto sub = models(a, allowed);
          std::vector<std::vector<Move>> next;
          for (const auto& l : acc)
            for (const auto& r : sub) {
              std::vector<Move> m = l;
              m.insert(m.end(), r.begin(), r.end());
              next.push_back(std::move(m));
            }
          acc = minimize(std::move(next));
          if (acc.empty()) return {};
        }
        return acc;
      }
    }
    return {};
  }

  std::vector<Node> nodes_;
  std::unordered_map<Node, Id, KeyHash, KeyEq> index_;
};

}  // namespace gsl
