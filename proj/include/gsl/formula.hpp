#pragma once

// Abstract syntax of graded strategy logic, concrete syntax, free placeholders
// and the syntactic fragment / rank analysis.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gsl/error.hpp"

namespace gsl {

// Reserved proposition that holds in every state. `false` is its negation.
inline constexpr const char* kTrueAtom = "true";

struct Grade {
  enum class Kind { Finite, Aleph0, Aleph1, Continuum };
  Kind kind = Kind::Finite;
  std::uint64_t n = 1;

  static Grade finite(std::uint64_t v) { return {Kind::Finite, v}; }
  bool is_finite() const { return kind == Kind::Finite; }
  bool operator==(const Grade&) const = default;
};

inline std::string to_string(const Grade& g) {
  switch (g.kind) {
    case Grade::Kind::Finite: return std::to_string(g.n);
    case Grade::Kind::Aleph0: return "aleph0";
    case Grade::Kind::Aleph1: return "aleph1";
    case Grade::Kind::Continuum: return "cont";
  }
  return "?";
}

struct Placeholder {
  enum class Kind { Agent, Variable };
  Kind kind;
  std::string name;

  static Placeholder agent(std::string n) { return {Kind::Agent, std::move(n)}; }
  static Placeholder variable(std::string n) { return {Kind::Variable, std::move(n)}; }
  bool is_agent() const { return kind == Kind::Agent; }
  auto operator<=>(const Placeholder&) const = default;
};

using PlaceholderSet = std::set<Placeholder>;

enum class NodeKind { Atom, Not, Or, Next, Until, Exists, Bind };

struct FormulaNode;

// Immutable, structurally shared formula value. Only the seven core node
// kinds exist; derived connectives are produced by the helper constructors.
class Formula {
 public:
  Formula() = default;

  NodeKind kind() const;
  const std::string& atom() const;   // Atom
  const std::string& agent() const;  // Bind
  const std::string& var() const;    // Bind
  const std::vector<std::string>& vars() const;  // Exists
  const Grade& grade() const;                    // Exists
  const Formula& sub() const;    // Not, Next, Exists, Bind
  const Formula& left() const;   // Or, Until
  const Formula& right() const;  // Or, Until

  bool valid() const { return node_ != nullptr; }
  bool is_true() const;

  friend bool operator==(const Formula& a, const Formula& b);

  static Formula make(FormulaNode n);

 private:
  std::shared_ptr<const FormulaNode> node_;
};

struct FormulaNode {
  NodeKind kind = NodeKind::Atom;
  std::string name;               // atom name, or bound agent
  std::string var;                // bound variable
  std::vector<std::string> vars;  // quantified tuple
  Grade grade;
  Formula lhs, rhs;
};

inline NodeKind Formula::kind() const { return node_->kind; }
inline const std::string& Formula::atom() const { return node_->name; }
inline const std::string& Formula::agent() const { return node_->name; }
inline const std::string& Formula::var() const { return node_->var; }
inline const std::vector<std::string>& Formula::vars() const { return node_->vars; }
inline const Grade& Formula::grade() const { return node_->grade; }
inline const Formula& Formula::sub() const { return node_->lhs; }
inline const Formula& Formula::left() const { return node_->lhs; }
inline const Formula& Formula::right() const { return node_->rhs; }
inline bool Formula::is_true() const { return kind() == NodeKind::Atom && atom() == kTrueAtom; }

inline Formula Formula::make(FormulaNode n) {
  Formula f;
  f.node_ = std::make_shared<const FormulaNode>(std::move(n));
  return f;
}

inline bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const FormulaNode& x = *a.node_;
  const FormulaNode& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::Atom: return x.name == y.name;
    case NodeKind::Not:
    case NodeKind::Next: return x.lhs == y.lhs;
    case NodeKind::Or:
    case NodeKind::Until: return x.lhs == y.lhs && x.rhs == y.rhs;
    case NodeKind::Exists: return x.vars == y.vars && x.grade == y.grade && x.lhs == y.lhs;
    case NodeKind::Bind: return x.name == y.name && x.var == y.var && x.lhs == y.lhs;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Constructors. Derived connectives desugar immediately.

inline Formula atom(std::string name) {
  FormulaNode n;
  n.kind = NodeKind::Atom;
  n.name = std::move(name);
  return Formula::make(std::move(n));
}
inline Formula top() { return atom(kTrueAtom); }
inline Formula neg(Formula f) {
  FormulaNode n;
  n.kind = NodeKind::Not;
  n.lhs = std::move(f);
  return Formula::make(std::move(n));
}
inline Formula bottom() { return neg(top()); }
inline Formula lor(Formula a, Formula b) {
  FormulaNode n;
  n.kind = NodeKind::Or;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return Formula::make(std::move(n));
}
inline Formula next(Formula f) {
  FormulaNode n;
  n.kind = NodeKind::Next;
  n.lhs = std::move(f);
  return Formula::make(std::move(n));
}
inline Formula until(Formula a, Formula b) {
  FormulaNode n;
  n.kind = NodeKind::Until;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return Formula::make(std::move(n));
}
inline Formula exists(std::vector<std::string> vars, Grade g, Formula body) {
  FormulaNode n;
  n.kind = NodeKind::Exists;
  n.vars = std::move(vars);
  n.grade = g;
  n.lhs = std::move(body);
  return Formula::make(std::move(n));
}
inline Formula bind(std::string agent, std::string var, Formula body) {
  FormulaNode n;
  n.kind = NodeKind::Bind;
  n.name = std::move(agent);
  n.var = std::move(var);
  n.lhs = std::move(body);
  return Formula::make(std::move(n));
}

inline Formula land(Formula a, Formula b) { return neg(lor(neg(std::move(a)), neg(std::move(b)))); }
inline Formula implies(Formula a, Formula b) { return lor(neg(std::move(a)), std::move(b)); }
inline Formula eventually(Formula f) { return until(top(), std::move(f)); }
inline Formula always(Formula f) { return neg(eventually(neg(std::move(f)))); }
inline Formula forall(std::vector<std::string> vars, Grade g, Formula body) {
  return neg(exists(std::move(vars), g, neg(std::move(body))));
}

// Left-nested conjunction / disjunction; the empty case yields true / false.
inline Formula land_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return top();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = land(acc, fs[i]);
  return acc;
}
inline Formula lor_all(const std::vector<Formula>& fs) {
  if (fs.empty()) return bottom();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = lor(acc, fs[i]);
  return acc;
}

// ---------------------------------------------------------------------------
// Parsing.
//
//   formula := or ( '->' formula )?
//   or      := and ( '||' and )*
//   and     := until ( '&&' until )*
//   until   := unary ( 'U' until )?
//   unary   := '!' unary | 'X' unary | 'F' unary | 'G' unary
//            | '<<' vars '>>' ( '^' '>=' grade )? unary
//            | '[[' vars ']]' ( '^' '<' grade )? unary
//            | '(' agent ',' var ')' unary
//            | '(' formula ')' | 'true' | 'false' | ident

namespace detail {

enum class Tok {
  Ident, Number, LParen, RParen, Comma, Bang, And, Or, Arrow, LAngle2, RAngle2,
  LBrack2, RBrack2, Caret, Ge, Lt, End
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

inline bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto two = [&](const char* t) { return s.compare(i, 2, t) == 0; };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    std::size_t start = i;
    if (is_ident_start(c)) {
      while (i < s.size() && is_ident_char(s[i])) ++i;
      out.push_back({Tok::Ident, s.substr(start, i - start), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      out.push_back({Tok::Number, s.substr(start, i - start), start});
      continue;
    }
    if (two("&&")) { out.push_back({Tok::And, "&&", start}); i += 2; continue; }
    if (two("||")) { out.push_back({Tok::Or, "||", start}); i += 2; continue; }
    if (two("->")) { out.push_back({Tok::Arrow, "->", start}); i += 2; continue; }
    if (two("<<")) { out.push_back({Tok::LAngle2, "<<", start}); i += 2; continue; }
    if (two(">>")) { out.push_back({Tok::RAngle2, ">>", start}); i += 2; continue; }
    if (two("[[")) { out.push_back({Tok::LBrack2, "[[", start}); i += 2; continue; }
    if (two("]]")) { out.push_back({Tok::RBrack2, "]]", start}); i += 2; continue; }
    if (two(">=")) { out.push_back({Tok::Ge, ">=", start}); i += 2; continue; }
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", start}); break;
      case ')': out.push_back({Tok::RParen, ")", start}); break;
      case ',': out.push_back({Tok::Comma, ",", start}); break;
      case '!': out.push_back({Tok::Bang, "!", start}); break;
      case '^': out.push_back({Tok::Caret, "^", start}); break;
      case '<': out.push_back({Tok::Lt, "<", start}); break;
      default: throw ParseError(std::string("unknown token '") + c + "'", start);
    }
    ++i;
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

inline bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw{"X", "F", "G", "U", "true", "false", "aleph0", "aleph1", "cont"};
  return kw.count(s) > 0;
}

class Parser {
 public:
  Parser(const std::string& text, const std::set<std::string>& agents)
      : toks_(lex(text)), agents_(agents) {}

  Formula parse() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }
  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    take();
  }
  bool is_word(const char* w, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == w;
  }

  Formula formula() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::Arrow) {
      take();
      return implies(lhs, formula());
    }
    return lhs;
  }
  Formula disjunction() {
    Formula acc = conjunction();
    while (peek().kind == Tok::Or) {
      take();
      acc = lor(acc, conjunction());
    }
    return acc;
  }
  Formula conjunction() {
    Formula acc = until_expr();
    while (peek().kind == Tok::And) {
      take();
      acc = land(acc, until_expr());
    }
    return acc;
  }
  Formula until_expr() {
    Formula lhs = unary();
    if (is_word("U")) {
      take();
      return until(lhs, until_expr());
    }
    return lhs;
  }

  std::vector<std::string> var_list(Tok close, const char* close_text) {
    std::vector<std::string> vars;
    if (peek().kind == close) {
      take();
      return vars;
    }
    while (true) {
      if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail("expected variable name");
      const Token& t = peek();
      if (agents_.count(t.text)) fail("'" + t.text + "' is an agent, not a variable");
      if (std::find(vars.begin(), vars.end(), t.text) != vars.end())
        fail("duplicate variable '" + t.text + "' in quantifier tuple");
      vars.push_back(t.text);
      take();
      if (peek().kind == Tok::Comma) {
        take();
        continue;
      }
      if (peek().kind != close) fail(std::string("expected ',' or '") + close_text + "'");
      take();
      return vars;
    }
  }

  Grade grade_value() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      take();
      try {
        return Grade::finite(std::stoull(t.text));
      } catch (const std::exception&) {
        throw ParseError("grade out of range", t.pos);
      }
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "aleph0") { take(); return {Grade::Kind::Aleph0, 0}; }
      if (t.text == "aleph1") { take(); return {Grade::Kind::Aleph1, 0}; }
      if (t.text == "cont") { take(); return {Grade::Kind::Continuum, 0}; }
    }
    fail("expected grade");
  }

  Formula unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Bang: take(); return neg(unary());
      case Tok::LAngle2: {
        take();
        auto vars = var_list(Tok::RAngle2, ">>");
        Grade g = Grade::finite(1);
        if (peek().kind == Tok::Caret) {
          take();
          expect(Tok::Ge, "'>=' after '^' of an existential quantifier");
          g = grade_value();
        }
        return exists(std::move(vars), g, unary());
      }
      case Tok::LBrack2: {
        take();
        auto vars = var_list(Tok::RBrack2, "]]");
        Grade g = Grade::finite(1);
        if (peek().kind == Tok::Caret) {
          take();
          expect(Tok::Lt, "'<' after '^' of a universal quantifier");
          g = grade_value();
        }
        return forall(std::move(vars), g, unary());
      }
      case Tok::LParen: {
        if (peek(1).kind == Tok::Ident && peek(2).kind == Tok::Comma && peek(3).kind == Tok::Ident &&
            peek(4).kind == Tok::RParen) {
          const Token& ag = peek(1);
          const Token& v = peek(3);
          if (!agents_.count(ag.text)) throw ParseError("unknown agent '" + ag.text + "' in binding", ag.pos);
          if (is_keyword(v.text) || agents_.count(v.text))
            throw ParseError("expected variable name in binding", v.pos);
          pos_ += 5;
          return bind(ag.text, v.text, unary());
        }
        take();
        Formula f = formula();
        expect(Tok::RParen, "')'");
        return f;
      }
      case Tok::Ident: {
        if (t.text == "X") { take(); return next(unary()); }
        if (t.text == "F") { take(); return eventually(unary()); }
        if (t.text == "G") { take(); return always(unary()); }
        if (t.text == "true") { take(); return top(); }
        if (t.text == "false") { take(); return bottom(); }
        if (is_keyword(t.text)) fail("unexpected '" + t.text + "'");
        if (agents_.count(t.text)) fail("agent '" + t.text + "' used as a proposition");
        std::string name = t.text;
        take();
        return atom(std::move(name));
      }
      case Tok::End: fail("unexpected end of formula");
      default: fail("unexpected '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::set<std::string>& agents_;
};

}  // namespace detail

inline Formula parse_formula(const std::string& text, const std::set<std::string>& agents) {
  return detail::Parser(text, agents).parse();
}

// ---------------------------------------------------------------------------
// Printing. Output re-parses to the identical desugared tree; sugar is used
// only where its desugaring reproduces the node exactly.

namespace detail {

enum Prec { kImplies = 1, kOr = 2, kAnd = 3, kUntil = 4, kUnary = 5 };

inline std::string join_vars(const std::vector<std::string>& vs) {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? "," : "") + vs[i];
  return s;
}

inline std::pair<std::string, int> render(const Formula& f);

inline std::string at_least(const Formula& f, int prec) {
  auto [s, p] = render(f);
  return p < prec ? "(" + s + ")" : s;
}

inline std::pair<std::string, int> render(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Atom: return {f.atom(), kUnary};
    case NodeKind::Not: {
      const Formula& g = f.sub();
      if (g.is_true()) return {"false", kUnary};
      // [[x]] <<y>> !... reads worse than !<<x>> [[y]] ..., so keep the latter.
      if (g.kind() == NodeKind::Exists && g.sub().kind() == NodeKind::Not &&
          g.sub().sub().kind() != NodeKind::Exists)
        return {"[[" + join_vars(g.vars()) + "]]^<" + to_string(g.grade()) + " " + at_least(g.sub().sub(), kUnary),
                kUnary};
      if (g.kind() == NodeKind::Until && g.left().is_true() && g.right().kind() == NodeKind::Not)
        return {"G " + at_least(g.right().sub(), kUnary), kUnary};
      if (g.kind() == NodeKind::Or && g.left().kind() == NodeKind::Not && g.right().kind() == NodeKind::Not)
        return {at_least(g.left().sub(), kAnd) + " && " + at_least(g.right().sub(), kUntil), kAnd};
      return {"!" + at_least(g, kUnary), kUnary};
    }
    case NodeKind::Or: return {at_least(f.left(), kOr) + " || " + at_least(f.right(), kAnd), kOr};
    case NodeKind::Next: return {"X " + at_least(f.sub(), kUnary), kUnary};
    case NodeKind::Until:
      if (f.left().is_true()) return {"F " + at_least(f.right(), kUnary), kUnary};
      return {at_least(f.left(), kUnary) + " U " + at_least(f.right(), kUntil), kUntil};
    case NodeKind::Exists:
      return {"<<" + join_vars(f.vars()) + ">>^>=" + to_string(f.grade()) + " " + at_least(f.sub(), kUnary),
              kUnary};
    case NodeKind::Bind: return {"(" + f.agent() + "," + f.var() + ") " + at_least(f.sub(), kUnary), kUnary};
  }
  return {"?", kUnary};
}

}  // namespace detail

inline std::string print_formula(const Formula& f) { return detail::render(f).first; }

// ---------------------------------------------------------------------------
// Free placeholders.

inline PlaceholderSet free_placeholders(const Formula& f, const std::set<std::string>& agents) {
  switch (f.kind()) {
    case NodeKind::Atom: return {};
    case NodeKind::Not: return free_placeholders(f.sub(), agents);
    case NodeKind::Or: {
      auto s = free_placeholders(f.left(), agents);
      auto r = free_placeholders(f.right(), agents);
      s.insert(r.begin(), r.end());
      return s;
    }
    case NodeKind::Next: {
      auto s = free_placeholders(f.sub(), agents);
      for (const auto& a : agents) s.insert(Placeholder::agent(a));
      return s;
    }
    case NodeKind::Until: {
      auto s = free_placeholders(f.left(), agents);
      auto r = free_placeholders(f.right(), agents);
      s.insert(r.begin(), r.end());
      for (const auto& a : agents) s.insert(Placeholder::agent(a));
      return s;
    }
    case NodeKind::Exists: {
      auto s = free_placeholders(f.sub(), agents);
      for (const auto& v : f.vars()) s.erase(Placeholder::variable(v));
      return s;
    }
    case NodeKind::Bind: {
      auto s = free_placeholders(f.sub(), agents);
      if (s.erase(Placeholder::agent(f.agent()))) s.insert(Placeholder::variable(f.var()));
      return s;
    }
  }
  return {};
}

inline bool is_sentence(const Formula& f, const std::set<std::string>& agents) {
  return free_placeholders(f, agents).empty();
}

inline bool agent_closed(const PlaceholderSet& s) {
  return std::none_of(s.begin(), s.end(), [](const Placeholder& p) { return p.is_agent(); });
}

// Quantifier- and binding-free formulas (LTL over the atoms).
inline bool is_temporal_only(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Atom: return true;
    case NodeKind::Not:
    case NodeKind::Next: return is_temporal_only(f.sub());
    case NodeKind::Or:
    case NodeKind::Until: return is_temporal_only(f.left()) && is_temporal_only(f.right());
    case NodeKind::Exists:
    case NodeKind::Bind: return false;
  }
  return false;
}

inline bool all_grades_finite(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Atom: return true;
    case NodeKind::Not:
    case NodeKind::Next:
    case NodeKind::Bind: return all_grades_finite(f.sub());
    case NodeKind::Or:
    case NodeKind::Until: return all_grades_finite(f.left()) && all_grades_finite(f.right());
    case NodeKind::Exists: return f.grade().is_finite() && all_grades_finite(f.sub());
  }
  return true;
}

inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case NodeKind::Atom:
      if (!f.is_true()) out.insert(f.atom());
      return;
    case NodeKind::Not:
    case NodeKind::Next:
    case NodeKind::Bind:
    case NodeKind::Exists: collect_atoms(f.sub(), out); return;
    case NodeKind::Or:
    case NodeKind::Until:
      collect_atoms(f.left(), out);
      collect_atoms(f.right(), out);
      return;
  }
}

// ---------------------------------------------------------------------------
// Quantifier chains. In desugared trees a universal quantifier is ¬∃¬, so a
// sequence of consecutive quantifiers is a chain of Exists nodes linked through
// negations; an odd number of negations between two links is a type switch.

struct QuantifierChain {
  struct Link {
    Formula node;          // the Exists node
    bool switches = false; // odd number of negations since the previous link
  };
  std::vector<Link> links;
  Formula body;  // sub-formula of the last link
};

inline QuantifierChain quantifier_chain(const Formula& head) {
  QuantifierChain c;
  c.links.push_back({head, false});
  Formula cur = head.sub();
  while (true) {
    int negs = 0;
    Formula probe = cur;
    while (probe.kind() == NodeKind::Not) {
      probe = probe.sub();
      ++negs;
    }
    if (probe.kind() != NodeKind::Exists) break;
    c.links.push_back({probe, negs % 2 == 1});
    cur = probe.sub();
  }
  c.body = cur;
  return c;
}

struct FragmentReport {
  bool is_sentence = false;
  bool is_nested_goal = false;
  bool is_one_goal = false;
  bool grades_all_finite = true;
  std::optional<unsigned> alternation_number;
  unsigned quantifier_rank = 0;
  unsigned quantifier_block_rank = 0;
};

namespace detail {

inline unsigned quantifier_rank(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Atom: return 0;
    case NodeKind::Not:
    case NodeKind::Next:
    case NodeKind::Bind: return quantifier_rank(f.sub());
    case NodeKind::Or:
    case NodeKind::Until: return std::max(quantifier_rank(f.left()), quantifier_rank(f.right()));
    case NodeKind::Exists: return 1 + quantifier_rank(f.sub());
  }
  return 0;
}

inline unsigned block_rank(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Atom: return 0;
    case NodeKind::Not:
    case NodeKind::Next:
    case NodeKind::Bind: return block_rank(f.sub());
    case NodeKind::Or:
    case NodeKind::Until: return std::max(block_rank(f.left()), block_rank(f.right()));
    case NodeKind::Exists: {
      auto chain = quantifier_chain(f);
      unsigned blocks = 1;
      for (std::size_t i = 1; i < chain.links.size(); ++i) blocks += chain.links[i].switches ? 1 : 0;
      return blocks + block_rank(chain.body);
    }
  }
  return 0;
}

// Nested-goal membership (without the top-level agent-closed requirement).
// Also accumulates the alternation number.
inline bool nested_goal(const Formula& f, const std::set<std::string>& agents, unsigned& alt) {
  switch (f.kind()) {
    case NodeKind::Atom: return true;
    case NodeKind::Not:
    case NodeKind::Next: return nested_goal(f.sub(), agents, alt);
    case NodeKind::Or:
    case NodeKind::Until: return nested_goal(f.left(), agents, alt) && nested_goal(f.right(), agents, alt);
    case NodeKind::Exists: {
      auto chain = quantifier_chain(f);
      std::multiset<std::string> bound;
      unsigned switches = 0;
      for (const auto& l : chain.links) {
        for (const auto& v : l.node.vars()) bound.insert(v);
        switches += l.switches ? 1 : 0;
      }
      auto fr = free_placeholders(chain.body, agents);
      if (!agent_closed(fr)) return false;
      std::multiset<std::string> need;
      for (const auto& p : fr) need.insert(p.name);
      if (bound != need) return false;
      alt = std::max(alt, switches);
      return nested_goal(chain.body, agents, alt);
    }
    case NodeKind::Bind: {
      // A binding prefix must bind every agent exactly once.
      std::vector<std::string> seen;
      Formula cur = f;
      while (cur.kind() == NodeKind::Bind && seen.size() < agents.size()) {
        if (std::find(seen.begin(), seen.end(), cur.agent()) != seen.end()) return false;
        seen.push_back(cur.agent());
        cur = cur.sub();
      }
      if (seen.size() != agents.size()) return false;
      return nested_goal(cur, agents, alt);
    }
  }
  return false;
}

inline bool binding_prefix(const Formula& f, const std::set<std::string>& agents, Formula& rest) {
  std::vector<std::string> seen;
  Formula cur = f;
  while (cur.kind() == NodeKind::Bind && seen.size() < agents.size()) {
    if (std::find(seen.begin(), seen.end(), cur.agent()) != seen.end()) return false;
    seen.push_back(cur.agent());
    cur = cur.sub();
  }
  if (seen.size() != agents.size()) return false;
  rest = cur;
  return true;
}

inline bool one_goal(const Formula& f, const std::set<std::string>& agents) {
  switch (f.kind()) {
    case NodeKind::Atom: return true;
    case NodeKind::Not:
    case NodeKind::Next: return one_goal(f.sub(), agents);
    case NodeKind::Or:
    case NodeKind::Until: return one_goal(f.left(), agents) && one_goal(f.right(), agents);
    case NodeKind::Exists: {
      auto chain = quantifier_chain(f);
      Formula after = chain.body;
      while (after.kind() == NodeKind::Not) after = after.sub();
      Formula rest;
      if (!binding_prefix(after, agents, rest)) return false;
      std::multiset<std::string> bound;
      for (const auto& l : chain.links)
        for (const auto& v : l.node.vars()) bound.insert(v);
      std::multiset<std::string> need;
      for (const auto& p : free_placeholders(after, agents)) need.insert(p.name);
      return bound == need && one_goal(rest, agents);
    }
    case NodeKind::Bind: {
      // Empty quantification prefix: the bound formula must be closed.
      Formula rest;
      if (!binding_prefix(f, agents, rest)) return false;
      return free_placeholders(f, agents).empty() && one_goal(rest, agents);
    }
  }
  return false;
}

}  // namespace detail

inline FragmentReport analyze_fragment(const Formula& f, const std::set<std::string>& agents) {
  FragmentReport r;
  auto fr = free_placeholders(f, agents);
  r.is_sentence = fr.empty();
  r.grades_all_finite = all_grades_finite(f);
  r.quantifier_rank = detail::quantifier_rank(f);
  r.quantifier_block_rank = detail::block_rank(f);
  unsigned alt = 0;
  r.is_nested_goal = agent_closed(fr) && detail::nested_goal(f, agents, alt);
  if (r.is_nested_goal) r.alternation_number = alt;
  r.is_one_goal = r.is_nested_goal && detail::one_goal(f, agents);
  return r;
}

// Alternation of an explicit prefix of quantifier types (true = existential).
inline unsigned prefix_alternation(const std::vector<bool>& existential) {
  unsigned n = 0;
  for (std::size_t i = 1; i < existential.size(); ++i) n += existential[i] != existential[i - 1] ? 1 : 0;
  return n;
}

// Renames free occurrences of variables according to `ren`.
inline Formula rename_variables(const Formula& f, const std::function<std::string(const std::string&)>& ren,
                                const std::set<std::string>& shadowed = {}) {
  switch (f.kind()) {
    case NodeKind::Atom: return f;
    case NodeKind::Not: return neg(rename_variables(f.sub(), ren, shadowed));
    case NodeKind::Next: return next(rename_variables(f.sub(), ren, shadowed));
    case NodeKind::Or: return lor(rename_variables(f.left(), ren, shadowed), rename_variables(f.right(), ren, shadowed));
    case NodeKind::Until:
      return until(rename_variables(f.left(), ren, shadowed), rename_variables(f.right(), ren, shadowed));
    case NodeKind::Exists: {
      auto inner = shadowed;
      inner.insert(f.vars().begin(), f.vars().end());
      return exists(f.vars(), f.grade(), rename_variables(f.sub(), ren, inner));
    }
    case NodeKind::Bind: {
      std::string v = shadowed.count(f.var()) ? f.var() : ren(f.var());
      return bind(f.agent(), v, rename_variables(f.sub(), ren, shadowed));
    }
  }
  return f;
}

}  // namespace gsl
