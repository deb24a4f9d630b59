// Acceptance suite: prints one PASS/FAIL line per criterion and exits non-zero
// if any criterion fails. Usage: acceptance <path to gslmc> <data dir>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "support.hpp"

using namespace gsl;
using support::Rng;
using support::below;
using support::coin;

namespace {

std::string g_cli;
std::string g_data;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

struct Run {
  int code = -1;
  std::string out;
};

Run run_cli(const std::vector<std::string>& args) {
  std::string cmd = quote(g_cli);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string data(const std::string& rel) { return g_data + "/" + rel; }

// Value of a "key: value" line in CLI output, or "" when absent.
std::string field(const std::string& out, const std::string& key) {
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + ": ", 0) == 0) return line.substr(key.size() + 2);
  return "";
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(int n, const char* name, const Outcome& o, bool& all) {
  std::cout << "[" << (o.pass ? "PASS" : "FAIL") << "] criterion " << n << " " << name << ": " << o.detail
            << std::endl;
  all = all && o.pass;
}

// ---------------------------------------------------------------------------
// Sentence generators.

struct SentenceGen {
  Rng& r;
  std::vector<std::string> agents;
  int max_grade = 3;
  int fresh = 0;

  Formula state_predicate() {
    Formula a = atom(coin(r) ? "p" : "q");
    if (coin(r, 30)) a = neg(a);
    if (coin(r, 20)) a = lor(a, atom(coin(r) ? "p" : "q"));
    return a;
  }

  // Sentence of quantifier rank at most `budget`.
  Formula sentence(int budget) {
    if (budget == 0 || coin(r, 15)) return state_predicate();
    int k = below(r, 10);
    if (k == 0) return neg(sentence(budget));
    if (k == 1) return lor(sentence(budget), sentence(budget));
    return quantified(budget);
  }

  Formula quantified(int budget) {
    int chain = budget >= 2 && coin(r, 40) ? 2 : 1;
    std::vector<std::vector<std::string>> tuples;
    std::vector<std::string> all;
    for (int i = 0; i < chain; ++i) {
      std::vector<std::string> t{"v" + std::to_string(fresh++)};
      if (coin(r, 20)) t.push_back("v" + std::to_string(fresh++));
      all.insert(all.end(), t.begin(), t.end());
      tuples.push_back(t);
    }
    Formula body = path(budget - chain, 2);
    for (auto it = agents.rbegin(); it != agents.rend(); ++it) body = bind(*it, support::choose(r, all), body);
    for (int i = chain - 1; i >= 0; --i) {
      Grade g = Grade::finite(static_cast<std::uint64_t>(below(r, max_grade + 1)));
      body = coin(r) ? exists(tuples[i], g, body) : forall(tuples[i], g, body);
    }
    return body;
  }

  Formula path(int budget, int depth) {
    if (depth == 0 || coin(r, 25)) return budget > 0 && coin(r, 30) ? sentence(budget) : state_predicate();
    switch (below(r, 5)) {
      case 0: return neg(path(budget, depth - 1));
      case 1: return lor(path(budget, depth - 1), path(budget, depth - 1));
      case 2: return next(path(budget, depth - 1));
      case 3: return until(path(budget, depth - 1), path(budget, depth - 1));
      default: return coin(r) ? eventually(path(budget, depth - 1)) : always(path(budget, depth - 1));
    }
  }

  Formula simple_goal() {
    Formula s = state_predicate(), t = state_predicate();
    Formula g;
    switch (below(r, 7)) {
      case 0: g = s; break;
      case 1: g = next(s); break;
      case 2: g = eventually(s); break;
      case 3: g = always(s); break;
      case 4: g = always(eventually(s)); break;
      case 5: g = eventually(always(s)); break;
      default: g = until(s, t); break;
    }
    return coin(r, 25) ? neg(g) : g;
  }

  // Quantification over distinct variables binding every agent, simple goal.
  Formula goal_sentence() {
    std::vector<std::string> vars;
    for (std::size_t i = 0; i < agents.size(); ++i) vars.push_back("v" + std::to_string(fresh++));
    Formula body = simple_goal();
    std::vector<std::string> order = vars;
    if (order.size() == 2 && coin(r)) std::swap(order[0], order[1]);
    for (std::size_t i = agents.size(); i-- > 0;) body = bind(agents[i], order[i], body);
    auto grade = [&] { return Grade::finite(static_cast<std::uint64_t>(below(r, max_grade + 1))); };
    if (vars.size() == 2 && coin(r)) {
      body = coin(r) ? exists({vars[1]}, grade(), body) : forall({vars[1]}, grade(), body);
      return coin(r) ? exists({vars[0]}, grade(), body) : forall({vars[0]}, grade(), body);
    }
    return coin(r) ? exists(vars, grade(), body) : forall(vars, grade(), body);
  }

  Formula goal_combination() {
    Formula f = goal_sentence();
    int k = below(r, 6);
    if (k == 0) return neg(f);
    if (k == 1) return lor(f, goal_sentence());
    if (k == 2) return land(f, state_predicate());
    return f;
  }
};

Cgs single_action_model(Rng& r) {
  support::ModelShape shape{2 + below(r, 5), 1 + below(r, 2), 1};
  return support::random_model(r, shape);
}

std::uint64_t max_grade(const Formula& f) {
  switch (f.kind()) {
    case NodeKind::Atom: return 0;
    case NodeKind::Not:
    case NodeKind::Next:
    case NodeKind::Bind: return max_grade(f.sub());
    case NodeKind::Or:
    case NodeKind::Until: return std::max(max_grade(f.left()), max_grade(f.right()));
    case NodeKind::Exists: return std::max(f.grade().n, max_grade(f.sub()));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Criterion 1: exact oracle verdicts agree with the pipeline.

Outcome criterion_oracle() {
  auto t0 = Clock::now();
  Rng r(1001);
  int exact = 0, agree = 0, inexact = 0, skipped = 0, true_verdicts = 0, rank2 = 0, graded = 0;
  std::string first_mismatch;
  CompileOptions opt;
  opt.budget = 200000;
  auto run = [&](const Cgs& g, const Formula& f) {
    OracleVerdict o;
    try {
      o = oracle_check(g, f);
    } catch (const ResourceError&) {
      ++skipped;
      return;
    }
    if (!o.exact) {
      ++inexact;
      return;
    }
    bool p;
    try {
      p = holds(g, f, {}, opt);
    } catch (const ResourceError&) {
      ++skipped;
      return;
    }
    ++exact;
    true_verdicts += p;
    rank2 += analyze_fragment(f, g.agent_set()).quantifier_rank == 2;
    graded += max_grade(f) >= 2;
    if (p == o.value) ++agree;
    else if (first_mismatch.empty()) first_mismatch = print_formula(f);
  };

  for (int i = 0; i < 40; ++i) {
    Cgs g = single_action_model(r);
    SentenceGen gen{r, g.agents};
    Formula f = gen.sentence(2);
    while (analyze_fragment(f, g.agent_set()).quantifier_rank == 0) f = gen.sentence(2);
    run(g, f);
  }
  for (int i = 0; i < 30; ++i) {
    Cgs g = support::random_model(r, {2 + below(r, 2), 1 + below(r, 2), 2});
    SentenceGen gen{r, g.agents};
    gen.max_grade = 2;
    run(g, gen.goal_combination());
  }
  for (int i = 0; i < 10; ++i) {
    auto t = support::random_turn_based(r, 6);
    run(t.cgs, parse_formula("<<x>> [[y]] (a,x)(b,y) F p", t.cgs.agent_set()));
  }
  double secs = seconds_since(t0);
  Outcome o;
  o.pass = exact >= 50 && agree == exact && secs < 300;
  std::ostringstream d;
  d << agree << "/" << exact << " exact instances agree (" << true_verdicts << " true, " << rank2 << " of rank 2, "
    << graded << " with a grade >= 2; " << inexact << " lower-bound-only, " << skipped << " over budget), " << secs
    << " s";
  if (!first_mismatch.empty()) d << "; first mismatch: " << first_mismatch;
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 2: negation flips the verdict.

Outcome criterion_duality() {
  Rng r(1002);
  int ok = 0, total = 0;
  std::string bad;
  for (int i = 0; i < 30; ++i) {
    bool single = i % 3 == 0;
    Cgs g = single ? single_action_model(r) : support::random_model(r, {2 + below(r, 2), 2, 2});
    SentenceGen gen{r, g.agents};
    gen.max_grade = 2;
    Formula f = gen.sentence(2);
    ++total;
    bool a = holds(g, f), b = holds(g, neg(f));
    if (a != b) ++ok;
    else if (bad.empty()) bad = print_formula(f);
  }
  Outcome o;
  o.pass = ok == total && total == 30;
  o.detail = std::to_string(ok) + "/" + std::to_string(total) + " sentences complementary";
  if (!bad.empty()) o.detail += "; first failure: " + bad;
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 3: graded-quantifier laws.

Outcome criterion_graded() {
  Rng r(1003);
  std::vector<Cgs> models{load_cgs_file(data("models/pennies.json")), load_cgs_file(data("models/dictator.json")),
                          load_cgs_file(data("models/single_action.json"))};
  for (int i = 0; i < 3; ++i) models.push_back(support::random_model(r, {3, 2, 2}));
  for (int i = 0; i < 2; ++i) models.push_back(support::random_model(r, {2 + below(r, 3), 2, 1}));
  const std::vector<std::string> bodies{"[[y]] (a,x)(b,y) F p", "(a,x)(b,x) X p", "<<y>> (a,x)(b,y) G q",
                                        "(a,x)(b,x) true"};
  CompileOptions plain;
  plain.distinctness = false;
  plain.short_circuit = false;
  int laws = 0, broken = 0;
  std::string first;
  auto law = [&](bool ok, const std::string& what) {
    ++laws;
    if (!ok) {
      ++broken;
      if (first.empty()) first = what;
    }
  };
  for (const auto& g : models) {
    for (const auto& b : bodies) {
      Formula body = parse_formula(b, g.agent_set());
      std::vector<bool> v;
      for (std::uint64_t k = 0; k <= 3; ++k) v.push_back(holds(g, exists({"x"}, Grade::finite(k), body)));
      const std::string tag = b + " on a " + std::to_string(g.num_states()) + "-state model";
      law(v[0], "grade 0 false: " + tag);
      law(v[1] == holds(g, exists({"x"}, Grade::finite(1), body), {}, plain), "grade 1 differs: " + tag);
      law(v[0] >= v[1] && v[1] >= v[2] && v[2] >= v[3], "increasing: " + tag);
      if (g.num_actions() == 1) law(!v[2], "single-action grade 2 holds: " + tag);
    }
  }
  Outcome o;
  o.pass = broken == 0;
  o.detail = std::to_string(laws - broken) + "/" + std::to_string(laws) + " law instances hold";
  if (!first.empty()) o.detail += "; first violation: " + first;
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 4: automata toolkit.

Outcome criterion_automata() {
  Rng r(1004);
  int nd_ok = 0, nd_total = 0;
  for (int i = 0; i < 30; ++i) {
    Alphabet al = Alphabet::plain(1 + below(r, 2), 1 + below(r, 2));
    Apt a = support::random_apt(r, 1 + below(r, 4), 1 + below(r, 3), al);
    Npt n = nondeterminize(a);
    for (int k = 0; k < 10; ++k) {
      auto t = support::random_tree(r, 1 + below(r, 3), al.num_letters(), al.num_directions);
      ++nd_total;
      nd_ok += member(a, t) == member(n.apt(), t);
    }
  }
  int pg_ok = 0;
  for (int i = 0; i < 200; ++i) {
    ParityGame g = support::random_game(r, 1 + below(r, 8), 1 + below(r, 5));
    pg_ok += solve_zielonka(g).winner == solve_fixpoint(g);
  }
  int dist_ok = 0, dist_total = 0;
  for (int copies : {2, 3}) {
    Alphabet al = Alphabet::plain(1, 2);
    std::vector<std::vector<std::string>> grid;
    for (int i = 0; i < copies; ++i) {
      al.coords.push_back("c" + std::to_string(i));
      grid.push_back({al.coords.back()});
    }
    al.num_values = 2;
    Apt a = distinctness_apt(al, grid);
    for (const auto& t : support::all_trees(2, al.num_letters(), 2)) {
      bool want = true;
      for (int i = 0; i < copies; ++i)
        for (int j = i + 1; j < copies; ++j)
          want = want && support::some_node(t, [&](int l) {
                   int f = al.valuation_of(l);
                   return al.value(f, i) != al.value(f, j);
                 });
      ++dist_total;
      dist_ok += member(a, t) == want;
    }
  }
  Outcome o;
  o.pass = nd_ok == nd_total && nd_total == 300 && pg_ok == 200 && dist_ok == dist_total;
  o.detail = "nondeterminize " + std::to_string(nd_ok) + "/" + std::to_string(nd_total) + ", parity games " +
             std::to_string(pg_ok) + "/200, distinctness " + std::to_string(dist_ok) + "/" +
             std::to_string(dist_total);
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 5: solution concepts.

Outcome criterion_solutions() {
  std::vector<std::string> notes;
  bool ok = true;

  // Degenerate single-action family through the CLI.
  Run gen = run_cli({"gen", "unique-ne", "-m", data("models/single_action.json"), "-o",
                     data("objectives/single_action.json")});
  std::string sentence = gen.out.substr(0, gen.out.find('\n'));
  Run chk = run_cli({"check", "-m", data("models/single_action.json"), "-f", sentence});
  Run cnt = run_cli({"oracle", "-m", data("models/single_action.json"), "--count-ne",
                     data("objectives/single_action.json")});
  bool single_ok = gen.code == 0 && chk.code == 0 && chk.out.rfind("HOLDS", 0) == 0 && field(cnt.out, "ne-count") == "1";
  ok = ok && single_ok;
  notes.push_back(std::string("single-action unique-ne ") + (single_ok ? "HOLDS with count 1" : "mismatch"));

  // Two-action models: verdicts against memoryless equilibrium counts.
  struct Case {
    const char* model;
    const char* objectives;
  };
  for (Case c : {Case{"pennies", "pennies"}, Case{"dictator", "dictator"}, Case{"pennies", "pennies_two_goals"}}) {
    Cgs g = load_cgs_file(data(std::string("models/") + c.model + ".json"));
    Objectives obj = load_objectives(g, read_text_file(data(std::string("objectives/") + c.objectives + ".json")));
    Formula ne = ne_formula(g, obj);
    auto xs = profile_names(g).x;
    bool unique = holds(g, uniqueness_formula(ne, xs, g.agent_set()));
    bool exists_ne = holds(g, exists(xs, Grade::finite(1), ne));
    std::size_t count = count_ne_memoryless(g, obj);
    bool match = unique == (count == 1) && exists_ne == (count > 0);
    ok = ok && match;
    notes.push_back(std::string(c.objectives) + " count " + std::to_string(count) + (unique ? " unique" : " not unique") +
                    (match ? "" : " MISMATCH"));
  }

  // Winning-count generator against the displayed shape.
  Cgs maze = load_cgs_file(data("models/maze.json"));
  Run wc = run_cli({"gen", "winning-count", "-m", data("models/maze.json"), "--protagonist", "Robber", "--goal",
                    "F exit", "--k", "2"});
  Formula shown = parse_formula(
      "<<x>>^>=2 [[y]] (Robber,x)(Cop,y) F exit && !<<x>>^>=3 [[y]] (Robber,x)(Cop,y) F exit", maze.agent_set());
  bool shape = wc.code == 0 && support::same_ast(parse_formula(wc.out.substr(0, wc.out.find('\n')), maze.agent_set()), shown);
  ok = ok && shape;
  notes.push_back(shape ? "winning-count shape verbatim" : "winning-count shape differs");

  Outcome o;
  o.pass = ok;
  for (std::size_t i = 0; i < notes.size(); ++i) o.detail += (i ? "; " : "") + notes[i];
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 6: structure of the unique-NE check.

Outcome criterion_structure() {
  auto t0 = Clock::now();
  Run gen = run_cli({"gen", "unique-ne", "-m", data("models/pennies.json"), "-o", data("objectives/pennies.json")});
  std::string sentence = gen.out.substr(0, gen.out.find('\n'));
  Run chk = run_cli({"check", "--stats", "-m", data("models/pennies.json"), "-f", sentence});
  double secs = seconds_since(t0);
  std::string rank = field(chk.out, "quantifier-block-rank");
  std::string stages = field(chk.out, "nondeterminization-stages");
  std::string calls = field(chk.out, "nondeterminization-calls");
  Outcome o;
  bool completed = chk.code == 0 || chk.code == 1;
  o.pass = gen.code == 0 && completed && rank == "2" && stages == "2" && secs < 600;
  o.detail = "block rank " + rank + ", nondeterminization stages " + stages + " (" + calls + " calls), exit " +
             std::to_string(chk.code) + ", " + std::to_string(secs) + " s";
  return o;
}

// ---------------------------------------------------------------------------
// Criterion 7: infinite grades.

Outcome criterion_infinite() {
  bool ok = true;
  std::string detail;
  for (const char* g : {"aleph0", "aleph1", "cont"}) {
    std::string f = std::string("<<x>>^>=") + g + " [[y]] (a,x)(b,y) F p";
    bool parsed = true;
    try {
      parse_formula(f, {"a", "b"});
    } catch (const ParseError&) {
      parsed = false;
    }
    Run info = run_cli({"info", "-m", data("models/pennies.json"), "-f", f});
    Run chk = run_cli({"check", "-m", data("models/pennies.json"), "-f", f});
    bool this_ok = parsed && info.code == 0 && field(info.out, "grades-finite") == "no" && chk.code == 4 &&
                   chk.out.find("infinite grades unsupported") != std::string::npos;
    ok = ok && this_ok;
    detail += std::string(detail.empty() ? "" : ", ") + g + (this_ok ? " ok" : " FAILED");
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <gslmc> <data dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_data = argv[2];
  bool all = true;
  report(1, "oracle cross-validation", criterion_oracle(), all);
  report(2, "duality", criterion_duality(), all);
  report(3, "graded-quantifier laws", criterion_graded(), all);
  report(4, "automata toolkit", criterion_automata(), all);
  report(5, "solution concepts", criterion_solutions(), all);
  report(6, "structural complexity", criterion_structure(), all);
  report(7, "infinite grades", criterion_infinite(), all);
  return all ? 0 : 1;
}
