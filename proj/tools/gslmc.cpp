// gslmc: model checking, fragment reports, formula generation and the
// brute-force oracle from the command line.
//
// Exit codes: 0 holds, 1 fails, 2 parse or usage error, 3 invalid model or
// document, 4 unsupported grade or exhausted budget, 5 inexact oracle verdict
// under --require-exact.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gsl/gsl.hpp"

namespace {

enum Exit { kHolds = 0, kFails = 1, kUsage = 2, kModel = 3, kLimit = 4, kInexact = 5 };

struct FormulaSource {
  std::string inline_text;
  std::string file;

  std::string text() const {
    if (!inline_text.empty() && !file.empty()) throw gsl::UsageError("give either -f or -F, not both");
    if (!file.empty()) {
      std::string s;
      try {
        s = gsl::read_text_file(file);
      } catch (const gsl::ModelError& e) {
        throw gsl::UsageError(e.what());
      }
      while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
      return s;
    }
    if (inline_text.empty()) throw gsl::UsageError("no formula given (-f or -F)");
    return inline_text;
  }
};

void add_formula_options(CLI::App* cmd, FormulaSource& src) {
  cmd->add_option("-f,--formula", src.inline_text, "Formula text");
  cmd->add_option("-F,--formula-file", src.file, "File holding one formula");
}

std::string join(const std::vector<std::string>& v, const char* sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::string placeholders_text(const gsl::PlaceholderSet& ps) {
  std::vector<std::string> v;
  for (const auto& p : ps) v.push_back(p.name + (p.is_agent() ? " (agent)" : ""));
  return "{" + join(v) + "}";
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

void print_fragment(const gsl::FragmentReport& r) {
  std::cout << "sentence: " << yes_no(r.is_sentence) << "\n"
            << "nested-goal: " << yes_no(r.is_nested_goal) << "\n"
            << "one-goal: " << yes_no(r.is_one_goal) << "\n"
            << "grades-finite: " << yes_no(r.grades_all_finite) << "\n"
            << "alternation-number: "
            << (r.alternation_number ? std::to_string(*r.alternation_number) : std::string("undefined")) << "\n"
            << "quantifier-rank: " << r.quantifier_rank << "\n"
            << "quantifier-block-rank: " << r.quantifier_block_rank << "\n";
}

// ---------------------------------------------------------------------------

struct CheckArgs {
  std::string model;
  FormulaSource formula;
  std::string assign;
  std::string emit_dir;
  std::size_t budget = gsl::kDefaultStateBudget;
  bool stats = false;
  bool per_quantifier = false;
  bool no_distinctness = false;
};

int run_check(const CheckArgs& a) {
  gsl::Cgs g = gsl::load_cgs_file(a.model);
  gsl::Formula f = gsl::parse_formula(a.formula.text(), g.agent_set());
  gsl::FiniteAssignment chi;
  if (!a.assign.empty()) chi = gsl::load_assignment(g, gsl::read_text_file(a.assign));
  gsl::CheckOptions opt;
  opt.compile.budget = a.budget;
  opt.compile.block = !a.per_quantifier;
  opt.compile.distinctness = !a.no_distinctness;
  opt.emit_dir = a.emit_dir;
  auto rep = gsl::check(g, f, chi, opt);
  std::cout << (rep.holds ? "HOLDS" : "FAILS") << "\n";
  if (a.stats) {
    std::cout << "quantifier-rank: " << rep.fragment.quantifier_rank << "\n"
              << "quantifier-block-rank: " << rep.fragment.quantifier_block_rank << "\n"
              << "alternation-number: "
              << (rep.fragment.alternation_number ? std::to_string(*rep.fragment.alternation_number)
                                                  : std::string("undefined"))
              << "\n"
              << "nondeterminization-stages: " << rep.nondeterminization_depth << "\n"
              << "nondeterminization-calls: " << rep.nondeterminization_count << "\n";
    for (std::size_t i = 0; i < rep.stages.size(); ++i) {
      const auto& s = rep.stages[i];
      std::cout << "stage " << i + 1 << " depth " << s.depth << " " << s.step << ": " << s.states_in << " -> "
                << s.states_out << " states\n";
      std::fprintf(stderr, "stage %zu time %.3f ms\n", i + 1, s.millis);
    }
    std::cout << "automaton-states: " << rep.automaton_states << "\n"
              << "membership-game-vertices: " << rep.game_vertices << "\n";
  }
  return rep.holds ? kHolds : kFails;
}

// ---------------------------------------------------------------------------

struct InfoArgs {
  std::string model;
  std::vector<std::string> agents;
  FormulaSource formula;
};

int run_info(const InfoArgs& a) {
  std::set<std::string> agents(a.agents.begin(), a.agents.end());
  if (!a.model.empty()) {
    auto g = gsl::load_cgs_file(a.model);
    agents = g.agent_set();
  }
  if (agents.empty()) throw gsl::UsageError("agent names needed: give -m or --agents");
  gsl::Formula f = gsl::parse_formula(a.formula.text(), agents);
  std::cout << "formula: " << gsl::print_formula(f) << "\n"
            << "free: " << placeholders_text(gsl::free_placeholders(f, agents)) << "\n";
  print_fragment(gsl::analyze_fragment(f, agents));
  if (!gsl::all_grades_finite(f)) std::cout << "note: infinite grades unsupported by check\n";
  return kHolds;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::string model;
  std::string objectives;
  std::string protagonist;
  std::string goal;
  std::uint64_t k = 2;
  bool general = false;
  bool no_simplify = false;
};

int run_gen(const GenArgs& a) {
  gsl::Cgs g = gsl::load_cgs_file(a.model);
  gsl::Formula out;
  if (a.kind == "winning-count") {
    if (a.protagonist.empty() || a.goal.empty()) throw gsl::UsageError("winning-count needs --protagonist and --goal");
    out = gsl::winning_count_formula(g, a.protagonist, gsl::parse_formula(a.goal, g.agent_set()), a.k);
  } else {
    if (a.objectives.empty()) throw gsl::UsageError(a.kind + " needs --objectives");
    auto obj = gsl::load_objectives(g, gsl::read_text_file(a.objectives));
    gsl::Formula ne =
        a.general ? gsl::ne_formula_general(g, obj, !a.no_simplify) : gsl::ne_formula(g, obj, !a.no_simplify);
    const auto xs = gsl::profile_names(g).x;
    if (a.kind == "ne") out = ne;
    else if (a.kind == "spe") out = gsl::spe_formula(g, ne);
    else if (a.kind == "unique-ne") out = gsl::uniqueness_formula(ne, xs, g.agent_set());
    else if (a.kind == "unique-spe") out = gsl::uniqueness_formula(gsl::spe_formula(g, ne), xs, g.agent_set());
    else throw gsl::UsageError("unknown kind '" + a.kind + "'");
  }
  std::cout << gsl::print_formula(out) << "\n";
  return kHolds;
}

// ---------------------------------------------------------------------------

struct OracleArgs {
  std::string model;
  FormulaSource formula;
  std::string assign;
  std::string count_ne;
  std::string count_spe;
  std::string justify;
  int memory = 1;
  std::size_t budget = 1000000;
  bool require_exact = false;
};

int run_oracle(const OracleArgs& a) {
  gsl::Cgs g = gsl::load_cgs_file(a.model);
  if (!a.count_ne.empty() || !a.count_spe.empty()) {
    if (!a.count_ne.empty())
      std::cout << "ne-count: "
                << gsl::count_ne_memoryless(g, gsl::load_objectives(g, gsl::read_text_file(a.count_ne)), a.budget)
                << "\n";
    if (!a.count_spe.empty())
      std::cout << "spe-count: "
                << gsl::count_spe_memoryless(g, gsl::load_objectives(g, gsl::read_text_file(a.count_spe)), a.budget)
                << "\n";
    return kHolds;
  }
  gsl::Formula f = gsl::parse_formula(a.formula.text(), g.agent_set());
  gsl::check_atoms(g, f);
  gsl::FiniteAssignment chi;
  if (!a.assign.empty()) chi = gsl::load_assignment(g, gsl::read_text_file(a.assign));
  gsl::OracleOptions opt;
  opt.memory = a.memory;
  opt.budget = a.budget;
  if (a.justify == "none") opt.justification = gsl::Justification::None;
  else if (a.justify == "single-action") opt.justification = gsl::Justification::SingleAction;
  else if (a.justify == "memoryless") opt.justification = gsl::Justification::MemorylessDetermined;
  else if (!a.justify.empty()) throw gsl::UsageError("unknown justification '" + a.justify + "'");
  auto v = gsl::oracle_check(g, f, opt, chi);
  std::cout << (v.value ? "HOLDS" : "FAILS") << "\n"
            << "confidence: " << (v.exact ? "exact" : "lower-bound-only") << "\n"
            << "justification: " << gsl::to_string(v.justification) << "\n";
  if (a.require_exact && !v.exact) return kInexact;
  return v.value ? kHolds : kFails;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const gsl::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const gsl::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const gsl::ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return kModel;
  } catch (const gsl::UnsupportedGrade& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLimit;
  } catch (const gsl::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kLimit;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model checker for graded strategy logic with finite grades"};
  app.require_subcommand(1);
  int code = kHolds;

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Decide a sentence (or a formula under --assign) on a model");
  check->add_option("-m,--model", ca.model, "Model file")->required();
  add_formula_options(check, ca.formula);
  check->add_option("--assign", ca.assign, "Finite strategies for the free placeholders");
  check->add_flag("--stats", ca.stats, "Print ranks and pipeline stage sizes (timings go to stderr)");
  check->add_option("--emit-stage", ca.emit_dir, "Dump every pipeline automaton into this directory");
  check->add_option("--budget", ca.budget, "State budget of each alternation removal");
  check->add_flag("--per-quantifier", ca.per_quantifier, "One alternation removal per quantifier, not per block");
  check->add_flag("--no-distinctness", ca.no_distinctness, "Drop the distinctness conjunct (differential testing)");
  check->callback([&] { code = guarded([&] { return run_check(ca); }); });

  InfoArgs ia;
  auto* info = app.add_subcommand("info", "Report free placeholders, fragments and ranks");
  info->add_option("-m,--model", ia.model, "Model file supplying agent names");
  info->add_option("--agents", ia.agents, "Agent names")->delimiter(',');
  add_formula_options(info, ia.formula);
  info->callback([&] { code = guarded([&] { return run_info(ia); }); });

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate equilibrium and counting formulas");
  gen->add_option("kind", ga.kind, "ne | spe | unique-ne | unique-spe | winning-count")
      ->required()
      ->check(CLI::IsMember({"ne", "spe", "unique-ne", "unique-spe", "winning-count"}));
  gen->add_option("-m,--model", ga.model, "Model file")->required();
  gen->add_option("-o,--objectives", ga.objectives, "Objectives file");
  gen->add_option("--protagonist", ga.protagonist, "Agent whose winning strategies are counted");
  gen->add_option("--goal", ga.goal, "LTL goal of the protagonist");
  gen->add_option("--k", ga.k, "Exact number of winning strategies");
  gen->add_flag("--general", ga.general, "Use the payoff-table form even for single win/lose goals");
  gen->add_flag("--no-simplify", ga.no_simplify, "Keep conjuncts whose good set is full");
  gen->callback([&] { code = guarded([&] { return run_gen(ga); }); });

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Brute-force evaluation over bounded-memory strategies");
  oracle->add_option("-m,--model", oa.model, "Model file")->required();
  add_formula_options(oracle, oa.formula);
  oracle->add_option("--assign", oa.assign, "Finite strategies for the free placeholders");
  oracle->add_option("--memory", oa.memory, "Memory bound of enumerated strategies");
  oracle->add_option("--budget", oa.budget, "Enumeration budget");
  oracle->add_option("--justify", oa.justify, "Override the detected justification")
      ->check(CLI::IsMember({"none", "single-action", "memoryless"}));
  oracle->add_flag("--require-exact", oa.require_exact, "Exit 5 unless the verdict is exact");
  oracle->add_option("--count-ne", oa.count_ne, "Objectives file: count memoryless pure NE");
  oracle->add_option("--count-spe", oa.count_spe, "Objectives file: count memoryless pure SPE");
  oracle->callback([&] { code = guarded([&] { return run_oracle(oa); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  return code;
}
