#include "tpatch/reductions.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

#include "tpatch/error.hpp"

namespace tpatch {

bool CNF::is_monotone() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const auto& c) {
    return std::all_of(c.begin(), c.end(), [](const CnfLiteral& l) { return !l.negated; }) ||
           std::all_of(c.begin(), c.end(), [](const CnfLiteral& l) { return l.negated; });
  });
}

CNF CNF::collapsed() const {
  CNF out{variables, {}};
  for (const auto& c : clauses) {
    std::vector<CnfLiteral> kept;
    for (const auto& l : c) {
      if (std::find(kept.begin(), kept.end(), l) == kept.end()) kept.push_back(l);
    }
    out.clauses.push_back(std::move(kept));
  }
  return out;
}

CNF parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> n_vars;
  std::size_t n_clauses = 0;
  std::vector<std::string> names;
  CNF cnf;
  std::vector<CnfLiteral> current;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream words(line);
    std::string first;
    if (!(words >> first)) continue;
    if (first == "c") {
      std::string tag;
      if (words >> tag && tag == "names") {
        std::string n;
        while (words >> n) names.push_back(n);
      }
      continue;
    }
    if (first == "%") break;  // end marker used by some benchmark sets
    if (first == "p") {
      std::string fmt;
      long long v = -1;
      long long c = -1;
      if (n_vars || !(words >> fmt >> v >> c) || fmt != "cnf" || v < 0 || c < 0) {
        throw ParseError(line_no, 1, "bad problem line");
      }
      n_vars = static_cast<std::size_t>(v);
      n_clauses = static_cast<std::size_t>(c);
      continue;
    }
    if (!n_vars) throw ParseError(line_no, 1, "clause before the problem line");
    std::istringstream ints(line);
    std::string tok;
    while (ints >> tok) {
      long long lit = 0;
      try {
        std::size_t used = 0;
        lit = std::stoll(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError(line_no, 1, "bad literal '" + tok + "'");
      }
      if (lit == 0) {
        cnf.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      const auto var = static_cast<std::size_t>(lit < 0 ? -lit : lit);
      if (var > *n_vars) throw ParseError(line_no, 1, "variable " + tok + " out of range");
      current.push_back(CnfLiteral{var - 1, lit < 0});
    }
  }
  if (!n_vars) throw InputError("missing problem line");
  if (!current.empty()) cnf.clauses.push_back(std::move(current));
  if (cnf.clauses.size() != n_clauses) {
    throw InputError("problem line announces " + std::to_string(n_clauses) + " clauses, found " +
                     std::to_string(cnf.clauses.size()));
  }
  if (!names.empty() && names.size() != *n_vars) {
    throw InputError("names comment lists " + std::to_string(names.size()) + " names for " +
                     std::to_string(*n_vars) + " variables");
  }
  for (std::size_t i = 0; i < *n_vars; ++i) {
    cnf.variables.push_back(names.empty() ? "x" + std::to_string(i + 1) : names[i]);
  }
  return cnf;
}

std::string write_dimacs(const CNF& cnf) {
  std::ostringstream out;
  bool default_names = true;
  for (std::size_t i = 0; i < cnf.variables.size(); ++i) {
    if (cnf.variables[i] != "x" + std::to_string(i + 1)) default_names = false;
  }
  if (!default_names) {
    out << "c names";
    for (const auto& v : cnf.variables) out << ' ' << v;
    out << '\n';
  }
  out << "p cnf " << cnf.variables.size() << ' ' << cnf.clauses.size() << '\n';
  for (const auto& c : cnf.clauses) {
    for (const auto& l : c) out << (l.negated ? "-" : "") << l.var + 1 << ' ';
    out << "0\n";
  }
  return out.str();
}

bool satisfies(const CNF& cnf, const Assignment& a) {
  if (a.size() != cnf.variables.size()) throw InputError("assignment size mismatch");
  return std::all_of(cnf.clauses.begin(), cnf.clauses.end(), [&](const auto& c) {
    return std::any_of(c.begin(), c.end(), [&](const CnfLiteral& l) { return a[l.var] != l.negated; });
  });
}

std::optional<Assignment> cnf_sat_oracle(const CNF& cnf, std::size_t budget) {
  const std::size_t n = cnf.variables.size();
  if (n > budget) {
    throw BudgetExceeded("CNF oracle: " + std::to_string(n) + " variables exceed the budget of " +
                         std::to_string(budget));
  }
  Assignment a(n, false);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) a[i] = (mask >> (n - 1 - i)) & 1U;
    if (satisfies(cnf, a)) return a;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Propositional construction

namespace {

std::vector<bool> occurring(const CNF& cnf) {
  std::vector<bool> seen(cnf.variables.size(), false);
  for (const auto& c : cnf.clauses) {
    for (const auto& l : c) {
      if (l.var >= seen.size()) throw InputError("literal names an unknown variable");
      seen[l.var] = true;
    }
  }
  return seen;
}

ComponentId selector_literal(const std::string& var) { return ComponentId::lit(var, 0, 0); }

}  // namespace

SatInstance sat_to_ppatch(const CNF& input) {
  if (input.clauses.empty()) throw InputError("the formula has no clauses");
  const CNF cnf = input.collapsed();
  const auto seen = occurring(cnf);

  std::set<std::string> reserved{"r"};
  for (std::size_t i = 0; i < cnf.clauses.size(); ++i) reserved.insert("d" + std::to_string(i + 1));
  for (std::size_t v = 0; v < cnf.variables.size(); ++v) {
    if (seen[v]) reserved.insert("sel_" + cnf.variables[v]);
  }
  for (std::size_t v = 0; v < cnf.variables.size(); ++v) {
    if (seen[v] && reserved.count(cnf.variables[v])) {
      throw InputError("variable name '" + cnf.variables[v] + "' clashes with a generated name");
    }
  }

  std::vector<Clause> clauses;
  Clause root{"r", {}, false};
  for (std::size_t i = 0; i < cnf.clauses.size(); ++i) {
    root.body.push_back(Literal{"d" + std::to_string(i + 1), false, false});
  }
  clauses.push_back(std::move(root));
  for (std::size_t i = 0; i < cnf.clauses.size(); ++i) {
    for (const auto& l : cnf.clauses[i]) {
      clauses.push_back(
          Clause{"d" + std::to_string(i + 1), {Literal{cnf.variables[l.var], l.negated, false}}, false});
    }
  }
  std::vector<std::string> primitives;
  std::set<ComponentId> open;
  for (std::size_t v = 0; v < cnf.variables.size(); ++v) {
    if (!seen[v]) continue;
    const auto& name = cnf.variables[v];
    clauses.push_back(Clause{name, {Literal{"sel_" + name, false, false}}, false});
    primitives.push_back("sel_" + name);
    open.insert(selector_literal(name));
  }
  Theory theory("r", std::move(clauses), std::move(primitives));
  return SatInstance{PatchableTheory(std::move(theory), std::move(open), RevisionPolicy::DeletionOnly),
                     {LabeledExample{Example{}, true}}};
}

std::set<ComponentId> assignment_to_deletions(const CNF& cnf, const Assignment& a) {
  if (a.size() != cnf.variables.size()) throw InputError("assignment size mismatch");
  const auto seen = occurring(cnf);
  std::set<ComponentId> out;
  for (std::size_t v = 0; v < a.size(); ++v) {
    if (seen[v] && a[v]) out.insert(selector_literal(cnf.variables[v]));
  }
  return out;
}

Assignment deletions_to_assignment(const CNF& cnf, const std::set<ComponentId>& deleted) {
  Assignment a(cnf.variables.size(), false);
  for (std::size_t v = 0; v < a.size(); ++v) {
    a[v] = deleted.count(selector_literal(cnf.variables[v])) > 0;
  }
  return a;
}

// ---------------------------------------------------------------------------
// First-order constructions

namespace {

std::vector<Term> full_vector(std::size_t n) {
  std::vector<Term> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Term::var("X" + std::to_string(i + 1)));
  out.push_back(Term::var("W"));
  return out;
}

std::string q_name(std::size_t i) { return "q" + std::to_string(i + 1); }

FOLiteral pos(std::string pred, std::vector<Term> args) {
  return FOLiteral{Atom{std::move(pred), std::move(args)}, false, false};
}

// One example per conjunct: positive conjuncts give negative examples with
// the conjunct's variables and w at 0; negative conjuncts give positive
// examples with the conjunct's variables at 0 and everything else at 1.
std::vector<FOLabeledExample> conjunct_examples(const CNF& cnf) {
  const std::size_t n = cnf.variables.size();
  std::vector<FOLabeledExample> out;
  for (const auto& c : cnf.clauses) {
    const bool negative = !c.empty() && c.front().negated;
    std::vector<std::string> args(n + 1, "1");
    for (const auto& l : c) args[l.var] = "0";
    if (!negative) args[n] = "0";
    out.push_back({FOExample{std::move(args)}, negative});
  }
  return out;
}

void require_monotone(const CNF& cnf) {
  if (cnf.variables.empty()) throw InputError("the formula has no variables");
  if (!cnf.is_monotone()) throw InputError("the formula is not monotone");
  occurring(cnf);
}

std::set<ComponentId> open_q_literals(std::size_t n) {
  std::set<ComponentId> open;
  for (std::size_t i = 0; i < n; ++i) open.insert(ComponentId::lit(q_name(i), 0, 0));
  return open;
}

}  // namespace

FOSatInstance monotone_sat_to_fpatch_ground(const CNF& input) {
  require_monotone(input);
  const CNF cnf = input.collapsed();
  const std::size_t n = cnf.variables.size();
  const auto v = full_vector(n);
  const Term w = v.back();

  std::vector<FOClause> clauses;
  clauses.push_back(FOClause{Atom{"r", v}, {pos("s", v), pos("t", v)}, false});
  clauses.push_back(FOClause{Atom{"s", v}, {pos("zero", {w})}, false});
  for (std::size_t i = 0; i < n; ++i) {
    clauses.push_back(FOClause{Atom{"s", v}, {pos(q_name(i), {v[i]}), pos("zero", {v[i]})}, false});
  }
  clauses.push_back(FOClause{Atom{"t", v}, {pos("one", {w})}, false});
  FOClause all{Atom{"t", v}, {}, false};
  for (std::size_t i = 0; i < n; ++i) all.body.push_back(pos(q_name(i), {v[i]}));
  clauses.push_back(std::move(all));
  for (std::size_t i = 0; i < n; ++i) {
    clauses.push_back(FOClause{Atom{q_name(i), {Term::var("X")}}, {pos("one", {Term::var("X")})}, false});
  }
  std::vector<Atom> facts{Atom{"zero", {Term::constant("0")}}, Atom{"one", {Term::constant("1")}}};

  FOTheory theory("r", n + 1, std::move(clauses), std::move(facts));
  return FOSatInstance{FOPatchableTheory(std::move(theory), open_q_literals(n)), conjunct_examples(cnf)};
}

FOSatInstance monotone_sat_to_fpatch_qp(const CNF& input) {
  require_monotone(input);
  const CNF cnf = input.collapsed();
  const std::size_t n = cnf.variables.size();
  const auto v = full_vector(n);

  std::vector<FOClause> clauses;
  clauses.push_back(FOClause{Atom{"r", v}, {pos("s", v), pos("t", v)}, false});
  clauses.push_back(FOClause{Atom{"s", v}, {pos("zerow", v)}, false});
  for (std::size_t i = 0; i < n; ++i) {
    clauses.push_back(
        FOClause{Atom{"s", v}, {pos(q_name(i), v), pos("zero" + std::to_string(i + 1), v)}, false});
  }
  clauses.push_back(FOClause{Atom{"t", v}, {pos("onew", v)}, false});
  FOClause all{Atom{"t", v}, {}, false};
  for (std::size_t i = 0; i < n; ++i) all.body.push_back(pos(q_name(i), v));
  clauses.push_back(std::move(all));
  for (std::size_t i = 0; i < n; ++i) {
    clauses.push_back(FOClause{Atom{q_name(i), v}, {pos("one" + std::to_string(i + 1), v)}, false});
  }

  auto fixed = [&](std::string pred, std::size_t position, const char* value) {
    auto args = v;
    args[position] = Term::constant(value);
    return Atom{std::move(pred), std::move(args)};
  };
  std::vector<Atom> zeros;
  std::vector<Atom> ones;
  for (std::size_t i = 0; i < n; ++i) {
    zeros.push_back(fixed("zero" + std::to_string(i + 1), i, "0"));
    ones.push_back(fixed("one" + std::to_string(i + 1), i, "1"));
  }
  zeros.push_back(fixed("zerow", n, "0"));
  ones.push_back(fixed("onew", n, "1"));
  std::vector<Atom> facts;
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    facts.push_back(std::move(zeros[i]));
    facts.push_back(std::move(ones[i]));
  }

  FOTheory theory("r", n + 1, std::move(clauses), std::move(facts));
  return FOSatInstance{FOPatchableTheory(std::move(theory), open_q_literals(n)), conjunct_examples(cnf)};
}

std::set<ComponentId> fo_assignment_to_deletions(const CNF& cnf, const Assignment& a) {
  if (a.size() != cnf.variables.size()) throw InputError("assignment size mismatch");
  std::set<ComponentId> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) out.insert(ComponentId::lit(q_name(i), 0, 0));
  }
  return out;
}

Assignment fo_deletions_to_assignment(const CNF& cnf, const std::set<ComponentId>& deleted) {
  Assignment a(cnf.variables.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = !deleted.count(ComponentId::lit(q_name(i), 0, 0));
  return a;
}

}  // namespace tpatch
