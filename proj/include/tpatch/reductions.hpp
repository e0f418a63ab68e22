#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tpatch/firstorder.hpp"
#include "tpatch/theory.hpp"

namespace tpatch {

struct CnfLiteral {
  std::size_t var = 0;
  bool negated = false;

  friend auto operator<=>(const CnfLiteral&, const CnfLiteral&) = default;
};

struct CNF {
  std::vector<std::string> variables;
  std::vector<std::vector<CnfLiteral>> clauses;

  // Every clause is all-positive or all-negative.
  bool is_monotone() const;
  // Drops repeated literals inside a clause, keeping first occurrences.
  CNF collapsed() const;
};

// Truth value per variable, indexed like CNF::variables.
using Assignment = std::vector<bool>;

// `p cnf V C` header and 0-terminated clauses. Variables are named x1..xV
// unless a `c names n1 n2 ...` comment supplies names.
CNF parse_dimacs(std::string_view text);
std::string write_dimacs(const CNF& cnf);

bool satisfies(const CNF& cnf, const Assignment& assignment);

inline constexpr std::size_t kCnfOracleBudget = 20;

// First satisfying assignment in lexicographic order (F before T, first
// variable most significant), or nullopt when unsatisfiable.
std::optional<Assignment> cnf_sat_oracle(const CNF& cnf, std::size_t budget = kCnfOracleBudget);

// Root r requires every d<i>; d<i> has one clause per literal of clause i;
// each variable v occurring in the formula gets `v :- sel_v.` whose body
// literal is open. The single example has every primitive false and is
// positive. Deleting the literal of v sets v true.
struct SatInstance {
  PatchableTheory pt;
  std::vector<LabeledExample> examples;
};

SatInstance sat_to_ppatch(const CNF& cnf);

std::set<ComponentId> assignment_to_deletions(const CNF& cnf, const Assignment& assignment);
Assignment deletions_to_assignment(const CNF& cnf, const std::set<ComponentId>& deleted);

// Monotone-SAT constructions. Root r(X1..Xn,W); the open components are the
// body literals of the q<i> clauses. A variable is true exactly when its
// literal is kept.
struct FOSatInstance {
  FOPatchableTheory pt;
  std::vector<FOLabeledExample> examples;
};

// Ground facts zero(0), one(1); q<i> takes one argument.
FOSatInstance monotone_sat_to_fpatch_ground(const CNF& cnf);
// Quasi-propositional: every atom carries X1..Xn,W; facts zero<i>/one<i>
// and zerow/onew fix one position and leave the rest variable.
FOSatInstance monotone_sat_to_fpatch_qp(const CNF& cnf);

std::set<ComponentId> fo_assignment_to_deletions(const CNF& cnf, const Assignment& assignment);
Assignment fo_deletions_to_assignment(const CNF& cnf, const std::set<ComponentId>& deleted);

}  // namespace tpatch
