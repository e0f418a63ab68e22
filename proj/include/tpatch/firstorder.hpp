#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tpatch/parity.hpp"
#include "tpatch/patch.hpp"
#include "tpatch/theory.hpp"

namespace tpatch {

// Variables start with an uppercase letter; everything else is a constant.
struct Term {
  std::string name;
  bool variable = false;

  static Term var(std::string n) { return {std::move(n), true}; }
  static Term constant(std::string n) { return {std::move(n), false}; }

  friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
  std::string pred;
  std::vector<Term> args;

  friend bool operator==(const Atom&, const Atom&) = default;
};

std::string atom_text(const Atom& atom);

struct FOLiteral {
  Atom atom;
  bool negated = false;
  bool deleted = false;

  friend bool operator==(const FOLiteral&, const FOLiteral&) = default;
};

struct FOClause {
  Atom head;
  std::vector<FOLiteral> body;
  bool deleted = false;

  friend bool operator==(const FOClause&, const FOClause&) = default;
};

std::string clause_text(const FOClause& clause);

// Non-recursive, function-free definite-clause theory with negation as
// failure. A predicate heading a clause with a non-empty body is defined;
// every other predicate is a fact predicate and is given by `facts` alone.
// Component ids reuse the propositional syntax with predicate names.
class FOTheory {
 public:
  FOTheory(std::string root, std::size_t root_arity, std::vector<FOClause> clauses,
           std::vector<Atom> facts, std::vector<std::string> fact_predicates = {},
           std::set<std::string> forced_true = {});

  const std::string& root() const { return root_; }
  std::size_t root_arity() const { return root_arity_; }
  std::span<const FOClause> clauses() const { return clauses_; }
  std::span<const Atom> facts() const { return facts_; }
  // In order of first appearance (declarations first).
  const std::vector<std::string>& fact_predicates() const { return fact_preds_; }
  const std::set<std::string>& forced_true() const { return forced_; }

  bool is_fact_predicate(std::string_view pred) const;
  bool is_defined(std::string_view pred) const;
  std::optional<std::size_t> arity(std::string_view pred) const;
  // Defined predicates: the root first, then clause heads in file order.
  const std::vector<std::string>& defined_predicates() const { return defined_; }

  std::optional<std::size_t> clause_index(std::string_view head, std::size_t k) const;
  std::size_t ordinal_of(std::size_t clause_index) const { return ordinals_[clause_index]; }
  std::size_t clause_slots(std::string_view head) const;
  bool resolves(const ComponentId& c) const;

  FOTheory without(const ComponentId& c) const;
  FOTheory with_clause(FOClause clause) const;
  FOTheory with_literal(std::size_t clause_index, FOLiteral literal) const;
  FOTheory with_facts(std::vector<Atom> facts) const;

  friend bool operator==(const FOTheory&, const FOTheory&) = default;

 private:
  void build_index();

  std::string root_;
  std::size_t root_arity_;
  std::vector<FOClause> clauses_;
  std::vector<Atom> facts_;
  std::vector<std::string> fact_preds_;
  std::set<std::string> forced_;

  std::vector<std::string> defined_;
  std::map<std::string, std::size_t, std::less<>> arity_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> clauses_of_;
  std::vector<std::size_t> ordinals_;
};

// `root r/3.`, optional `fact p/2.` declarations, clauses
// `r(X,Y,Z) :- q(X,Y,Z), not s(X,Y,Z).` and facts `one(1).` / `one1(1,X2,X3).`
FOTheory parse_fo_theory(std::string_view text);
std::string serialize_fo_theory(const FOTheory& theory);

// Non-primitive Prop ids (defined predicates), Clause ids, then Lit ids.
std::vector<ComponentId> enumerate_fo_components(const FOTheory& theory);

// Constants bound to the root's parameters, in order.
struct FOExample {
  std::vector<std::string> args;

  friend bool operator==(const FOExample&, const FOExample&) = default;
};

struct FOLabeledExample {
  FOExample example;
  bool label = false;
};

// `+|- c1 c2 ...` per line.
std::vector<FOLabeledExample> parse_fo_examples(std::string_view text);
std::string serialize_fo_examples(std::span<const FOLabeledExample> examples);

struct FOValidation {
  bool completely_bound = true;
  bool quasi_propositional = true;
  bool ground_facts_only = true;
  bool negation_free = true;
  std::size_t depth = 0;  // fact predicates have depth 0
  std::vector<ComponentId> unbound;          // literals with a variable missing from the head
  std::vector<ComponentId> not_propositional;  // clauses/literals breaking the shared vector
  std::vector<std::string> nonground_facts;
};

FOValidation validate_fo(const FOTheory& theory);

// Top-down proof of root(args) with negation as failure. Variables left
// unbound by the head range over the constants of the theory and example.
bool classify_fo(const FOTheory& theory, const FOExample& example);
// As classify_fo with the listed components disabled for this query.
bool classify_fo_with(const FOTheory& theory, const FOExample& example,
                      std::span<const ComponentId> disabled);

struct FOPatchableTheory {
  FOPatchableTheory(FOTheory theory, std::set<ComponentId> open);

  FOTheory theory;
  std::set<ComponentId> open;
};

// Parity over the predicate dependency graph of the first-order theory.
ParityMap compute_fo_parity(const FOTheory& theory);

struct PropositionalizedBundle {
  PatchableTheory pt;
  std::map<ComponentId, ComponentId> component_map;  // first-order id -> propositional id
  std::map<std::string, std::string> predicate_map;  // atom pattern -> proposition
};

struct Propositionalized {
  PropositionalizedBundle bundle;
  std::vector<LabeledExample> examples;
};

// Requires a quasi-propositional theory with ground facts only and a
// parity-definite open set; throws PreconditionError naming the offenders.
Propositionalized propositionalize(const FOPatchableTheory& pt,
                                   std::span<const FOLabeledExample> examples);
Example propositional_example(const FOTheory& theory, const FOExample& example);

struct FORepaired {
  std::vector<Revision> revisions;  // disabling sets index the training examples
  FOTheory theory;
};

using FOPatchResult = std::variant<FORepaired, Unrepairable>;

// Propositionalizes, plans benign revisions, and maps them back. A disabled
// clause gains `not aux(X..)`, a disabled predicate gains `p(X..) :- aux(X..)`,
// where the fresh fact predicate aux lists the disabling instantiations.
FOPatchResult fpatch(const FOPatchableTheory& pt, std::span<const FOLabeledExample> examples);

// Exhaustive repairability check evaluated with classify_fo_with: literals
// are deleted or kept, clauses and predicates are disabled per example.
bool oracle_fpatch_repairable(const FOPatchableTheory& pt,
                              std::span<const FOLabeledExample> examples,
                              const OracleBudget& budget = {});

}  // namespace tpatch
