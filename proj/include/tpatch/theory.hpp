#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tpatch {

using ExampleIndex = std::size_t;

// Address of a proposition, a clause or one body-literal occurrence.
// Ordinals are 0-based and count tombstoned slots, so an id minted before an
// edit keeps pointing at the same component afterwards.
struct ComponentId {
  enum class Kind : std::uint8_t { Prop = 0, Clause = 1, Lit = 2 };

  Kind kind = Kind::Prop;
  std::string name;         // the proposition, or the head of the clause
  std::size_t clause = 0;   // k-th clause of `name` (Clause, Lit)
  std::size_t literal = 0;  // j-th body position (Lit)

  static ComponentId prop(std::string name);
  static ComponentId clause_of(std::string head, std::size_t k);
  static ComponentId lit(std::string head, std::size_t k, std::size_t j);

  // `p:<name>`, `c:<name>/<k>` or `l:<name>/<k>/<j>`.
  static ComponentId parse(std::string_view text);
  std::string str() const;

  friend auto operator<=>(const ComponentId&, const ComponentId&) = default;
  friend bool operator==(const ComponentId&, const ComponentId&) = default;
};

struct Literal {
  std::string prop;
  bool negated = false;
  bool deleted = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Clause {
  std::string head;
  std::vector<Literal> body;
  bool deleted = false;

  friend bool operator==(const Clause&, const Clause&) = default;
};

// Acyclic propositional definite-clause theory with negation as failure and
// a single root. Values are immutable; edits return a new theory.
//
// Names referenced in bodies that head no clause and are not listed as
// primitives are internal propositions with no clauses (always false). The
// text parser instead infers such names as primitives.
class Theory {
 public:
  Theory(std::string root, std::vector<Clause> clauses,
         std::vector<std::string> primitives,
         std::set<std::string> forced_true = {});

  const std::string& root() const { return root_; }
  std::span<const Clause> clauses() const { return clauses_; }
  const std::vector<std::string>& primitives() const { return primitives_; }
  const std::set<std::string>& forced_true() const { return forced_; }

  // Every proposition name: the root, clause heads in file order, names first
  // seen in bodies, then declared primitives not otherwise referenced.
  const std::vector<std::string>& propositions() const { return names_; }
  std::vector<std::string> internal_propositions() const;

  bool has_proposition(std::string_view name) const;
  bool is_primitive(std::string_view name) const;
  bool is_forced_true(std::string_view name) const;

  // Dense ids used by the evaluators; ids index propositions().
  std::optional<std::size_t> prop_id(std::string_view name) const;
  bool is_primitive(std::size_t prop) const { return primitive_[prop]; }
  const std::vector<std::size_t>& clauses_for(std::size_t prop) const {
    return clauses_of_[prop];
  }
  std::size_t head_id(std::size_t clause_index) const { return head_ids_[clause_index]; }
  std::size_t literal_prop_id(std::size_t clause_index, std::size_t j) const {
    return literal_ids_[clause_index][j];
  }

  // Slot of Clause(head, k), tombstoned or not.
  std::optional<std::size_t> clause_index(std::string_view head, std::size_t k) const;
  // k such that clauses()[clause_index] is Clause(head, k).
  std::size_t ordinal_of(std::size_t clause_index) const { return ordinals_[clause_index]; }
  std::size_t clause_slots(std::string_view head) const;

  // The id names a slot of this theory (possibly tombstoned).
  bool addresses(const ComponentId& c) const;
  // The id names a live component.
  bool resolves(const ComponentId& c) const;

  // Tombstones a clause or literal; forces a proposition true.
  Theory without(const ComponentId& c) const;
  Theory with_clause(Clause clause) const;
  Theory with_literal(std::size_t clause_index, Literal literal) const;

  friend bool operator==(const Theory& a, const Theory& b);

 private:
  void build_index();

  std::string root_;
  std::vector<Clause> clauses_;
  std::vector<std::string> primitives_;
  std::set<std::string> forced_;

  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<bool> primitive_;
  std::vector<std::vector<std::size_t>> clauses_of_;
  std::vector<std::size_t> head_ids_;
  std::vector<std::size_t> ordinals_;
  std::vector<std::vector<std::size_t>> literal_ids_;
};

Theory parse_theory(std::string_view text);
std::string serialize_theory(const Theory& theory);

// One clause in theory-file syntax, skipping tombstoned literals.
std::string clause_text(const Clause& clause);

// Non-primitive Prop ids, then Clause ids, then Lit ids, each in file order.
// Tombstoned components are skipped.
std::vector<ComponentId> enumerate_components(const Theory& theory);

Theory delete_component(const Theory& theory, const ComponentId& c);

// Closed world: primitives not listed are false.
struct Example {
  std::set<std::string> true_primitives;

  friend bool operator==(const Example&, const Example&) = default;
};

struct LabeledExample {
  Example example;
  bool label = false;  // true for a positive example
};

void validate_example(const Theory& theory, const Example& example);

// One example per line: `+` or `-` followed by true primitive names.
std::vector<LabeledExample> parse_examples(std::string_view text);
std::string serialize_examples(std::span<const LabeledExample> examples);

enum class RevisionPolicy { Unrestricted, DeletionOnly };

struct PatchableTheory {
  PatchableTheory(Theory theory, std::set<ComponentId> open,
                  RevisionPolicy policy = RevisionPolicy::Unrestricted);

  Theory theory;
  std::set<ComponentId> open;
  RevisionPolicy policy;
};

// One ComponentId per line; `#` starts a comment.
std::set<ComponentId> parse_open(std::string_view text);
std::string serialize_open(const std::set<ComponentId>& open);

}  // namespace tpatch
