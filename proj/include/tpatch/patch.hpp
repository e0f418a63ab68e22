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

#include "tpatch/eval.hpp"
#include "tpatch/theory.hpp"

namespace tpatch {

struct Revision {
  enum class Kind { Delete, Null, Disable };

  ComponentId target;
  Kind kind = Kind::Null;
  std::set<ExampleIndex> disabling;      // Disable only
  std::vector<std::string> synthesized;  // clause text added when applied

  Disabling disabling_set() const;

  static Revision remove(ComponentId c) { return {std::move(c), Kind::Delete, {}, {}}; }
  static Revision null(ComponentId c) { return {std::move(c), Kind::Null, {}, {}}; }
  static Revision disable(ComponentId c, std::set<ExampleIndex> d) {
    return {std::move(c), Kind::Disable, std::move(d), {}};
  }
};

std::string_view to_string(Revision::Kind kind);
Revision::Kind parse_revision_kind(std::string_view text);

// Examples that force a component to be disabled (obstructive) or to stay
// enabled (protected).
struct ObstructionReport {
  std::set<ExampleIndex> obstructive;
  std::set<ExampleIndex> protected_examples;
};

struct Unrepairable {
  std::optional<ComponentId> component;  // absent when no single component is to blame
  std::vector<ExampleIndex> examples;
  std::string reason;
};

struct Repaired {
  std::vector<Revision> revisions;
  Theory theory;
};

using PatchResult = std::variant<Repaired, Unrepairable>;
using BenignResult = std::variant<Revision, Unrepairable>;

// Obstructive/protected sets of open component `c`, decided with the
// linear-time stability test. Requires a parity-definite pt.
ObstructionReport obstruction(const PatchableTheory& pt, const ComponentId& c,
                              std::span<const LabeledExample> examples);

BenignResult pbenign(const PatchableTheory& pt, const ComponentId& c,
                     std::span<const LabeledExample> examples);

// Applies one revision syntactically. A Disable adds `not q` to a clause, or
// a clause `p :- q` for a proposition, where the fresh q has one simple clause
// per disabled example conjoining that example's primitive literals.
struct Synthesis {
  Theory theory;
  std::vector<std::string> added;  // new or edited clause lines
};

Synthesis synthesize_edit(const Theory& theory, const Revision& r,
                          std::span<const LabeledExample> examples);
Theory synthesize(const Theory& theory, const Revision& r,
                  std::span<const LabeledExample> examples);

// Fresh proposition introduced when disabling `c`.
std::string aux_name(const ComponentId& c);

// Benign revision of every open component in turn (literals, then clauses,
// then propositions), applied through synthesize.
PatchResult ppatch(const PatchableTheory& pt, std::span<const LabeledExample> examples);

// The same loop without syntactic synthesis: disablings stay virtual and are
// reported per example index. Deletions are applied to the theory.
std::variant<std::vector<Revision>, Unrepairable> plan_patch(
    const PatchableTheory& pt, std::span<const LabeledExample> examples);

// Open components in the order the patching loop visits them.
std::vector<ComponentId> processing_order(const PatchableTheory& pt);

struct ComponentCheck {
  ComponentId component;
  Revision::Kind kind = Revision::Kind::Null;
  bool explicit_revision = true;  // false: left open, checked as the null revision
  ObstructionReport sets;
  bool contains_obstructive = false;
  bool misses_protected = false;
};

struct VerifyReport {
  bool classification_ok = false;
  std::vector<ExampleIndex> misclassified;
  std::vector<ComponentCheck> components;

  bool passed() const;
};

// Replays `revisions` in order and checks the final classification and, at
// each pre-revision state, that the disabling set contains the obstructive
// set and misses the protected set. Sets are recomputed by exhaustive
// stability enumeration when the remaining open set fits its budget.
VerifyReport verify_patch(const PatchableTheory& pt, std::span<const Revision> revisions,
                          std::span<const LabeledExample> examples);

struct OracleBudget {
  std::size_t max_open = 8;
  std::size_t max_examples = 12;
  std::size_t max_open_deletion_only = 20;
};

// Exhaustive repairability search. Unrestricted: every literal is deleted or
// kept, every clause/proposition gets any disabling subset of the examples.
// DeletionOnly: every open component is deleted or kept.
PatchResult oracle_patch(const PatchableTheory& pt, std::span<const LabeledExample> examples,
                         const OracleBudget& budget = {});

// Indices (i, j), i < j, of identical examples with opposite labels.
std::optional<std::pair<ExampleIndex, ExampleIndex>> contradictory_pair(
    std::span<const LabeledExample> examples);

}  // namespace tpatch
