#include "tpatch/patch.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "tpatch/error.hpp"
#include "tpatch/parity.hpp"
#include "tpatch/stability.hpp"

namespace tpatch {

Disabling Revision::disabling_set() const {
  switch (kind) {
    case Kind::Delete:
      return Disabling::all();
    case Kind::Null:
      return Disabling::none();
    case Kind::Disable:
      return Disabling::of(disabling);
  }
  return Disabling::none();
}

std::string_view to_string(Revision::Kind kind) {
  switch (kind) {
    case Revision::Kind::Delete:
      return "delete";
    case Revision::Kind::Null:
      return "null";
    case Revision::Kind::Disable:
      return "disable";
  }
  return "null";
}

Revision::Kind parse_revision_kind(std::string_view text) {
  if (text == "delete") return Revision::Kind::Delete;
  if (text == "null") return Revision::Kind::Null;
  if (text == "disable") return Revision::Kind::Disable;
  throw InputError("unknown revision kind '" + std::string(text) + "'");
}

std::optional<std::pair<ExampleIndex, ExampleIndex>> contradictory_pair(
    std::span<const LabeledExample> examples) {
  std::map<std::set<std::string>, ExampleIndex> first_pos;
  std::map<std::set<std::string>, ExampleIndex> first_neg;
  for (ExampleIndex i = 0; i < examples.size(); ++i) {
    const auto& key = examples[i].example.true_primitives;
    auto& mine = examples[i].label ? first_pos : first_neg;
    auto& other = examples[i].label ? first_neg : first_pos;
    if (auto it = other.find(key); it != other.end()) return std::pair{it->second, i};
    mine.try_emplace(key, i);
  }
  return std::nullopt;
}

namespace {

// Committed virtual revisions of closed components.
using Committed = std::map<ComponentId, Disabling>;

std::vector<ComponentId> fixed_for(const Committed& committed, ExampleIndex i) {
  std::vector<ComponentId> out;
  for (const auto& [c, d] : committed) {
    if (d.disables(i)) out.push_back(c);
  }
  return out;
}

// `parity` selects the linear-time route; nullptr selects enumeration.
ObstructionReport obstruction_at(const Theory& theory, const std::set<ComponentId>& open,
                                 const ParityMap* parity, const Committed& committed,
                                 const ComponentId& c, std::span<const LabeledExample> examples) {
  auto rest = open;
  rest.erase(c);
  ObstructionReport report;
  for (ExampleIndex i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    const Verdict wrong = verdict_of(!ex.label);
    auto fixed = fixed_for(committed, i);
    auto stability = [&](std::span<const ComponentId> f) {
      return parity ? stability_by_parity(theory, rest, *parity, ex.example, f)
                    : stability_by_enumeration(theory, rest, ex.example, f);
    };
    if (stability(fixed) == wrong) report.obstructive.insert(i);
    fixed.push_back(c);
    if (stability(fixed) == wrong) report.protected_examples.insert(i);
  }
  return report;
}

BenignResult decide(const ComponentId& c, const ObstructionReport& r) {
  const auto& o = r.obstructive;
  const auto& p = r.protected_examples;
  for (auto e : o) {
    if (p.count(e)) {
      return Unrepairable{c, {e}, "example is misclassified whether or not " + c.str() +
                                      " is disabled"};
    }
  }
  if (c.kind == ComponentId::Kind::Lit) {
    if (p.empty()) return Revision::remove(c);
    if (o.empty()) return Revision::null(c);
    return Unrepairable{c, {*o.begin(), *p.begin()},
                        "literal " + c.str() + " must be deleted for one example and kept "
                        "for another"};
  }
  if (o.empty()) return Revision::null(c);
  return Revision::disable(c, o);
}

ParityMap require_parity_definite(const PatchableTheory& pt) {
  auto parity = compute_parity(pt.theory);
  auto report = check_parity_definite(parity, pt.open);
  if (!report.definite) {
    std::vector<std::string> witness;
    for (const auto& c : report.offending) witness.push_back(c.str());
    throw PreconditionError("patchable theory is not parity-definite", std::move(witness));
  }
  return parity;
}

void validate_examples(const Theory& theory, std::span<const LabeledExample> examples) {
  for (const auto& ex : examples) validate_example(theory, ex.example);
}

struct LoopOutcome {
  std::vector<Revision> revisions;
  Theory theory;
  std::optional<Unrepairable> failure;
};

LoopOutcome run_loop(const PatchableTheory& pt, std::span<const LabeledExample> examples,
                     bool synthesize_edits) {
  if (pt.policy != RevisionPolicy::Unrestricted) {
    throw PreconditionError("benign-revision patching requires unrestricted revisions");
  }
  validate_examples(pt.theory, examples);
  // Revisions never change the parity of a surviving reachable component, so
  // the input's parity map stays valid for every intermediate theory.
  const auto parity = require_parity_definite(pt);

  LoopOutcome out{{}, pt.theory, std::nullopt};
  auto open = pt.open;
  Committed committed;
  for (const auto& c : processing_order(pt)) {
    auto sets = obstruction_at(out.theory, open, &parity, committed, c, examples);
    auto decided = decide(c, sets);
    if (auto* fail = std::get_if<Unrepairable>(&decided)) {
      out.failure = std::move(*fail);
      return out;
    }
    auto revision = std::get<Revision>(std::move(decided));
    if (synthesize_edits) {
      auto s = synthesize_edit(out.theory, revision, examples);
      out.theory = std::move(s.theory);
      revision.synthesized = std::move(s.added);
    } else if (revision.kind == Revision::Kind::Delete) {
      if (out.theory.resolves(c)) out.theory = out.theory.without(c);
    } else if (revision.kind == Revision::Kind::Disable) {
      committed.insert_or_assign(c, Disabling::of(revision.disabling));
    }
    open.erase(c);
    out.revisions.push_back(std::move(revision));
  }
  return out;
}

std::string mangle(const ComponentId& c) {
  switch (c.kind) {
    case ComponentId::Kind::Prop:
      return "p_" + c.name;
    case ComponentId::Kind::Clause:
      return "c_" + c.name + "_" + std::to_string(c.clause);
    case ComponentId::Kind::Lit:
      return "l_" + c.name + "_" + std::to_string(c.clause) + "_" + std::to_string(c.literal);
  }
  return c.name;
}

}  // namespace

std::vector<ComponentId> processing_order(const PatchableTheory& pt) {
  std::map<ComponentId, std::size_t> rank;
  const auto all = enumerate_components(pt.theory);
  for (std::size_t i = 0; i < all.size(); ++i) rank.emplace(all[i], i);
  auto kind_rank = [](ComponentId::Kind k) {
    switch (k) {
      case ComponentId::Kind::Lit:
        return 0;
      case ComponentId::Kind::Clause:
        return 1;
      case ComponentId::Kind::Prop:
        return 2;
    }
    return 3;
  };
  std::vector<ComponentId> order(pt.open.begin(), pt.open.end());
  std::stable_sort(order.begin(), order.end(), [&](const ComponentId& a, const ComponentId& b) {
    const auto ka = kind_rank(a.kind);
    const auto kb = kind_rank(b.kind);
    if (ka != kb) return ka < kb;
    return rank.at(a) < rank.at(b);
  });
  return order;
}

ObstructionReport obstruction(const PatchableTheory& pt, const ComponentId& c,
                              std::span<const LabeledExample> examples) {
  if (!pt.open.count(c)) throw InputError("component " + c.str() + " is not open");
  validate_examples(pt.theory, examples);
  const auto parity = require_parity_definite(pt);
  return obstruction_at(pt.theory, pt.open, &parity, {}, c, examples);
}

BenignResult pbenign(const PatchableTheory& pt, const ComponentId& c,
                     std::span<const LabeledExample> examples) {
  if (pt.policy != RevisionPolicy::Unrestricted) {
    throw PreconditionError("benign-revision construction requires unrestricted revisions");
  }
  return decide(c, obstruction(pt, c, examples));
}

std::string aux_name(const ComponentId& c) { return "_aux_" + mangle(c); }

Synthesis synthesize_edit(const Theory& theory, const Revision& r,
                          std::span<const LabeledExample> examples) {
  const auto& c = r.target;
  switch (r.kind) {
    case Revision::Kind::Null:
      return {theory, {}};
    case Revision::Kind::Delete:
      return {theory.without(c), {}};
    case Revision::Kind::Disable:
      break;
  }
  if (c.kind == ComponentId::Kind::Lit) {
    throw InputError("literal " + c.str() + " admits only deletion or the null revision");
  }
  if (!theory.resolves(c)) throw InputError("component " + c.str() + " does not resolve");
  if (r.disabling.empty()) return {theory, {}};
  for (auto i : r.disabling) {
    if (i >= examples.size()) {
      throw InputError("disabling set of " + c.str() + " names example " + std::to_string(i) +
                       " of " + std::to_string(examples.size()));
    }
  }

  const std::string q = aux_name(c);
  if (theory.has_proposition(q)) {
    throw InputError("fresh proposition '" + q + "' already occurs in the theory");
  }

  Synthesis out{theory, {}};
  if (c.kind == ComponentId::Kind::Clause) {
    const auto ci = *theory.clause_index(c.name, c.clause);
    out.theory = theory.with_literal(ci, Literal{q, true, false});
    out.added.push_back(clause_text(out.theory.clauses()[ci]));
  } else {
    Clause bridge{c.name, {Literal{q, false, false}}, false};
    out.added.push_back(clause_text(bridge));
    out.theory = theory.with_clause(std::move(bridge));
  }

  std::set<std::set<std::string>> seen;
  for (auto i : r.disabling) {
    const auto& truth = examples[i].example.true_primitives;
    validate_example(theory, examples[i].example);
    if (!seen.insert(truth).second) continue;
    Clause def{q, {}, false};
    for (const auto& prim : theory.primitives()) {
      def.body.push_back(Literal{prim, truth.count(prim) == 0, false});
    }
    out.added.push_back(clause_text(def));
    out.theory = out.theory.with_clause(std::move(def));
  }
  return out;
}

Theory synthesize(const Theory& theory, const Revision& r,
                  std::span<const LabeledExample> examples) {
  return synthesize_edit(theory, r, examples).theory;
}

PatchResult ppatch(const PatchableTheory& pt, std::span<const LabeledExample> examples) {
  if (auto pair = contradictory_pair(examples)) {
    return Unrepairable{std::nullopt, {pair->first, pair->second},
                        "identical examples carry opposite labels"};
  }
  auto outcome = run_loop(pt, examples, true);
  if (outcome.failure) return std::move(*outcome.failure);
  for (const auto& ex : examples) {
    if (classify(outcome.theory, ex.example) != ex.label) {
      throw std::logic_error("patched theory misclassifies a training example");
    }
  }
  return Repaired{std::move(outcome.revisions), std::move(outcome.theory)};
}

std::variant<std::vector<Revision>, Unrepairable> plan_patch(
    const PatchableTheory& pt, std::span<const LabeledExample> examples) {
  auto outcome = run_loop(pt, examples, false);
  if (outcome.failure) return std::move(*outcome.failure);
  return std::move(outcome.revisions);
}

bool VerifyReport::passed() const {
  return classification_ok &&
         std::all_of(components.begin(), components.end(), [](const ComponentCheck& c) {
           return c.contains_obstructive && c.misses_protected;
         });
}

VerifyReport verify_patch(const PatchableTheory& pt, std::span<const Revision> revisions,
                          std::span<const LabeledExample> examples) {
  validate_examples(pt.theory, examples);
  const auto input_parity = compute_parity(pt.theory);

  VerifyReport report;
  Theory theory = pt.theory;
  auto open = pt.open;

  auto check = [&](const Revision& r, bool explicit_revision) {
    const bool enumerate = open.size() - 1 <= kDefaultStabilityBudget;
    ComponentCheck cc;
    cc.component = r.target;
    cc.kind = r.kind;
    cc.explicit_revision = explicit_revision;
    cc.sets = obstruction_at(theory, open, enumerate ? nullptr : &input_parity, {}, r.target,
                             examples);
    const auto d = r.disabling_set();
    cc.contains_obstructive = std::all_of(cc.sets.obstructive.begin(), cc.sets.obstructive.end(),
                                          [&](ExampleIndex e) { return d.disables(e); });
    cc.misses_protected =
        std::none_of(cc.sets.protected_examples.begin(), cc.sets.protected_examples.end(),
                     [&](ExampleIndex e) { return d.disables(e); });
    report.components.push_back(std::move(cc));
    theory = synthesize(theory, r, examples);
    open.erase(r.target);
  };

  for (const auto& r : revisions) {
    if (!open.count(r.target)) {
      throw InputError("revision targets closed component " + r.target.str());
    }
    check(r, true);
  }
  for (const auto& c : processing_order(pt)) {
    if (open.count(c)) check(Revision::null(c), false);
  }

  report.classification_ok = true;
  for (ExampleIndex i = 0; i < examples.size(); ++i) {
    if (classify(theory, examples[i].example) != examples[i].label) {
      report.classification_ok = false;
      report.misclassified.push_back(i);
    }
  }
  return report;
}

namespace {

Repaired assemble(const PatchableTheory& pt, std::vector<Revision> revisions,
                  std::span<const LabeledExample> examples) {
  Theory theory = pt.theory;
  for (auto& r : revisions) {
    auto s = synthesize_edit(theory, r, examples);
    theory = std::move(s.theory);
    r.synthesized = std::move(s.added);
  }
  return Repaired{std::move(revisions), std::move(theory)};
}

Unrepairable no_obtainable_theory() {
  return Unrepairable{std::nullopt, {}, "no obtainable theory classifies every example"};
}

PatchResult oracle_deletion_only(const PatchableTheory& pt,
                                 std::span<const LabeledExample> examples) {
  const auto order = processing_order(pt);
  std::vector<ComponentId> disabled;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << order.size()); ++mask) {
    disabled.clear();
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (mask >> i & 1U) disabled.push_back(order[i]);
    }
    const bool all_ok = std::all_of(examples.begin(), examples.end(), [&](const auto& ex) {
      return classify_with(pt.theory, ex.example, disabled) == ex.label;
    });
    if (!all_ok) continue;
    std::vector<Revision> revisions;
    for (std::size_t i = 0; i < order.size(); ++i) {
      revisions.push_back(mask >> i & 1U ? Revision::remove(order[i]) : Revision::null(order[i]));
    }
    return assemble(pt, std::move(revisions), examples);
  }
  return no_obtainable_theory();
}

// Literal choices are global; clause and proposition choices are independent
// per example, so for each literal mask every distinct example is solved on
// its own.
PatchResult oracle_unrestricted(const PatchableTheory& pt,
                                std::span<const LabeledExample> examples) {
  const auto order = processing_order(pt);
  std::vector<ComponentId> lits;
  std::vector<ComponentId> others;
  for (const auto& c : order) {
    (c.kind == ComponentId::Kind::Lit ? lits : others).push_back(c);
  }

  std::map<std::set<std::string>, std::vector<ExampleIndex>> groups;
  for (ExampleIndex i = 0; i < examples.size(); ++i) {
    groups[examples[i].example.true_primitives].push_back(i);
  }

  std::vector<ComponentId> disabled;
  for (std::uint64_t lit_mask = 0; lit_mask < (std::uint64_t{1} << lits.size()); ++lit_mask) {
    std::vector<std::set<ExampleIndex>> disabling(others.size());
    bool feasible = true;
    for (const auto& [truth, members] : groups) {
      const auto& ex = examples[members.front()];
      bool found = false;
      for (std::uint64_t m = 0; m < (std::uint64_t{1} << others.size()) && !found; ++m) {
        disabled.clear();
        for (std::size_t i = 0; i < lits.size(); ++i) {
          if (lit_mask >> i & 1U) disabled.push_back(lits[i]);
        }
        for (std::size_t i = 0; i < others.size(); ++i) {
          if (m >> i & 1U) disabled.push_back(others[i]);
        }
        if (classify_with(pt.theory, ex.example, disabled) != ex.label) continue;
        found = true;
        for (std::size_t i = 0; i < others.size(); ++i) {
          if (m >> i & 1U) disabling[i].insert(members.begin(), members.end());
        }
      }
      if (!found) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;

    std::vector<Revision> revisions;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      revisions.push_back(lit_mask >> i & 1U ? Revision::remove(lits[i])
                                             : Revision::null(lits[i]));
    }
    for (std::size_t i = 0; i < others.size(); ++i) {
      revisions.push_back(disabling[i].empty() ? Revision::null(others[i])
                                               : Revision::disable(others[i], disabling[i]));
    }
    return assemble(pt, std::move(revisions), examples);
  }
  return no_obtainable_theory();
}

}  // namespace

PatchResult oracle_patch(const PatchableTheory& pt, std::span<const LabeledExample> examples,
                         const OracleBudget& budget) {
  validate_examples(pt.theory, examples);
  if (pt.policy == RevisionPolicy::DeletionOnly) {
    if (pt.open.size() > budget.max_open_deletion_only) {
      throw BudgetExceeded("patch oracle: " + std::to_string(pt.open.size()) +
                           " open components exceed the deletion-only budget");
    }
  } else if (pt.open.size() > budget.max_open || examples.size() > budget.max_examples) {
    throw BudgetExceeded("patch oracle: " + std::to_string(pt.open.size()) + " open components, " +
                         std::to_string(examples.size()) + " examples exceed the budget");
  }
  if (auto pair = contradictory_pair(examples)) {
    return Unrepairable{std::nullopt, {pair->first, pair->second},
                        "identical examples carry opposite labels"};
  }
  return pt.policy == RevisionPolicy::DeletionOnly ? oracle_deletion_only(pt, examples)
                                                   : oracle_unrestricted(pt, examples);
}

}  // namespace tpatch
