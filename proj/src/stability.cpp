#include "tpatch/stability.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include "tpatch/error.hpp"
#include "tpatch/eval.hpp"

namespace tpatch {

char to_char(Verdict v) {
  switch (v) {
    case Verdict::Covered:
      return 'T';
    case Verdict::Uncovered:
      return 'F';
    case Verdict::Unstable:
      return 'U';
  }
  return 'U';
}

namespace {

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

Theory delete_open_with(const PatchableTheory& pt, const ParityMap& parity, Parity which) {
  Theory out = pt.theory;
  for (const auto& c : pt.open) {
    // Deleting a clause first leaves its open literals unresolvable; they no
    // longer matter.
    if (parity.at(c) == which && out.resolves(c)) out = out.without(c);
  }
  return out;
}

}  // namespace

Theory gamma_gen(const PatchableTheory& pt) {
  return delete_open_with(pt, require_parity_definite(pt), Parity::Even);
}

Theory gamma_spec(const PatchableTheory& pt) {
  return delete_open_with(pt, require_parity_definite(pt), Parity::Odd);
}

Verdict stability_by_parity(const Theory& theory, const std::set<ComponentId>& open,
                            const ParityMap& parity, const Example& example,
                            std::span<const ComponentId> fixed) {
  std::vector<ComponentId> gen(fixed.begin(), fixed.end());
  std::vector<ComponentId> spec(fixed.begin(), fixed.end());
  for (const auto& c : open) {
    auto it = parity.find(c);
    if (it == parity.end()) continue;  // tombstoned or unreached: no effect
    if (it->second == Parity::Even) gen.push_back(c);
    if (it->second == Parity::Odd) spec.push_back(c);
  }
  const bool covered_gen = classify_with(theory, example, gen);
  const bool covered_spec = classify_with(theory, example, spec);
  if (covered_gen && covered_spec) return Verdict::Covered;
  if (!covered_gen && !covered_spec) return Verdict::Uncovered;
  return Verdict::Unstable;
}

Verdict stability_by_enumeration(const Theory& theory, const std::set<ComponentId>& open,
                                 const Example& example, std::span<const ComponentId> fixed,
                                 std::size_t budget) {
  if (open.size() > budget) {
    throw BudgetExceeded("stability oracle: " + std::to_string(open.size()) +
                         " open components exceed the budget of " + std::to_string(budget));
  }
  const std::vector<ComponentId> comps(open.begin(), open.end());
  bool any_covered = false;
  bool any_uncovered = false;
  std::vector<ComponentId> disabled;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << comps.size()); ++mask) {
    disabled.assign(fixed.begin(), fixed.end());
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (mask >> i & 1U) disabled.push_back(comps[i]);
    }
    if (classify_with(theory, example, disabled)) {
      any_covered = true;
    } else {
      any_uncovered = true;
    }
    if (any_covered && any_uncovered) return Verdict::Unstable;
  }
  return any_covered ? Verdict::Covered : Verdict::Uncovered;
}

Verdict pstable(const PatchableTheory& pt, const Example& example) {
  validate_example(pt.theory, example);
  return stability_by_parity(pt.theory, pt.open, require_parity_definite(pt), example);
}

Verdict oracle_stable(const PatchableTheory& pt, const Example& example, std::size_t budget) {
  validate_example(pt.theory, example);
  return stability_by_enumeration(pt.theory, pt.open, example, {}, budget);
}

}  // namespace tpatch
