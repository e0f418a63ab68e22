#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string_view>

#include "tpatch/parity.hpp"
#include "tpatch/theory.hpp"

namespace tpatch {

// T: covered by every obtainable theory; F: by none; U: otherwise.
enum class Verdict { Covered, Uncovered, Unstable };

char to_char(Verdict v);
inline Verdict verdict_of(bool covered) {
  return covered ? Verdict::Covered : Verdict::Uncovered;
}

inline constexpr std::size_t kDefaultStabilityBudget = 16;

// Maximal generalization and specialization: delete every open even
// (respectively odd) component. Throw PreconditionError unless pt is
// parity-definite.
Theory gamma_gen(const PatchableTheory& pt);
Theory gamma_spec(const PatchableTheory& pt);

// Linear-time decision for parity-definite theories.
Verdict pstable(const PatchableTheory& pt, const Example& example);

// Enumerates all 2^|open| per-example disabling patterns.
Verdict oracle_stable(const PatchableTheory& pt, const Example& example,
                      std::size_t budget = kDefaultStabilityBudget);

// Building blocks shared with the patching loop. `open` may name tombstoned
// components; `fixed` lists components already disabled for this example by
// committed revisions.
Verdict stability_by_parity(const Theory& theory, const std::set<ComponentId>& open,
                            const ParityMap& parity, const Example& example,
                            std::span<const ComponentId> fixed = {});
Verdict stability_by_enumeration(const Theory& theory, const std::set<ComponentId>& open,
                                 const Example& example,
                                 std::span<const ComponentId> fixed = {},
                                 std::size_t budget = kDefaultStabilityBudget);

}  // namespace tpatch
