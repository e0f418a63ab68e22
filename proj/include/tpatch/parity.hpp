#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "tpatch/theory.hpp"

namespace tpatch {

enum class Parity { Even, Odd, Undefined };

std::string_view to_string(Parity p);
inline Parity flip(Parity p) {
  return p == Parity::Even ? Parity::Odd : p == Parity::Odd ? Parity::Even : Parity::Undefined;
}

// Parity of every live non-primitive component. Components the root does not
// reach are Undefined; occurrences inside unreached clauses do not constrain
// the propositions they mention.
using ParityMap = std::map<ComponentId, Parity>;

ParityMap compute_parity(const Theory& theory);

struct ParityReport {
  bool definite = true;
  std::vector<ComponentId> offending;  // open components without a parity
};

ParityReport check_parity_definite(const ParityMap& parity, const std::set<ComponentId>& open);
ParityReport is_parity_definite(const PatchableTheory& pt);

// Dependency structure the parity recursion runs over; shared by the
// propositional and first-order front ends.
struct ParityGraph {
  struct Occurrence {
    std::size_t prop;
    bool negated;
  };
  struct Rule {
    std::size_t head;
    std::vector<std::optional<Occurrence>> body;  // nullopt: tombstoned literal
    bool live = true;
  };

  std::size_t root = 0;
  std::vector<bool> primitive;  // one entry per proposition
  std::vector<Rule> rules;
};

struct GraphParity {
  std::vector<Parity> props;
  std::vector<Parity> rules;
  std::vector<std::vector<Parity>> literals;
};

GraphParity solve_parity(const ParityGraph& graph);

}  // namespace tpatch
