#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "tpatch/firstorder.hpp"
#include "tpatch/reductions.hpp"
#include "tpatch/theory.hpp"

namespace tpatch {

// Seeded random instances for property tests and the selftest command.
// Streams are reproducible for a given seed and standard library.

struct InstanceShape {
  std::size_t max_propositions = 8;  // root, internal propositions and primitives together
  std::size_t max_clauses = 10;
  std::size_t max_open = 6;
  std::size_t min_examples = 10;
  std::size_t max_examples = 12;
  double negation = 0.3;
  double noise = 0.15;  // chance of flipping a label produced by the hidden target
};

struct RandomInstance {
  PatchableTheory pt;
  std::vector<LabeledExample> examples;
};

// Parity-definite by construction: open components are drawn from those with
// a defined parity. Labels come from a random obtainable theory, then noise.
RandomInstance random_instance(std::mt19937_64& rng, const InstanceShape& shape = {});

struct RandomFOInstance {
  FOPatchableTheory pt;
  std::vector<FOLabeledExample> examples;
};

// A random propositional instance lifted to a quasi-propositional theory of
// arity 1 or 2 with random ground facts over a small constant domain.
RandomFOInstance random_qp_instance(std::mt19937_64& rng, const InstanceShape& shape = {});

struct CnfShape {
  std::size_t max_variables = 10;
  std::size_t max_clauses = 20;
  std::size_t max_width = 3;
  bool monotone = false;
};

CNF random_cnf(std::mt19937_64& rng, const CnfShape& shape = {});

}  // namespace tpatch
