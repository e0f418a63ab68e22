#include "tpatch/generate.hpp"

#include <algorithm>

#include "tpatch/eval.hpp"
#include "tpatch/parity.hpp"

namespace tpatch {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

struct Skeleton {
  Theory theory;
  std::set<ComponentId> open;
};

Skeleton random_skeleton(std::mt19937_64& rng, const InstanceShape& shape) {
  const std::size_t max_internal = std::min<std::size_t>(5, shape.max_propositions - 2);
  const std::size_t n_internal = uniform(rng, 2, max_internal);
  const std::size_t n_prim = uniform(rng, 2, shape.max_propositions - n_internal);

  std::vector<std::string> internal{"r"};
  for (std::size_t i = 1; i < n_internal; ++i) internal.push_back("p" + std::to_string(i));
  std::vector<std::string> prims;
  for (std::size_t i = 0; i < n_prim; ++i) prims.push_back("x" + std::to_string(i + 1));

  // Every internal proposition gets one clause, the rest go to random heads.
  std::vector<std::size_t> heads;
  for (std::size_t i = 0; i < n_internal; ++i) heads.push_back(i);
  const std::size_t n_clauses = uniform(rng, n_internal, std::max(n_internal, shape.max_clauses));
  while (heads.size() < n_clauses) heads.push_back(uniform(rng, 0, n_internal - 1));
  std::sort(heads.begin(), heads.end());

  std::vector<Clause> clauses;
  for (auto h : heads) {
    // Bodies only mention later internal propositions, keeping the theory acyclic.
    std::vector<std::string> pool(internal.begin() + static_cast<long>(h) + 1, internal.end());
    pool.insert(pool.end(), prims.begin(), prims.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t len = uniform(rng, 1, std::min<std::size_t>(3, pool.size()));
    Clause c{internal[h], {}, false};
    for (std::size_t j = 0; j < len; ++j) {
      c.body.push_back(Literal{pool[j], chance(rng, shape.negation), false});
    }
    clauses.push_back(std::move(c));
  }
  Theory theory("r", std::move(clauses), prims);

  std::vector<ComponentId> candidates;
  for (const auto& [c, p] : compute_parity(theory)) {
    if (p != Parity::Undefined) candidates.push_back(c);
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const std::size_t k = uniform(rng, 1, std::min(shape.max_open, candidates.size()));
  std::set<ComponentId> open(candidates.begin(), candidates.begin() + static_cast<long>(k));
  return {std::move(theory), std::move(open)};
}

// Open literals are deleted or kept once; clauses and propositions are
// disabled per example.
struct HiddenTarget {
  std::vector<ComponentId> deleted;
  std::vector<ComponentId> per_example;
};

HiddenTarget random_target(std::mt19937_64& rng, const std::set<ComponentId>& open) {
  HiddenTarget t;
  for (const auto& c : open) {
    if (c.kind == ComponentId::Kind::Lit) {
      if (chance(rng, 0.5)) t.deleted.push_back(c);
    } else {
      t.per_example.push_back(c);
    }
  }
  return t;
}

std::vector<ComponentId> disabled_for_one(std::mt19937_64& rng, const HiddenTarget& t) {
  auto d = t.deleted;
  for (const auto& c : t.per_example) {
    if (chance(rng, 0.3)) d.push_back(c);
  }
  return d;
}

}  // namespace

RandomInstance random_instance(std::mt19937_64& rng, const InstanceShape& shape) {
  auto sk = random_skeleton(rng, shape);
  const auto& prims = sk.theory.primitives();
  const auto target = random_target(rng, sk.open);
  const std::size_t n = uniform(rng, shape.min_examples, shape.max_examples);
  std::vector<LabeledExample> examples;
  for (std::size_t i = 0; i < n; ++i) {
    Example e;
    for (const auto& p : prims) {
      if (chance(rng, 0.5)) e.true_primitives.insert(p);
    }
    const auto d = disabled_for_one(rng, target);
    bool label = classify_with(sk.theory, e, d);
    if (chance(rng, shape.noise)) label = !label;
    examples.push_back({std::move(e), label});
  }
  return {PatchableTheory(std::move(sk.theory), std::move(sk.open)), std::move(examples)};
}

RandomFOInstance random_qp_instance(std::mt19937_64& rng, const InstanceShape& shape) {
  auto sk = random_skeleton(rng, shape);
  const std::size_t arity = uniform(rng, 1, 2);
  std::vector<Term> vec;
  for (std::size_t i = 0; i < arity; ++i) vec.push_back(Term::var("X" + std::to_string(i + 1)));
  const std::vector<std::string> domain{"c0", "c1", "c2"};

  std::vector<std::vector<std::string>> tuples{{}};
  for (std::size_t i = 0; i < arity; ++i) {
    std::vector<std::vector<std::string>> next;
    for (const auto& t : tuples) {
      for (const auto& c : domain) {
        auto u = t;
        u.push_back(c);
        next.push_back(std::move(u));
      }
    }
    tuples = std::move(next);
  }

  std::vector<FOClause> clauses;
  for (const auto& c : sk.theory.clauses()) {
    FOClause fc{Atom{c.head, vec}, {}, false};
    for (const auto& l : c.body) fc.body.push_back(FOLiteral{Atom{l.prop, vec}, l.negated, false});
    clauses.push_back(std::move(fc));
  }
  std::set<std::string> referenced;
  for (const auto& c : clauses) {
    for (const auto& l : c.body) referenced.insert(l.atom.pred);
  }
  std::vector<Atom> facts;
  std::vector<std::string> fact_preds;
  for (const auto& p : sk.theory.primitives()) {
    bool any = false;
    for (const auto& t : tuples) {
      if (!chance(rng, 0.4)) continue;
      Atom f{p, {}};
      for (const auto& c : t) f.args.push_back(Term::constant(c));
      facts.push_back(std::move(f));
      any = true;
    }
    // A declared predicate needs a use or a fact to fix its arity.
    if (any || referenced.count(p)) fact_preds.push_back(p);
  }
  FOTheory theory("r", arity, std::move(clauses), std::move(facts), std::move(fact_preds));

  const auto target = random_target(rng, sk.open);
  const std::size_t n = uniform(rng, shape.min_examples, shape.max_examples);
  std::vector<FOLabeledExample> examples;
  for (std::size_t i = 0; i < n; ++i) {
    FOExample e{tuples[uniform(rng, 0, tuples.size() - 1)]};
    const auto d = disabled_for_one(rng, target);
    bool label = classify_fo_with(theory, e, d);
    if (chance(rng, shape.noise)) label = !label;
    examples.push_back({std::move(e), label});
  }
  return {FOPatchableTheory(std::move(theory), std::move(sk.open)), std::move(examples)};
}

CNF random_cnf(std::mt19937_64& rng, const CnfShape& shape) {
  CNF cnf;
  const std::size_t n = uniform(rng, 1, shape.max_variables);
  for (std::size_t i = 0; i < n; ++i) cnf.variables.push_back("x" + std::to_string(i + 1));
  const std::size_t m = uniform(rng, 1, shape.max_clauses);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t width = uniform(rng, 1, std::min(shape.max_width, n));
    const bool clause_sign = chance(rng, 0.5);
    std::vector<std::size_t> vars(n);
    for (std::size_t v = 0; v < n; ++v) vars[v] = v;
    std::shuffle(vars.begin(), vars.end(), rng);
    std::vector<CnfLiteral> clause;
    for (std::size_t j = 0; j < width; ++j) {
      clause.push_back(CnfLiteral{vars[j], shape.monotone ? clause_sign : chance(rng, 0.5)});
    }
    cnf.clauses.push_back(std::move(clause));
  }
  return cnf;
}

}  // namespace tpatch
