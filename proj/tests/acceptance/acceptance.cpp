// End-to-end checks with the time limits each one must meet. Prints one
// PASS/FAIL line per check and exits nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "../unit/fixtures.hpp"
#include "tpatch/eval.hpp"
#include "tpatch/firstorder.hpp"
#include "tpatch/generate.hpp"
#include "tpatch/parity.hpp"
#include "tpatch/patch.hpp"
#include "tpatch/reductions.hpp"
#include "tpatch/stability.hpp"

using namespace tpatch;

namespace {

// Collects failure messages; a check passes when none were recorded.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 20) failures.push_back(what);
  }
};

std::vector<std::string> clause_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line.rfind("primitive ", 0) != 0) out.push_back(line);
  }
  return out;
}

PatchableTheory cup_pt() {
  return {parse_theory(test::read_data("cup.theory")), parse_open(test::read_data("cup.open"))};
}

constexpr std::uint64_t kStabilitySeed = 20240301;
constexpr std::size_t kStabilityInstances = 200;

std::vector<RandomInstance> stability_instances() {
  std::mt19937_64 rng(kStabilitySeed);
  std::vector<RandomInstance> out;
  for (std::size_t i = 0; i < kStabilityInstances; ++i) out.push_back(random_instance(rng));
  return out;
}

void cup_fixtures(Check& c) {
  auto pt = cup_pt();
  auto train = parse_examples(test::read_data("cup_train.examples"));
  c.expect(!classify(pt.theory, train[0].example), "E1 should be uncovered");
  c.expect(classify(pt.theory, train[1].example), "E2 should be covered");
  c.expect(clause_lines(serialize_theory(gamma_gen(pt))) ==
               clause_lines(test::read_data("cup_gen.theory")),
           "generalized theory differs from the expected clause set");
  c.expect(clause_lines(serialize_theory(gamma_spec(pt))) ==
               clause_lines(test::read_data("cup_spec.theory")),
           "specialized theory differs from the expected clause set");
  auto st = parse_examples(test::read_data("cup_stability.examples"));
  c.expect(pstable(pt, st[0].example) == Verdict::Uncovered, "first example should be F");
  c.expect(pstable(pt, st[1].example) == Verdict::Unstable, "second example should be U");
}

void cup_end_to_end(Check& c) {
  auto pt = cup_pt();
  auto train = parse_examples(test::read_data("cup_train.examples"));
  auto result = ppatch(pt, train);
  if (!std::holds_alternative<Repaired>(result)) {
    c.expect(false, "training set should be repairable");
    return;
  }
  const auto& r = std::get<Repaired>(result);
  for (std::size_t i = 0; i < train.size(); ++i) {
    c.expect(classify(r.theory, train[i].example) == train[i].label,
             "example " + std::to_string(i) + " misclassified after patching");
  }
  bool saw_lit = false;
  bool saw_clause = false;
  for (const auto& rev : r.revisions) {
    if (rev.target == ComponentId::lit("graspable", 1, 1)) {
      saw_lit = true;
      c.expect(rev.kind == Revision::Kind::Delete, "ceramic literal should be deleted");
    }
    if (rev.target == ComponentId::clause_of("graspable", 0)) {
      saw_clause = true;
      c.expect(rev.kind == Revision::Kind::Disable && rev.disabling == std::set<ExampleIndex>{1},
               "handle clause should be disabled for E2 only");
    }
  }
  c.expect(saw_lit && saw_clause, "both open components should be revised");
  auto e5 = parse_examples(test::read_data("cup_e5.examples"));
  c.expect(std::holds_alternative<Unrepairable>(ppatch(pt, e5)), "E5 should be unrepairable");
}

void stability_equivalence(Check& c, const std::vector<RandomInstance>& instances) {
  std::size_t examples = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    c.expect(is_parity_definite(inst.pt).definite, "instance " + std::to_string(i) +
                                                       " is not parity-definite");
    c.expect(inst.examples.size() >= 10, "instance " + std::to_string(i) + " has < 10 examples");
    for (std::size_t k = 0; k < inst.examples.size(); ++k, ++examples) {
      const auto& e = inst.examples[k].example;
      c.expect(pstable(inst.pt, e) == oracle_stable(inst.pt, e),
               "instance " + std::to_string(i) + " example " + std::to_string(k) +
                   ": verdicts disagree");
    }
  }
  c.expect(examples >= 2000, "fewer examples than expected");
}

void patch_equivalence(Check& c) {
  std::mt19937_64 rng(20240302);
  std::size_t repaired = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    auto inst = random_instance(rng);
    const auto fast = ppatch(inst.pt, inst.examples);
    const auto slow = oracle_patch(inst.pt, inst.examples);
    const bool fast_ok = std::holds_alternative<Repaired>(fast);
    c.expect(fast_ok == std::holds_alternative<Repaired>(slow),
             "instance " + std::to_string(i) + ": patching and oracle disagree");
    if (!fast_ok) continue;
    ++repaired;
    auto report = verify_patch(inst.pt, std::get<Repaired>(fast).revisions, inst.examples);
    c.expect(report.classification_ok, "instance " + std::to_string(i) + ": misclassification");
    for (const auto& cc : report.components) {
      c.expect(cc.contains_obstructive && cc.misses_protected,
               "instance " + std::to_string(i) + ": " + cc.component.str() +
                   " breaks the obstructive/protected containment");
    }
  }
  // Both outcomes must be exercised for the comparison to mean anything.
  c.expect(repaired > 0 && repaired < 200, "random instances are all one outcome");
}

std::set<ComponentId> deleted_by(const Repaired& r) {
  std::set<ComponentId> out;
  for (const auto& rev : r.revisions) {
    if (rev.kind == Revision::Kind::Delete) out.insert(rev.target);
  }
  return out;
}

void sat_round_trip(Check& c) {
  const auto abc = parse_dimacs(test::read_data("abc.cnf"));
  auto inst = sat_to_ppatch(abc);
  c.expect(serialize_theory(inst.pt.theory) == test::read_data("abc_sat.theory"),
           "generated theory is not byte-identical to the fixture");
  const std::set<ComponentId> ac{ComponentId::lit("a", 0, 0), ComponentId::lit("c", 0, 0)};
  c.expect(assignment_to_deletions(abc, {true, false, true}) == ac, "a=T b=F c=T maps to {a, c}");
  Theory t = inst.pt.theory;
  for (const auto& d : ac) t = t.without(d);
  c.expect(serialize_theory(t) == test::read_data("abc_sat_deleted.theory"), "revised text differs");
  c.expect(classify(t, Example{}), "deleting {a, c} should cover the example");

  std::mt19937_64 rng(20240303);
  std::size_t sat_count = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    auto cnf = random_cnf(rng, {10, 20, 3, false});
    auto si = sat_to_ppatch(cnf);
    const auto model = cnf_sat_oracle(cnf);
    const auto result = oracle_patch(si.pt, si.examples);
    const bool repaired = std::holds_alternative<Repaired>(result);
    c.expect(model.has_value() == repaired, "CNF " + std::to_string(i) + ": SAT and repair disagree");
    if (!model || !repaired) continue;
    ++sat_count;
    auto witness = deletions_to_assignment(cnf, deleted_by(std::get<Repaired>(result)));
    c.expect(satisfies(cnf, witness), "CNF " + std::to_string(i) + ": repair is not a model");
    Theory revised = si.pt.theory;
    for (const auto& d : assignment_to_deletions(cnf, *model)) revised = revised.without(d);
    c.expect(classify(revised, Example{}), "CNF " + std::to_string(i) + ": model is not a repair");
    c.expect(deletions_to_assignment(cnf, assignment_to_deletions(cnf, *model)) == *model,
             "CNF " + std::to_string(i) + ": assignment round trip");
  }
  c.expect(sat_count > 0 && sat_count < 100, "random CNFs are all one outcome");
}

void propositionalization(Check& c) {
  std::mt19937_64 rng(20240304);
  std::size_t repaired = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    auto inst = random_qp_instance(rng);
    auto v = validate_fo(inst.pt.theory);
    c.expect(v.quasi_propositional && v.ground_facts_only,
             "instance " + std::to_string(i) + " is not quasi-propositional with ground facts");
    auto p = propositionalize(inst.pt, inst.examples);
    for (std::size_t k = 0; k < inst.examples.size(); ++k) {
      c.expect(classify_fo(inst.pt.theory, inst.examples[k].example) ==
                   classify(p.bundle.pt.theory, p.examples[k].example),
               "instance " + std::to_string(i) + " example " + std::to_string(k) +
                   ": classifications differ");
    }
    auto result = fpatch(inst.pt, inst.examples);
    if (auto* r = std::get_if<FORepaired>(&result)) {
      ++repaired;
      for (std::size_t k = 0; k < inst.examples.size(); ++k) {
        c.expect(classify_fo(r->theory, inst.examples[k].example) == inst.examples[k].label,
                 "instance " + std::to_string(i) + ": patched theory misclassifies " +
                     std::to_string(k));
      }
    }
  }
  c.expect(repaired > 0, "no random instance was repaired");
}

bool only_literals_open(const FOPatchableTheory& pt) {
  for (const auto& id : pt.open) {
    if (id.kind != ComponentId::Kind::Lit) return false;
  }
  return !pt.open.empty();
}

void validator_fidelity(Check& c) {
  std::mt19937_64 rng(20240305);
  for (std::size_t i = 0; i < 50; ++i) {
    auto cnf = random_cnf(rng, {10, 20, 3, true});
    const auto tag = "CNF " + std::to_string(i);
    auto g = monotone_sat_to_fpatch_ground(cnf);
    auto gv = validate_fo(g.pt.theory);
    c.expect(!gv.quasi_propositional, tag + ": ground form is quasi-propositional");
    c.expect(gv.ground_facts_only, tag + ": ground form has non-ground facts");
    c.expect(gv.negation_free, tag + ": ground form has negation");
    c.expect(gv.completely_bound, tag + ": ground form is not completely bound");
    c.expect(gv.depth == 3, tag + ": ground form depth " + std::to_string(gv.depth));
    c.expect(only_literals_open(g.pt), tag + ": ground form opens a clause or predicate");

    auto q = monotone_sat_to_fpatch_qp(cnf);
    auto qv = validate_fo(q.pt.theory);
    c.expect(qv.quasi_propositional, tag + ": lifted form is not quasi-propositional");
    c.expect(qv.completely_bound, tag + ": lifted form is not completely bound");
    c.expect(!qv.ground_facts_only, tag + ": lifted form has only ground facts");
    c.expect(qv.negation_free, tag + ": lifted form has negation");
    c.expect(qv.depth == 3, tag + ": lifted form depth " + std::to_string(qv.depth));
    c.expect(only_literals_open(q.pt), tag + ": lifted form opens a clause or predicate");
  }
}

// Toggling one open component on top of every pattern of the others.
void monotonicity(Check& c, const std::vector<RandomInstance>& instances) {
  std::size_t toggles = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const auto parity = compute_parity(inst.pt.theory);
    const std::vector<ComponentId> open(inst.pt.open.begin(), inst.pt.open.end());
    for (const auto& ex : inst.examples) {
      for (std::size_t k = 0; k < open.size(); ++k) {
        const Parity p = parity.at(open[k]);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << open.size()); ++mask) {
          if (mask >> k & 1U) continue;
          std::vector<ComponentId> base;
          for (std::size_t b = 0; b < open.size(); ++b) {
            if (mask >> b & 1U) base.push_back(open[b]);
          }
          const bool before = classify_with(inst.pt.theory, ex.example, base);
          base.push_back(open[k]);
          const bool after = classify_with(inst.pt.theory, ex.example, base);
          ++toggles;
          if (p == Parity::Even) {
            c.expect(!before || after, "instance " + std::to_string(i) + ": even " +
                                           open[k].str() + " flipped T to F");
          } else if (p == Parity::Odd) {
            c.expect(before || !after, "instance " + std::to_string(i) + ": odd " +
                                           open[k].str() + " flipped F to T");
          } else {
            c.expect(false, "instance " + std::to_string(i) + ": open component without parity");
          }
        }
      }
    }
  }
  c.expect(toggles > 0, "no togglings performed");
}

struct Criterion {
  int number;
  const char* name;
  double limit_seconds;
  std::function<void(Check&)> body;
};

}  // namespace

int main() {
  // Generated inside criterion 3 so its time counts there; reused by 8.
  std::vector<RandomInstance> instances;
  const std::vector<Criterion> criteria{
      {1, "cup fixtures: classification, generalized/specialized theories, stability", 1.0,
       cup_fixtures},
      {2, "cup patching end to end", 1.0, cup_end_to_end},
      {3, "stability matches exhaustive oracle on 200 random instances", 60.0,
       [&](Check& c) {
         instances = stability_instances();
         stability_equivalence(c, instances);
       }},
      {4, "patching matches exhaustive oracle and verifies on 200 random instances", 120.0,
       patch_equivalence},
      {5, "SAT reduction round trip on 100 random CNFs and the worked example", 60.0,
       sat_round_trip},
      {6, "propositionalization preserves classification on 100 lifted instances", 60.0,
       propositionalization},
      {7, "validator reports for the monotone-SAT constructions", 5.0, validator_fidelity},
      {8, "monotonicity of even and odd components under toggling", 60.0,
       [&](Check& c) { monotonicity(c, instances); }},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= cr.limit_seconds) {
      check.failures.push_back("took " + std::to_string(secs) + " s, limit " +
                               std::to_string(cr.limit_seconds) + " s");
    }
    const bool ok = check.failures.empty();
    if (!ok) ++failed;
    std::printf("%s  criterion %d  %-78s %8.3f s\n", ok ? "PASS" : "FAIL", cr.number, cr.name,
                secs);
    for (const auto& f : check.failures) std::printf("      %s\n", f.c_str());
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
