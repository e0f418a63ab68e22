#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tpatch/error.hpp"
#include "tpatch/firstorder.hpp"

using namespace tpatch;

namespace {

FOTheory load(const std::string& name) { return parse_fo_theory(test::read_data(name)); }

FOPatchableTheory cup_pt() {
  return {load("cup.fo"), parse_open(test::read_data("cup_fo.open"))};
}

}  // namespace

TEST(FOParse, RoundTrip) {
  for (const char* name : {"qp.fo", "permuted.fo", "bound.fo", "cup.fo"}) {
    auto t = load(name);
    auto text = serialize_fo_theory(t);
    EXPECT_EQ(parse_fo_theory(text), t) << name;
    EXPECT_EQ(serialize_fo_theory(parse_fo_theory(text)), text) << name;
  }
}

TEST(FOParse, Structure) {
  auto t = load("cup.fo");
  EXPECT_EQ(t.root(), "cup");
  EXPECT_EQ(t.root_arity(), 1u);
  EXPECT_TRUE(t.is_fact_predicate("ceramic"));
  EXPECT_TRUE(t.is_defined("graspable"));
  EXPECT_EQ(t.clauses().size(), 7u);
  EXPECT_EQ(enumerate_fo_components(t).size(), 25u);
}

TEST(FOParse, Errors) {
  EXPECT_THROW(parse_fo_theory("r(X) :- q(X)."), ParseError);
  EXPECT_THROW(parse_fo_theory("root r/1.\nr(X) :- q(X), q(X,Y).\n"), InputError);
  EXPECT_THROW(parse_fo_theory("root r/1.\nr(X) :- q(X).\nq(X) :- r(X).\n"), InputError);
  EXPECT_THROW(parse_fo_theory("root r/1.\nr(X) :- Q(X).\n"), ParseError);
  EXPECT_THROW(FOTheory("r", 1, {FOClause{Atom{"r", {Term::var("X")}},
                                          {FOLiteral{Atom{"q", {Term::var("X")}}}}}},
                        {Atom{"r", {Term::constant("1")}}}),
               InputError);
}

TEST(FOParse, BodilessAtomOfDefinedPredicateIsAClause) {
  auto t = parse_fo_theory("root r/1.\nr(X) :- q(X).\nq(1).\nq(X) :- s(X).\n");
  EXPECT_TRUE(t.is_defined("q"));
  EXPECT_EQ(t.clause_slots("q"), 2u);
  EXPECT_TRUE(t.facts().empty());
  EXPECT_TRUE(classify_fo(t, FOExample{{"1"}}));
  EXPECT_FALSE(classify_fo(t, FOExample{{"2"}}));
}

TEST(FOExamples, Parse) {
  auto es = parse_fo_examples("+ 0 1 a\n# note\n- 1 1 b\n");
  ASSERT_EQ(es.size(), 2u);
  EXPECT_EQ(es[0].example.args, (std::vector<std::string>{"0", "1", "a"}));
  EXPECT_FALSE(es[1].label);
  EXPECT_EQ(serialize_fo_examples(es), "+ 0 1 a\n- 1 1 b\n");
  EXPECT_THROW(parse_fo_examples("+ X\n"), InputError);
}

TEST(Validate, DisplayTheories) {
  auto qp = validate_fo(load("qp.fo"));
  EXPECT_TRUE(qp.quasi_propositional);
  EXPECT_TRUE(qp.completely_bound);

  auto permuted = validate_fo(load("permuted.fo"));
  EXPECT_FALSE(permuted.quasi_propositional);
  EXPECT_TRUE(permuted.completely_bound);
  EXPECT_EQ(permuted.not_propositional,
            (std::vector<ComponentId>{ComponentId::lit("q", 0, 0), ComponentId::lit("q", 1, 1)}));

  auto bound = validate_fo(load("bound.fo"));
  EXPECT_TRUE(bound.completely_bound);
  EXPECT_FALSE(bound.quasi_propositional);

  auto loose = validate_fo(parse_fo_theory("root r/1.\nr(X) :- q(X, Y).\n"));
  EXPECT_FALSE(loose.completely_bound);
  EXPECT_FALSE(loose.quasi_propositional);
  EXPECT_EQ(loose.unbound, (std::vector<ComponentId>{ComponentId::lit("r", 0, 0)}));
}

TEST(Validate, DepthAndFacts) {
  auto v = validate_fo(load("cup.fo"));
  EXPECT_EQ(v.depth, 3u);
  EXPECT_TRUE(v.ground_facts_only);
  EXPECT_TRUE(v.negation_free);
  auto nonground = validate_fo(parse_fo_theory("root r/2.\nr(X,Y) :- p(X,Y).\np(0,Y).\n"));
  EXPECT_FALSE(nonground.ground_facts_only);
  EXPECT_EQ(nonground.nonground_facts, (std::vector<std::string>{"p(0,Y)"}));
}

TEST(ClassifyFO, GroundFacts) {
  auto t = parse_fo_theory("root r/1.\nr(X) :- one(X).\none(1).\n");
  EXPECT_TRUE(classify_fo(t, FOExample{{"1"}}));
  EXPECT_FALSE(classify_fo(t, FOExample{{"0"}}));
  EXPECT_THROW(classify_fo(t, FOExample{{"0", "1"}}), InputError);
}

TEST(ClassifyFO, NonGroundFacts) {
  auto t = parse_fo_theory("root r/3.\nr(X,Y,W) :- zero1(X,Y,W).\nzero1(0,X2,W).\n");
  EXPECT_TRUE(classify_fo(t, FOExample{{"0", "1", "1"}}));
  EXPECT_TRUE(classify_fo(t, FOExample{{"0", "0", "7"}}));
  EXPECT_FALSE(classify_fo(t, FOExample{{"1", "0", "0"}}));
}

TEST(ClassifyFO, RepeatedVariablesAndNegation) {
  auto t = parse_fo_theory("root r/2.\nr(X,Y) :- e(X,Y), not e(Y,X).\ne(a,b).\ne(c,c).\n");
  EXPECT_TRUE(classify_fo(t, FOExample{{"a", "b"}}));
  EXPECT_FALSE(classify_fo(t, FOExample{{"c", "c"}}));
  auto same = parse_fo_theory("root r/1.\nr(X) :- p(X,X).\np(Y,Y).\n");
  EXPECT_TRUE(classify_fo(same, FOExample{{"z"}}));
}

TEST(ClassifyFO, UnboundVariablesRangeOverConstants) {
  auto t = parse_fo_theory("root r/1.\nr(X) :- e(X,Y), not bad(Y).\ne(a,b).\ne(a,c).\nbad(b).\n");
  EXPECT_TRUE(classify_fo(t, FOExample{{"a"}}));
  auto u = parse_fo_theory("root r/1.\nr(X) :- e(X), not bad(Y).\ne(a).\nbad(a).\n");
  EXPECT_FALSE(classify_fo(u, FOExample{{"a"}}));
}

TEST(ClassifyFO, MatchesCupExamples) {
  auto t = load("cup.fo");
  EXPECT_FALSE(classify_fo(t, FOExample{{"obj1"}}));
  EXPECT_TRUE(classify_fo(t, FOExample{{"obj2"}}));
  EXPECT_FALSE(classify_fo(t, FOExample{{"obj5"}}));
  std::vector<ComponentId> off{ComponentId::lit("graspable", 1, 1)};
  EXPECT_TRUE(classify_fo_with(t, FOExample{{"obj1"}}, off));
}

TEST(Propositionalize, CupBundle) {
  auto pt = cup_pt();
  auto es = parse_fo_examples(test::read_data("cup_train.foexamples"));
  auto prop = propositionalize(pt, es);
  EXPECT_EQ(prop.bundle.pt.theory, parse_theory(test::read_data("cup.theory")));
  EXPECT_EQ(prop.bundle.component_map.size(), 2u);
  EXPECT_EQ(prop.bundle.predicate_map.at("graspable(X1)"), "graspable");
  auto expected = parse_examples(test::read_data("cup_train.examples"));
  ASSERT_EQ(prop.examples.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(prop.examples[i].example, expected[i].example);
    EXPECT_EQ(prop.examples[i].label, expected[i].label);
  }
  EXPECT_EQ(compute_fo_parity(pt.theory), compute_parity(prop.bundle.pt.theory));
}

TEST(Propositionalize, QpDisplayTheory) {
  FOPatchableTheory pt(load("qp.fo"), {});
  auto prop = propositionalize(pt, {});
  const auto& hat = prop.bundle.pt.theory;
  EXPECT_TRUE(hat.has_proposition("q"));
  EXPECT_TRUE(hat.is_primitive("s"));
  EXPECT_TRUE(hat.is_primitive("t"));
}

TEST(Propositionalize, EmptyFactSet) {
  FOPatchableTheory pt(load("qp.fo"), {});
  std::vector<FOLabeledExample> es{{FOExample{{"a", "b", "c"}}, true}};
  auto prop = propositionalize(pt, es);
  EXPECT_TRUE(prop.examples[0].example.true_primitives.empty());
}

TEST(Propositionalize, Preconditions) {
  FOPatchableTheory permuted(load("permuted.fo"), {});
  try {
    propositionalize(permuted, {});
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_EQ(e.witness(), (std::vector<std::string>{"l:q/0/0", "l:q/1/1"}));
  }
  FOPatchableTheory nonground(parse_fo_theory("root r/1.\nr(X) :- p(X).\np(X).\n"), {});
  EXPECT_THROW(propositionalize(nonground, {}), PreconditionError);
  FOPatchableTheory undefined(
      parse_fo_theory("root r/1.\nr(X) :- a(X), d(X).\nd(X) :- not a(X).\na(X) :- x(X).\n"),
      {ComponentId::clause_of("a", 0)});
  EXPECT_THROW(propositionalize(undefined, {}), PreconditionError);
}

TEST(Fpatch, CupObjects) {
  auto pt = cup_pt();
  auto es = parse_fo_examples(test::read_data("cup_train.foexamples"));
  auto result = fpatch(pt, es);
  ASSERT_TRUE(std::holds_alternative<FORepaired>(result));
  const auto& r = std::get<FORepaired>(result);
  ASSERT_EQ(r.revisions.size(), 2u);
  EXPECT_EQ(r.revisions[0].kind, Revision::Kind::Delete);
  EXPECT_EQ(r.revisions[1].kind, Revision::Kind::Disable);
  EXPECT_EQ(r.revisions[1].disabling, (std::set<ExampleIndex>{1}));
  EXPECT_EQ(r.revisions[1].synthesized,
            (std::vector<std::string>{"graspable(X) :- has_handle(X), not _aux_c_graspable_0(X).",
                                      "_aux_c_graspable_0(obj2)."}));
  for (const auto& e : es) EXPECT_EQ(classify_fo(r.theory, e.example), e.label);
  EXPECT_TRUE(oracle_fpatch_repairable(pt, es));
  // The revised theory is itself reducible again.
  auto v = validate_fo(r.theory);
  EXPECT_TRUE(v.quasi_propositional);
  EXPECT_TRUE(v.ground_facts_only);
}

TEST(Fpatch, StableMisclassification) {
  auto pt = cup_pt();
  auto es = parse_fo_examples(test::read_data("cup_e5.foexamples"));
  EXPECT_TRUE(std::holds_alternative<Unrepairable>(fpatch(pt, es)));
  EXPECT_FALSE(oracle_fpatch_repairable(pt, es));
}

TEST(Fpatch, SameFactsDifferentObjects) {
  // Two objects with identical facts but opposite labels: the first-order
  // revision can still tell their instantiations apart.
  auto t = parse_fo_theory("root r/1.\nr(X) :- p(X).\np(X) :- f(X).\nf(a).\nf(b).\n");
  FOPatchableTheory pt(t, {ComponentId::clause_of("p", 0)});
  std::vector<FOLabeledExample> es{{FOExample{{"a"}}, true}, {FOExample{{"b"}}, false}};
  auto result = fpatch(pt, es);
  ASSERT_TRUE(std::holds_alternative<FORepaired>(result));
  EXPECT_TRUE(oracle_fpatch_repairable(pt, es));
  es.push_back({FOExample{{"a"}}, false});
  EXPECT_TRUE(std::holds_alternative<Unrepairable>(fpatch(pt, es)));
  EXPECT_FALSE(oracle_fpatch_repairable(pt, es));
}

TEST(Fpatch, NotQuasiPropositional) {
  FOPatchableTheory pt(load("permuted.fo"), {ComponentId::clause_of("q", 0)});
  EXPECT_THROW(fpatch(pt, {}), PreconditionError);
}

TEST(FODelete, PredicateForcedTrue) {
  auto t = load("cup.fo").without(ComponentId::prop("graspable"));
  EXPECT_TRUE(classify_fo(t, FOExample{{"obj5"}}));
  auto text = serialize_fo_theory(t);
  EXPECT_NE(text.find("\ngraspable(X1).\n"), std::string::npos);
  EXPECT_TRUE(classify_fo(parse_fo_theory(text), FOExample{{"obj5"}}));
}
