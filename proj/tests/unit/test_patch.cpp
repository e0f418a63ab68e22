#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "tpatch/error.hpp"
#include "tpatch/patch.hpp"

using namespace tpatch;

namespace {

PatchableTheory cup_pt() {
  return {parse_theory(test::read_data("cup.theory")), parse_open(test::read_data("cup.open"))};
}
std::vector<LabeledExample> train() { return parse_examples(test::read_data("cup_train.examples")); }
std::vector<LabeledExample> e5() { return parse_examples(test::read_data("cup_e5.examples")); }

const ComponentId kCeramic = ComponentId::lit("graspable", 1, 1);
const ComponentId kHandleClause = ComponentId::clause_of("graspable", 0);

}  // namespace

TEST(Obstruction, CupSets) {
  auto pt = cup_pt();
  auto es = train();
  auto lit = obstruction(pt, kCeramic, es);
  EXPECT_EQ(lit.obstructive, (std::set<ExampleIndex>{0}));
  EXPECT_TRUE(lit.protected_examples.empty());
  auto clause = obstruction(pt, kHandleClause, es);
  EXPECT_EQ(clause.obstructive, (std::set<ExampleIndex>{1}));
  EXPECT_EQ(clause.protected_examples, (std::set<ExampleIndex>{2, 3}));
}

TEST(Pbenign, CupRevisions) {
  auto pt = cup_pt();
  auto es = train();
  auto lit = std::get<Revision>(pbenign(pt, kCeramic, es));
  EXPECT_EQ(lit.kind, Revision::Kind::Delete);
  auto clause = std::get<Revision>(pbenign(pt, kHandleClause, es));
  EXPECT_EQ(clause.kind, Revision::Kind::Disable);
  EXPECT_EQ(clause.disabling, (std::set<ExampleIndex>{1}));
  auto fail = pbenign(pt, kCeramic, e5());
  ASSERT_TRUE(std::holds_alternative<Unrepairable>(fail));
  EXPECT_EQ(std::get<Unrepairable>(fail).examples, (std::vector<ExampleIndex>{0}));
}

TEST(Pbenign, UnconstrainedComponents) {
  // With neither obstructive nor protected examples a literal is deleted and
  // a clause is left alone.
  auto pt = cup_pt();
  std::vector<LabeledExample> es{{Example{}, false}};
  auto lit = obstruction(pt, kCeramic, es);
  EXPECT_TRUE(lit.obstructive.empty());
  EXPECT_TRUE(lit.protected_examples.empty());
  EXPECT_EQ(std::get<Revision>(pbenign(pt, kCeramic, es)).kind, Revision::Kind::Delete);
  EXPECT_EQ(std::get<Revision>(pbenign(pt, kHandleClause, es)).kind, Revision::Kind::Null);
}

TEST(Ppatch, CupEndToEnd) {
  auto pt = cup_pt();
  auto es = train();
  auto result = ppatch(pt, es);
  ASSERT_TRUE(std::holds_alternative<Repaired>(result));
  const auto& repaired = std::get<Repaired>(result);
  ASSERT_EQ(repaired.revisions.size(), 2u);
  EXPECT_EQ(repaired.revisions[0].target, kCeramic);
  EXPECT_EQ(repaired.revisions[0].kind, Revision::Kind::Delete);
  EXPECT_EQ(repaired.revisions[1].target, kHandleClause);
  EXPECT_EQ(repaired.revisions[1].kind, Revision::Kind::Disable);
  EXPECT_EQ(repaired.revisions[1].disabling, (std::set<ExampleIndex>{1}));
  for (const auto& e : es) EXPECT_EQ(classify(repaired.theory, e.example), e.label);

  const std::vector<std::string> added{
      "graspable :- has_handle, not _aux_c_graspable_0.",
      "_aux_c_graspable_0 :- has_bottom, light_weight, has_concavity, upward_concavity, "
      "has_straw, has_handle, small, ceramic, not dry."};
  EXPECT_EQ(repaired.revisions[1].synthesized, added);

  auto report = verify_patch(pt, repaired.revisions, es);
  EXPECT_TRUE(report.passed());
  EXPECT_TRUE(std::holds_alternative<Repaired>(oracle_patch(pt, es)));
}

TEST(Ppatch, E5Unrepairable) {
  auto pt = cup_pt();
  auto result = ppatch(pt, e5());
  ASSERT_TRUE(std::holds_alternative<Unrepairable>(result));
  EXPECT_TRUE(std::holds_alternative<Unrepairable>(oracle_patch(pt, e5())));
}

TEST(Ppatch, UnconstrainedLiteralDeletedFirst) {
  // Keeping `not x5` would leave `not x1` needed by example 5 and harmful to
  // example 6.
  auto t = parse_theory(
      "root r.\nprimitive x2.\nr :- not x5.\nr :- not x1, x4.\n"
      "p1 :- x3, x4.\n");
  PatchableTheory pt(t, {ComponentId::clause_of("r", 0), ComponentId::lit("r", 0, 0),
                         ComponentId::lit("r", 1, 0), ComponentId::lit("r", 1, 1)});
  auto es = parse_examples(
      "+ x2 x4\n- x1 x5\n+ x5\n- x1\n+ x1 x2\n+ x1 x4 x5\n- x1 x3 x4\n+ x4\n");
  auto result = ppatch(pt, es);
  ASSERT_TRUE(std::holds_alternative<Repaired>(result));
  EXPECT_EQ(std::get<Repaired>(result).revisions[0].kind, Revision::Kind::Delete);
  EXPECT_TRUE(verify_patch(pt, std::get<Repaired>(result).revisions, es).passed());
}

TEST(Ppatch, GreedyLiteralChoiceCanMissARepair) {
  // Known gap: with no obstructive or protected example the first literal is
  // deleted, after which the second one is pulled both ways. Keeping `a` and
  // deleting `b` repairs the theory, and the oracle finds it.
  auto t = parse_theory("root r.\nr :- a, b.\n");
  PatchableTheory pt(t, {ComponentId::lit("r", 0, 0), ComponentId::lit("r", 0, 1)});
  auto es = parse_examples("+ a\n-\n");
  auto first = obstruction(pt, ComponentId::lit("r", 0, 0), es);
  EXPECT_TRUE(first.obstructive.empty());
  EXPECT_TRUE(first.protected_examples.empty());
  auto result = ppatch(pt, es);
  ASSERT_TRUE(std::holds_alternative<Unrepairable>(result));
  EXPECT_EQ(std::get<Unrepairable>(result).component, ComponentId::lit("r", 0, 1));
  auto witness = oracle_patch(pt, es);
  ASSERT_TRUE(std::holds_alternative<Repaired>(witness));
  EXPECT_EQ(std::get<Repaired>(witness).revisions[0].kind, Revision::Kind::Null);
  EXPECT_EQ(std::get<Repaired>(witness).revisions[1].kind, Revision::Kind::Delete);
}

TEST(Ppatch, ContradictoryExamples) {
  auto pt = cup_pt();
  auto es = train();
  es.push_back({es[0].example, false});
  auto result = ppatch(pt, es);
  ASSERT_TRUE(std::holds_alternative<Unrepairable>(result));
  EXPECT_EQ(std::get<Unrepairable>(result).examples, (std::vector<ExampleIndex>{0, 4}));
}

TEST(Ppatch, PreconditionErrors) {
  auto t = parse_theory("root r.\nr :- a, d.\nd :- not a.\na :- x.\n");
  PatchableTheory pt(t, {ComponentId::lit("a", 0, 0)});
  EXPECT_THROW(ppatch(pt, {}), PreconditionError);
  PatchableTheory del(parse_theory(test::read_data("cup.theory")),
                      parse_open(test::read_data("cup.open")), RevisionPolicy::DeletionOnly);
  EXPECT_THROW(ppatch(del, train()), PreconditionError);
}

TEST(Ppatch, PropositionDisable) {
  auto t = parse_theory("root r.\nr :- a, b.\na :- x.\nb :- y.\n");
  PatchableTheory pt(t, {ComponentId::prop("a")});
  std::vector<LabeledExample> es{{Example{{"y"}}, true}, {Example{}, false}, {Example{{"x"}}, false}};
  auto result = ppatch(pt, es);
  ASSERT_TRUE(std::holds_alternative<Repaired>(result));
  const auto& r = std::get<Repaired>(result);
  EXPECT_EQ(r.revisions[0].kind, Revision::Kind::Disable);
  EXPECT_EQ(r.revisions[0].disabling, (std::set<ExampleIndex>{0}));
  EXPECT_EQ(r.revisions[0].synthesized[0], "a :- _aux_p_a.");
  for (const auto& e : es) EXPECT_EQ(classify(r.theory, e.example), e.label);
  EXPECT_TRUE(verify_patch(pt, r.revisions, es).passed());
}

TEST(Synthesis, FreshNameCollision) {
  auto t = parse_theory("root r.\nr :- a, not _aux_c_a_0.\na :- x.\n_aux_c_a_0 :- y.\n");
  std::vector<LabeledExample> es{{Example{{"x"}}, false}};
  EXPECT_THROW(synthesize(t, Revision::disable(ComponentId::clause_of("a", 0), {0}), es),
               InputError);
}

TEST(Synthesis, DuplicateExamplesShareAuxClause) {
  auto t = parse_theory("root r.\nr :- x.\n");
  std::vector<LabeledExample> es{{Example{{"x"}}, false}, {Example{{"x"}}, false}};
  auto s = synthesize_edit(t, Revision::disable(ComponentId::clause_of("r", 0), {0, 1}), es);
  EXPECT_EQ(s.added.size(), 2u);
  EXPECT_FALSE(classify(s.theory, es[0].example));
}

TEST(Verify, RejectsWrongDisablingSet) {
  auto pt = cup_pt();
  auto es = train();
  std::vector<Revision> revs{Revision::remove(kCeramic), Revision::disable(kHandleClause, {1, 2})};
  auto report = verify_patch(pt, revs, es);
  EXPECT_FALSE(report.passed());
  EXPECT_FALSE(report.classification_ok);
  EXPECT_EQ(report.misclassified, (std::vector<ExampleIndex>{2}));
  EXPECT_FALSE(report.components[1].misses_protected);
}

TEST(Verify, ImplicitNullChecked) {
  auto pt = cup_pt();
  auto es = train();
  auto report = verify_patch(pt, std::vector<Revision>{Revision::remove(kCeramic)}, es);
  ASSERT_EQ(report.components.size(), 2u);
  EXPECT_FALSE(report.components[1].explicit_revision);
  EXPECT_FALSE(report.components[1].contains_obstructive);
  EXPECT_FALSE(report.passed());
}

TEST(ProcessingOrder, LiteralsFirst) {
  auto t = parse_theory("root r.\nr :- a, b.\na :- x.\nb :- y.\n");
  PatchableTheory pt(t, {ComponentId::prop("a"), ComponentId::clause_of("b", 0),
                         ComponentId::lit("r", 0, 1), ComponentId::lit("a", 0, 0)});
  std::vector<ComponentId> expected{ComponentId::lit("r", 0, 1), ComponentId::lit("a", 0, 0),
                                    ComponentId::clause_of("b", 0), ComponentId::prop("a")};
  EXPECT_EQ(processing_order(pt), expected);
}

TEST(Oracle, DeletionOnly) {
  auto t = parse_theory(test::read_data("abc_sat.theory"));
  PatchableTheory pt(t,
                     {ComponentId::lit("a", 0, 0), ComponentId::lit("b", 0, 0),
                      ComponentId::lit("c", 0, 0)},
                     RevisionPolicy::DeletionOnly);
  std::vector<LabeledExample> es{{Example{}, true}};
  auto result = oracle_patch(pt, es);
  ASSERT_TRUE(std::holds_alternative<Repaired>(result));
  const auto& r = std::get<Repaired>(result);
  EXPECT_TRUE(classify(r.theory, Example{}));
  // a = T, b = F, c = T is the only model.
  EXPECT_EQ(r.revisions[0].kind, Revision::Kind::Delete);
  EXPECT_EQ(r.revisions[1].kind, Revision::Kind::Null);
  EXPECT_EQ(r.revisions[2].kind, Revision::Kind::Delete);
}

TEST(Oracle, Budget) {
  auto pt = cup_pt();
  std::vector<LabeledExample> es(13, LabeledExample{Example{}, false});
  EXPECT_THROW(oracle_patch(pt, es), BudgetExceeded);
}
