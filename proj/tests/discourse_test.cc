#include "sentplan/discourse.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "test_plans.h"

namespace sentplan {
namespace {

std::multiset<int> plan_ids(const ContentPlan& p) {
  std::multiset<int> out;
  for (const auto& a : p.assertions) out.insert(a.id);
  return out;
}

void expect_valid(const TpNode& n, const ContentPlan& plan) {
  if (n.is_leaf()) return;
  EXPECT_GE(n.children.size(), 2u);
  if (n.relation != DiscourseRelation::kInfer) {
    // Every non-infer node mirrors a relation instance of the plan.
    bool found = n.relation == DiscourseRelation::kContrast &&
                 std::all_of(n.children.begin(), n.children.end(),
                             [](const TpNode& c) { return !c.is_leaf(); });
    for (const auto& rel : plan.relations) {
      if (to_string(rel.kind) == to_string(n.relation)) found = true;
    }
    EXPECT_TRUE(found) << to_string(n);
  }
  for (const auto& c : n.children) expect_valid(c, plan);
}

TEST(BuildTpTrees, RecommendIncludesClaimFirstInferTree) {
  ContentPlan plan = testing::chanpen_thai();
  auto trees = build_tp_trees(plan, 50, 7);
  ASSERT_FALSE(trees.empty());
  bool claim_first = false;
  bool claim_last = false;
  for (const auto& t : trees) {
    auto order = leaf_order(t);
    EXPECT_EQ(std::multiset<int>(order.begin(), order.end()), plan_ids(plan));
    ASSERT_EQ(t.root.relation, DiscourseRelation::kJustify);
    ASSERT_EQ(t.root.children.size(), 2u);
    EXPECT_TRUE(order.front() == 1 || order.back() == 1);
    if (t.root.nucleus == 0) {
      EXPECT_TRUE(t.root.children[0].is_leaf());
      EXPECT_EQ(t.root.children[1].relation, DiscourseRelation::kInfer);
      EXPECT_EQ(t.root.children[1].children.size(), 4u);
      claim_first = true;
    } else {
      claim_last = true;
    }
    expect_valid(t.root, plan);
  }
  EXPECT_TRUE(claim_first);
  EXPECT_TRUE(claim_last);
}

TEST(BuildTpTrees, Compare3Families) {
  ContentPlan plan = testing::above_carmines();
  auto trees = build_tp_trees(plan, 200, 3);
  bool by_attribute = false;
  bool by_entity = false;
  for (const auto& t : trees) {
    auto order = leaf_order(t);
    EXPECT_EQ(std::multiset<int>(order.begin(), order.end()), plan_ids(plan));
    EXPECT_EQ(order.front(), 1);
    expect_valid(t.root, plan);
    if (t.grouping == Grouping::kByAttribute) {
      by_attribute = true;
      for (const auto& rel : plan.relations) {
        if (rel.kind != RelationKind::kContrast) continue;
        auto a = std::find(order.begin(), order.end(), rel.nuclei[0]);
        auto b = std::find(order.begin(), order.end(), rel.nuclei[1]);
        EXPECT_EQ(std::abs(static_cast<int>(a - b)), 1);
      }
    } else {
      ASSERT_EQ(t.grouping, Grouping::kByEntity);
      by_entity = true;
      EXPECT_EQ(entity_switch_count(t), 1u);
    }
  }
  EXPECT_TRUE(by_attribute);
  EXPECT_TRUE(by_entity);
}

TEST(BuildTpTrees, ClaimOnly) {
  auto trees = build_tp_trees(testing::claim_only(), 20, 1);
  ASSERT_EQ(trees.size(), 1u);
  EXPECT_TRUE(trees[0].root.is_leaf());
  EXPECT_EQ(trees[0].root.speech_act, "assert-reco-best");
}

TEST(BuildTpTrees, Compare2) {
  ContentPlan plan = testing::buon_gusto();
  auto trees = build_tp_trees(plan, 20, 1);
  ASSERT_GE(trees.size(), 1u);
  for (const auto& t : trees) {
    EXPECT_EQ(t.root.relation, DiscourseRelation::kContrast);
    EXPECT_EQ(t.root.children.size(), 2u);
  }
}

TEST(BuildTpTrees, DeterministicAndBounded) {
  ContentPlan plan = testing::above_carmines();
  for (std::size_t max : {1u, 3u, 20u}) {
    auto a = build_tp_trees(plan, max, 11);
    auto b = build_tp_trees(plan, max, 11);
    ASSERT_EQ(a.size(), b.size());
    EXPECT_LE(a.size(), max);
    EXPECT_GE(a.size(), 1u);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].root, b[i].root);
  }
}

TEST(EntitySwitchCount, InterleavedOrder) {
  // Interleaved: Above, Carmine's, Above, Carmine's, Above, Carmine's.
  TpTree t;
  t.root.relation = DiscourseRelation::kInfer;
  for (int i = 0; i < 6; ++i) {
    TpNode leaf;
    leaf.assertion_id = i + 2;
    leaf.entity = i % 2 == 0 ? "Above" : "Carmine's";
    t.root.children.push_back(leaf);
  }
  EXPECT_EQ(entity_switch_count(t), 5u);
  TpNode claim;
  claim.assertion_id = 1;
  t.root.children.insert(t.root.children.begin() + 3, claim);
  EXPECT_EQ(entity_switch_count(t), 5u);
}

TEST(EntitySwitchCount, RecommendIsZero) {
  for (const auto& t : build_tp_trees(testing::chanpen_thai(), 10, 2)) {
    EXPECT_EQ(entity_switch_count(t), 0u);
  }
}

TEST(SpeechActLabel, Names) {
  EXPECT_EQ(speech_act_label(Strategy::kRecommend, Predicate::kClaimBest),
            "assert-reco-best");
  EXPECT_EQ(speech_act_label(Strategy::kCompare3, Predicate::kDecor),
            "assert-com-decor");
  EXPECT_EQ(speech_act_label(Strategy::kRecommend, Predicate::kFoodQuality),
            "assert-reco-food-quality");
}

}  // namespace
}  // namespace sentplan
