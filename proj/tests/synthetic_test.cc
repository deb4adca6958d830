#include "sentplan/synthetic.h"

#include <gtest/gtest.h>

#include <set>

namespace sentplan {
namespace {

TEST(SyntheticPlans, AlternateStrategies) {
  auto plans = synthetic_plans(6, 3);
  ASSERT_EQ(plans.size(), 6u);
  for (std::size_t i = 0; i < plans.size(); ++i) {
    EXPECT_EQ(plans[i].strategy, i % 2 == 0 ? Strategy::kRecommend : Strategy::kCompare3);
    EXPECT_TRUE(validate_plan(plans[i]).empty());
  }
  EXPECT_EQ(plans[0].plan_id, "synthetic-000");
}

TEST(SyntheticPlans, Deterministic) {
  auto a = synthetic_plans(4, 9);
  auto b = synthetic_plans(4, 9);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(serialize_plan(a[i]), serialize_plan(b[i]));
}

TEST(SyntheticCorpus, RatingsFollowPeriods) {
  auto corpus = build_synthetic_corpus({.plans = 6, .max_alts = 12, .seed = 2});
  ASSERT_EQ(corpus.matrix.num_rows(), corpus.alternatives.size());
  ASSERT_EQ(corpus.ratings.size(), corpus.alternatives.size());
  std::set<double> levels;
  for (std::size_t r = 0; r < corpus.ratings.size(); ++r) {
    const double k = static_cast<double>(period_count(corpus.alternatives[r].sp_tree));
    const double expected = std::max(1.0, std::min(5.0, 5.0 - k));
    EXPECT_EQ(*corpus.ratings[r], expected);
    levels.insert(expected);
  }
  EXPECT_GE(levels.size(), 3u);
}

TEST(PeriodCount, CountsInternalPeriodNodes) {
  SpNode leaf;
  leaf.assertion_id = 1;
  SpNode period;
  period.operation = Operation::kPeriod;
  period.children = {leaf, leaf};
  SpNode top;
  top.operation = Operation::kMerge;
  top.children = {period, leaf};
  EXPECT_EQ(period_count(leaf), 0u);
  EXPECT_EQ(period_count(top), 1u);
}

}  // namespace
}  // namespace sentplan
