#pragma once

// Synthetic corpora with programmatic ratings, for checking the ranker end
// to end when no human judgements are at hand. The oracle rating is
// 5 - (number of PERIOD operations in the sp-tree), clamped to [1, 5].

#include <cstdint>
#include <vector>

#include "sentplan/evaluation.h"
#include "sentplan/features.h"
#include "sentplan/plan.h"
#include "sentplan/sentence_plan.h"

namespace sentplan {

// Recommendations (claim plus four attributes) and two-restaurant
// comparisons over two shared attributes, alternating.
std::vector<ContentPlan> synthetic_plans(std::size_t count, std::uint64_t seed);

std::size_t period_count(const SpNode& root);
double oracle_rating(const SpgAlternative& alt);

struct SyntheticCorpus {
  std::vector<ContentPlan> plans;
  std::vector<SpgAlternative> alternatives;  // aligned with matrix rows
  FeatureMatrix matrix;
  Ratings ratings;
};

struct SyntheticOptions {
  std::size_t plans = 30;
  std::size_t max_alts = 20;
  std::uint64_t seed = 1;
  std::size_t min_count = 10;
  OperatorDistribution distribution = OperatorDistribution::uniform();
};

SyntheticCorpus build_synthetic_corpus(const SyntheticOptions& options);

}  // namespace sentplan
