#pragma once

// Pairwise ranking with RankBoost. Weak rules are threshold indicators
// h(x) = [x_f >= theta]; the model scores F(x) = sum alpha_s h_s(x).

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentplan/features.h"

namespace sentplan {

// `preferred` was rated strictly higher than `other`; both are row indices
// of the same plan.
struct PreferencePair {
  std::size_t preferred = 0;
  std::size_t other = 0;
};

struct PairSet {
  std::vector<PreferencePair> pairs;
  std::vector<std::string> plan_ids;  // per pair

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

// One pair for every two rated rows of a plan with different ratings.
// Unrated rows are nullopt.
PairSet make_pairs(const std::vector<RowId>& rows,
                   const std::vector<std::optional<double>>& ratings);

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

struct Rule {
  std::string feature;
  double threshold = kMinusInfinity;
  double alpha = 0;
  bool operator==(const Rule&) const = default;
};

struct RankModel {
  std::vector<Rule> rules;
  int rounds = 0;
  std::uint64_t seed = 0;
  std::string feature_set;
  bool operator==(const RankModel&) const = default;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainOptions {
  int rounds = 100;
  std::uint64_t seed = 0;
  std::string feature_set;
};

// Exponential pair loss after each round; entry 0 is the loss of the zero
// model (1.0).
using LossTrace = std::vector<double>;

// Throws TrainingError on an empty pair set, and std::logic_error if the
// exponential loss ever increases.
RankModel train(const PairSet& pairs, const FeatureMatrix& matrix,
                const TrainOptions& options, LossTrace* trace = nullptr);

double score(const RankModel& model, const FeatureVector& x);
std::vector<double> score_rows(const RankModel& model, const FeatureMatrix& matrix);

// Fraction of pairs with F(preferred) <= F(other). An empty pair set gives 0
// and sets *empty.
double rank_loss(const std::vector<double>& scores, const PairSet& pairs,
                 bool* empty = nullptr);

// Mean of exp(F(other) - F(preferred)) over pairs.
double exponential_loss(const std::vector<double>& scores, const PairSet& pairs);

nlohmann::json model_to_json(const RankModel& model);
RankModel model_from_json(const nlohmann::json& j);

}  // namespace sentplan
