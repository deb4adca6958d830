#pragma once

// Evaluation of rankers: RankLoss and TopRank, k-fold cross-validation by
// plan, bootstrap feature selection, and paired t-tests.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sentplan/features.h"
#include "sentplan/rankboost.h"

namespace sentplan {

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ratings aligned with matrix rows; nullopt for unrated rows.
using Ratings = std::vector<std::optional<double>>;

struct MeanSd {
  double mean = 0;
  double sd = 0;
  std::size_t n = 0;
};
MeanSd mean_sd(const std::vector<double>& xs);

// Means over plans of the human rating of the model's top alternative, of
// the best alternative, and of a random pick (the plan's mean rating).
// gap = oracle - model.
struct TopRank {
  double model = 0;
  double oracle = 0;
  double random = 0;
  double gap = 0;
};

// Argmax ties are broken by the smallest alt id. Throws EvaluationError
// when a plan has no rated row or its top-scored row is unrated.
TopRank top_rank(const std::vector<double>& scores, const std::vector<RowId>& rows,
                 const Ratings& ratings);

// Scores uniform in [0, 1).
std::vector<double> random_scores(std::size_t n, std::uint64_t seed);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_pairs = 0;
  std::size_t test_pairs = 0;
  double train_rank_loss = 0;
  double test_rank_loss = 0;
  double random_rank_loss = 0;
  TopRank top;
  // Test RankLoss per plan group (e.g. strategy).
  std::map<std::string, double> group_rank_loss;
};

struct EvalReport {
  std::size_t folds = 0;
  std::uint64_t seed = 0;
  int rounds = 0;
  std::vector<FoldResult> fold_results;  // folds that ran
  MeanSd train_rank_loss;
  MeanSd test_rank_loss;
  MeanSd random_rank_loss;
  MeanSd top_model;
  MeanSd top_oracle;
  MeanSd top_random;
  MeanSd top_gap;
  std::map<std::string, MeanSd> group_rank_loss;
  std::vector<std::string> warnings;
};

struct CvOptions {
  std::size_t folds = 10;
  int rounds = 100;
  std::uint64_t seed = 0;
  // plan id -> group label; plans missing here go to group "all" only.
  std::map<std::string, std::string> groups;
};

// Folds partition plans, never alternatives of one plan.
EvalReport cross_validate(const FeatureMatrix& matrix, const Ratings& ratings,
                          const CvOptions& options);

// Trains on one rating set and tests on another (e.g. user A's model on
// user B's judgements). Folds are the same as for a single set.
EvalReport cross_validate(const FeatureMatrix& matrix, const Ratings& train_ratings,
                          const Ratings& test_ratings, const CvOptions& options);

// The plan ids in each fold, as cross_validate assigns them.
std::vector<std::vector<std::string>> assign_folds(const std::vector<RowId>& rows,
                                                   std::size_t folds,
                                                   std::uint64_t seed);

// Drops all but the lexicographically smallest member of every set of
// perfectly correlated (|r| = 1) columns. Returns (kept, dropped) pairs.
std::pair<FeatureMatrix, std::vector<std::pair<std::string, std::string>>>
eliminate_correlated(const FeatureMatrix& matrix);

struct BootstrapOptions {
  std::size_t runs = 50;
  std::size_t train_per_plan = 10;
  std::size_t test_per_plan = 10;
  std::size_t top_k = 100;
  int rounds = 100;
  std::uint64_t seed = 0;
};

struct BootstrapSummary {
  std::size_t runs = 0;
  // Mean over runs of each feature's summed rule alpha (0 when unused).
  std::map<std::string, double> mean_alpha;
  // Top-k by |mean alpha|, largest first; ties by name.
  std::vector<std::string> selected;
  std::vector<std::pair<std::string, std::string>> eliminated;
  MeanSd test_rank_loss;
};

// Row indices (train, test) of one bootstrap run.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> bootstrap_split(
    const std::vector<RowId>& rows, const BootstrapOptions& options, std::size_t run);

BootstrapSummary bootstrap_features(const FeatureMatrix& matrix, const Ratings& ratings,
                                    const BootstrapOptions& options);

struct TTest {
  double t = 0;
  double p = 1;
  std::size_t df = 0;
};

// Two-sided paired t-test. Zero variance of the differences gives t = 0,
// p = 1 when they are all zero, and t = +-inf, p = 0 otherwise.
TTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

void write_report(std::ostream& out, const EvalReport& report);
void write_report_table(std::ostream& out, const EvalReport& report);
void write_bootstrap(std::ostream& out, const BootstrapSummary& summary);
void write_bootstrap_table(std::ostream& out, const BootstrapSummary& summary);

}  // namespace sentplan
