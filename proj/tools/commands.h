#pragma once

// The sentplan subcommands, callable without a process so the tests and the
// HTTP service can share them.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sentplan/corpus.h"
#include "sentplan/features.h"
#include "sentplan/rankboost.h"
#include "sentplan/ratings.h"

namespace sentplan::cli {

// Bad flags or inputs; the CLI exits with status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every rated pair was a tie; exit status 3.
class NoPairsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenerateArgs {
  std::vector<std::filesystem::path> plans;
  std::optional<std::filesystem::path> dict;
  std::size_t max_alts = 20;
  std::uint64_t seed = 0;
  std::size_t min_count = 10;
  std::filesystem::path out;
};

struct TrainArgs {
  std::filesystem::path corpus;
  std::string user = kAverageUser;
  int rounds = 100;
  std::uint64_t seed = 0;
  FeatureSet features = FeatureSet::kAll;
  std::optional<std::filesystem::path> out;
};

struct TrainOutcome {
  RankModel model;
  std::string model_id;
  std::size_t pairs = 0;
  double rank_loss = 0;
};

struct EvaluateArgs {
  std::filesystem::path corpus;
  std::vector<std::filesystem::path> models;
  std::optional<std::string> user;
  std::size_t folds = 10;
  int rounds = 100;
  std::uint64_t seed = 0;
  FeatureSet features = FeatureSet::kAll;
  bool compare_features = false;
  std::optional<std::filesystem::path> report_dir;
};

struct BootstrapArgs {
  std::filesystem::path corpus;
  std::string user = kAverageUser;
  std::size_t runs = 50;
  std::size_t top_k = 100;
  int rounds = 100;
  std::uint64_t seed = 0;
  FeatureSet features = FeatureSet::kAll;
  std::optional<std::filesystem::path> out;
};

// Model file name stem for a user and feature set.
std::string model_id(const std::string& user, FeatureSet features);

// Trains on the corpus's generated alternatives with one user's (or the
// averaged) ratings.
TrainOutcome train_model(const Corpus& corpus, const std::vector<RatingRecord>& ratings,
                         const std::string& user, int rounds, std::uint64_t seed,
                         FeatureSet features);

// Writes atomically (temp file and rename).
void save_model(const RankModel& model, const std::string& user,
                const std::filesystem::path& path);
RankModel load_model(const std::filesystem::path& path);

int run_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err);
int run_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int run_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err);
int run_bootstrap(const BootstrapArgs& args, std::ostream& out, std::ostream& err);

}  // namespace sentplan::cli
