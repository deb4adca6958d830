#include <gtest/gtest.h>

#include <httplib.h>

#include <chrono>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "commands.h"
#include "service.h"
#include "temp_dir.h"
#include "test_plans.h"

namespace sentplan::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

// Writes the fixture plans and generates a corpus at dir/corpus.
fs::path make_corpus(const TempDir& tmp) {
  fs::create_directories(tmp / "plans");
  std::ofstream(tmp / "plans" / "chanpen-thai.plan") << testing::kChanpenThaiPlan;
  std::ofstream(tmp / "plans" / "above-carmines.plan") << testing::kAboveCarminesPlan;
  std::ofstream(tmp / "plans" / "komodo.plan") << testing::kKomodoPlan;
  GenerateArgs args;
  args.plans = {tmp / "plans"};
  args.seed = 5;
  args.min_count = 3;
  args.out = tmp / "corpus";
  std::ostringstream out, err;
  EXPECT_EQ(run_generate(args, out, err), 0);
  return args.out;
}

int sentences(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '.';
  return n;
}

// User A prefers few sentences, user B many.
void rate_everything(const fs::path& corpus) {
  const Corpus c = load_corpus(corpus);
  RatingLog log(ratings_path(corpus));
  for (const auto& a : c.alternatives) {
    const int s = std::min(5, sentences(a.text));
    log.append({1, "A", a.plan_id, a.alt_id, 6 - s});
    log.append({1, "B", a.plan_id, a.alt_id, s});
  }
}

TEST(Generate, WritesCorpus) {
  TempDir tmp;
  const auto dir = make_corpus(tmp);
  for (const char* f : {"manifest.json", "alternatives.jsonl", "features.txt"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_TRUE(fs::exists(dir / "plans" / "komodo.plan"));
}

TEST(Generate, BadInputs) {
  TempDir tmp;
  std::ofstream(tmp / "bad.plan") << "strategy: recommend\nitems: X\nassert: 1 bogus X\n";
  std::ostringstream out, err;
  GenerateArgs args;
  args.plans = {tmp / "bad.plan"};
  args.out = tmp / "c";
  EXPECT_THROW(run_generate(args, out, err), PlanError);
  args.out.clear();
  EXPECT_THROW(run_generate(args, out, err), UsageError);
}

TEST(Train, NeedsRatingsAndPairs) {
  TempDir tmp;
  const auto dir = make_corpus(tmp);
  std::ostringstream out, err;
  TrainArgs args;
  args.corpus = dir;
  EXPECT_THROW(run_train(args, out, err), UsageError);

  {
    const Corpus c = load_corpus(dir);
    RatingLog log(ratings_path(dir));
    for (const auto& a : c.alternatives) log.append({1, "flat", a.plan_id, a.alt_id, 3});
  }
  args.user = "flat";
  EXPECT_THROW(run_train(args, out, err), NoPairsError);
  args.user = "ghost";
  EXPECT_THROW(run_train(args, out, err), RatingError);
}

TEST(Train, UserAndAverageModels) {
  TempDir tmp;
  const auto dir = make_corpus(tmp);
  rate_everything(dir);
  const Corpus c = load_corpus(dir);
  const auto records = read_ratings(ratings_path(dir));
  const auto a = train_model(c, records, "A", 30, 0, FeatureSet::kAll);
  const auto b = train_model(c, records, "B", 30, 0, FeatureSet::kAll);
  EXPECT_LE(a.rank_loss, 0.1);
  EXPECT_LE(b.rank_loss, 0.1);
  EXPECT_EQ(a.model_id, "A.all");

  // A and B are exact opposites, so the mean rating is flat.
  EXPECT_THROW(train_model(c, records, kAverageUser, 30, 0, FeatureSet::kAll), NoPairsError);

  const auto t = train_model(c, records, "A", 30, 0, FeatureSet::kNgram);
  for (const auto& r : t.model.rules) EXPECT_TRUE(in_feature_set(r.feature, FeatureSet::kNgram));
  EXPECT_EQ(t.model.feature_set, "ngram");

  std::ostringstream out, err;
  TrainArgs args;
  args.corpus = dir;
  args.user = "A";
  args.rounds = 20;
  EXPECT_EQ(run_train(args, out, err), 0);
  EXPECT_TRUE(fs::exists(models_dir(dir) / "A.all.json"));
  EXPECT_NE(out.str().find("train RankLoss"), std::string::npos);
}

TEST(ModelFile, RoundTripAndMissing) {
  TempDir tmp;
  RankModel m;
  m.rounds = 3;
  m.rules = {{"A", 0.5, 0.25}, {"B", kMinusInfinity, -1}};
  save_model(m, "A", tmp / "m" / "a.json");
  EXPECT_EQ(load_model(tmp / "m" / "a.json"), m);
  EXPECT_THROW(load_model(tmp / "none.json"), UsageError);
  std::ofstream(tmp / "bad.json") << "{";
  EXPECT_THROW(load_model(tmp / "bad.json"), UsageError);
}

TEST(Evaluate, GridOverUsersAndAverage) {
  TempDir tmp;
  const auto dir = make_corpus(tmp);
  rate_everything(dir);
  {
    // A third rater so the average is not flat.
    const Corpus c = load_corpus(dir);
    RatingLog log(ratings_path(dir));
    for (const auto& a : c.alternatives) {
      log.append({1, "C", a.plan_id, a.alt_id, 6 - std::min(5, sentences(a.text))});
    }
  }
  EvaluateArgs args;
  args.corpus = dir;
  args.folds = 3;
  args.rounds = 20;
  std::ostringstream out, err;
  EXPECT_EQ(run_evaluate(args, out, err), 0);
  std::ifstream grid(dir / "reports" / "grid.tsv");
  int overall = 0;
  for (std::string line; std::getline(grid, line);) {
    if (line.find("\tall\t") != std::string::npos) ++overall;
  }
  EXPECT_EQ(overall, 16);  // A, B, C, AVG squared
  EXPECT_TRUE(fs::exists(dir / "reports" / "cv-A.all-on-B.all.txt"));
}

TEST(Evaluate, SavedModelsAndMissingModel) {
  TempDir tmp;
  const auto dir = make_corpus(tmp);
  rate_everything(dir);
  const Corpus c = load_corpus(dir);
  const auto t = train_model(c, read_ratings(ratings_path(dir)), "A", 20, 0, FeatureSet::kAll);
  save_model(t.model, "A", tmp / "a.json");
  EvaluateArgs args;
  args.corpus = dir;
  args.user = "A";
  args.models = {tmp / "a.json"};
  std::ostringstream out, err;
  EXPECT_EQ(run_evaluate(args, out, err), 0);
  EXPECT_NE(out.str().find("a.json\tA\t"), std::string::npos);
  args.models.push_back(tmp / "missing.json");
  EXPECT_THROW(run_evaluate(args, out, err), UsageError);
}

TEST(Bootstrap, WritesTable) {
  TempDir tmp;
  const auto dir = make_corpus(tmp);
  rate_everything(dir);
  BootstrapArgs args;
  args.corpus = dir;
  args.user = "A";
  args.runs = 3;
  args.top_k = 5;
  args.rounds = 10;
  args.out = tmp / "boot.tsv";
  std::ostringstream out, err;
  EXPECT_EQ(run_bootstrap(args, out, err), 0);
  std::ifstream in(tmp / "boot.tsv");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 6);
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = make_corpus(tmp_);
    service_ = std::make_unique<Service>(dir_);
    port_ = service_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { service_->listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 100; ++i) {
      if (client_->Get("/api/models")) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }
  void TearDown() override {
    service_->stop();
    thread_.join();
    service_.reset();
  }

  json get(const std::string& path, int expect = 200) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << path << ": " << res->body;
    return json::parse(res->body);
  }
  httplib::Result post(const std::string& path, const json& body) {
    return client_->Post(path, body.dump(), "application/json");
  }
  json rating(const std::string& user, const std::string& plan, const std::string& alt, json r) {
    return {{"user", user}, {"plan-id", plan}, {"alt-id", alt}, {"rating", r}};
  }

  TempDir tmp_;
  fs::path dir_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = 0;
};

TEST_F(ServiceTest, PlansAndShuffledAlternatives) {
  auto plans = get("/api/plans?user=u");
  ASSERT_EQ(plans.size(), 3u);
  for (const auto& p : plans) EXPECT_FALSE(p["rated"].get<bool>());

  auto first = get("/api/plans/komodo/alternatives?user=u&session=1");
  auto again = get("/api/plans/komodo/alternatives?user=u&session=1");
  auto other = get("/api/plans/komodo/alternatives?user=u&session=2");
  EXPECT_EQ(first, again);
  EXPECT_NE(first, other);
  const Corpus c = load_corpus(dir_);
  std::set<std::string> expected, served;
  for (const auto& a : c.alternatives) {
    if (a.plan_id == "komodo") expected.insert(a.alt_id);
  }
  for (const auto& a : first) served.insert(a["alt-id"].get<std::string>());
  EXPECT_EQ(served, expected);

  get("/api/plans/nowhere/alternatives?user=u", 404);
  get("/api/plans", 400);
}

TEST_F(ServiceTest, RatingValidation) {
  const auto alts = get("/api/plans/komodo/alternatives?user=u");
  const std::string alt = alts[0]["alt-id"];
  auto res = post("/api/ratings", rating("u", "komodo", alt, 6));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_NE(res->body.find("rating"), std::string::npos);
  res = post("/api/ratings", {{"user", "u"}});
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(json::parse(res->body)["errors"].size(), 3u);
  res = client_->Post("/api/ratings", "{oops", "application/json");
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(post("/api/ratings", rating("u", "komodo", "nope", 3))->status, 404);
  EXPECT_EQ(post("/api/ratings", rating("u", "nope", alt, 3))->status, 404);

  EXPECT_EQ(post("/api/ratings", rating("u", "komodo", alt, 2))->status, 200);
  EXPECT_EQ(post("/api/ratings", rating("u", "komodo", alt, 5))->status, 200);
  auto mine = get("/api/ratings?user=u");
  ASSERT_EQ(mine.size(), 1u);
  EXPECT_EQ(mine[0]["rating"], 5);
  EXPECT_EQ(read_ratings(ratings_path(dir_)).size(), 1u);
}

TEST_F(ServiceTest, TrainJobAndRules) {
  for (const auto& p : get("/api/plans?user=A")) {
    const std::string plan = p["plan-id"];
    for (const auto& a : get("/api/plans/" + plan + "/alternatives?user=A")) {
      const int r = 6 - std::min(5, sentences(a["text"]));
      ASSERT_EQ(post("/api/ratings", rating("A", plan, a["alt-id"], r))->status, 200);
    }
  }
  for (const auto& p : get("/api/plans?user=A")) EXPECT_TRUE(p["rated"].get<bool>());

  EXPECT_EQ(post("/api/train", {{"user", "nobody"}})->status, 404);
  EXPECT_EQ(post("/api/train", {{"rounds", -1}})->status, 400);
  auto res = post("/api/train", {{"user", "A"}, {"rounds", 25}});
  ASSERT_EQ(res->status, 202);
  const std::string job = json::parse(res->body)["job-id"];
  json status;
  for (int i = 0; i < 500; ++i) {
    status = get("/api/jobs/" + job);
    if (status["status"] == "done" || status["status"] == "failed") break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ASSERT_EQ(status["status"], "done") << status.dump();
  EXPECT_LE(status["rank-loss"].get<double>(), 0.1);
  get("/api/jobs/job-999", 404);

  auto models = get("/api/models");
  ASSERT_EQ(models.size(), 1u);
  EXPECT_EQ(models[0]["model-id"], "A.all");
  auto rules = get("/api/models/A.all/rules?limit=5");
  ASSERT_FALSE(rules.empty());
  EXPECT_LE(rules.size(), 5u);
  for (std::size_t i = 1; i < rules.size(); ++i) {
    EXPECT_LE(rules[i - 1]["alpha"].get<double>(), rules[i]["alpha"].get<double>());
  }
  get("/api/models/none/rules", 404);
}

}  // namespace
}  // namespace sentplan::cli
