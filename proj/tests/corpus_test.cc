#include "sentplan/corpus.h"

#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "temp_dir.h"
#include "test_plans.h"

namespace sentplan {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

std::vector<ContentPlan> fixture_plans() {
  return {testing::chanpen_thai(), testing::above_carmines(), testing::komodo(),
          testing::buon_gusto()};
}

Corpus fixture_corpus(std::uint64_t seed = 4) {
  GenerateOptions options;
  options.seed = seed;
  options.min_count = 3;
  return generate_corpus(fixture_plans(), default_dictionary(), default_dictionary_text(),
                         options);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Corpus, AlternativesPerPlan) {
  const Corpus c = fixture_corpus();
  std::map<std::string, int> generated, templates;
  std::set<std::pair<std::string, std::string>> ids;
  for (const auto& a : c.alternatives) {
    (a.source == kSourceTemplate ? templates : generated)[a.plan_id]++;
    EXPECT_TRUE(ids.insert({a.plan_id, a.alt_id}).second) << a.alt_id;
    EXPECT_FALSE(a.text.empty());
    EXPECT_EQ(a.alt_id, alternative_id(a.plan_id, a.source, a.sp_tree, a.text));
  }
  for (const auto& p : c.plans) {
    EXPECT_EQ(templates[p.plan_id], 1) << p.plan_id;
    EXPECT_GE(generated[p.plan_id], 1) << p.plan_id;
    EXPECT_LE(generated[p.plan_id], 20) << p.plan_id;
  }
  EXPECT_EQ(generated["chanpen-thai"], 20);
  std::size_t total = 0;
  for (const auto& [p, n] : generated) total += n;
  EXPECT_EQ(c.matrix.num_rows(), total);
}

TEST(Corpus, WriteLoadRoundTrip) {
  TempDir tmp;
  const Corpus c = fixture_corpus();
  write_corpus(c, tmp / "c");
  const Corpus back = load_corpus(tmp / "c");
  EXPECT_EQ(back.plans, c.plans);
  EXPECT_EQ(back.alternatives, c.alternatives);
  EXPECT_EQ(back.matrix.columns, c.matrix.columns);
  EXPECT_EQ(back.matrix.rows, c.matrix.rows);
  EXPECT_EQ(back.matrix.cells, c.matrix.cells);
  EXPECT_EQ(back.manifest.plans, c.manifest.plans);
  EXPECT_EQ(back.manifest.dictionary, c.manifest.dictionary);
}

TEST(Corpus, SameSeedSameBytes) {
  TempDir tmp;
  write_corpus(fixture_corpus(9), tmp / "a");
  write_corpus(fixture_corpus(9), tmp / "b");
  write_corpus(fixture_corpus(10), tmp / "c");
  for (const char* f : {"manifest.json", "alternatives.jsonl", "features.txt"}) {
    EXPECT_EQ(slurp(tmp / "a" / f), slurp(tmp / "b" / f)) << f;
  }
  EXPECT_NE(slurp(tmp / "a" / "alternatives.jsonl"), slurp(tmp / "c" / "alternatives.jsonl"));
}

TEST(Corpus, PlanOrderDoesNotChangeAPlansAlternatives) {
  GenerateOptions options;
  options.seed = 2;
  auto plans = fixture_plans();
  const Corpus a = generate_corpus(plans, default_dictionary(), "", options);
  std::reverse(plans.begin(), plans.end());
  const Corpus b = generate_corpus(plans, default_dictionary(), "", options);
  auto texts = [](const Corpus& c, const std::string& plan) {
    std::vector<std::string> out;
    for (const auto& alt : c.alternatives) {
      if (alt.plan_id == plan) out.push_back(alt.text);
    }
    return out;
  };
  EXPECT_EQ(texts(a, "komodo"), texts(b, "komodo"));
}

TEST(Corpus, RefusesNonEmptyDirectory) {
  TempDir tmp;
  std::ofstream(tmp / "junk") << "x";
  EXPECT_THROW(write_corpus(fixture_corpus(), tmp.path()), CorpusError);
}

TEST(Corpus, LoadRejectsStrayFeatureRow) {
  TempDir tmp;
  write_corpus(fixture_corpus(), tmp / "c");
  std::ofstream(tmp / "c" / "features.txt", std::ios::app) << "komodo ffffffffffff\n";
  EXPECT_THROW(load_corpus(tmp / "c"), CorpusError);
  EXPECT_THROW(load_corpus(tmp / "missing"), CorpusError);
}

TEST(LoadPlans, FilesAndDirectories) {
  TempDir tmp;
  fs::create_directories(tmp / "plans");
  std::ofstream(tmp / "plans" / "b.plan") << testing::kKomodoPlan;
  std::ofstream(tmp / "plans" / "a.plan") << testing::kChanpenThaiPlan;
  std::ofstream(tmp / "plans" / "notes.txt") << "ignored";
  std::ofstream(tmp / "c.plan") << testing::kBuonGustoPlan;
  auto plans = load_plans({tmp / "plans", tmp / "c.plan"});
  ASSERT_EQ(plans.size(), 3u);
  EXPECT_EQ(plans[0].plan_id, "a");
  EXPECT_EQ(plans[1].plan_id, "b");
  EXPECT_EQ(plans[2].plan_id, "c");
}

TEST(LoadPlans, Errors) {
  TempDir tmp;
  std::ofstream(tmp / "a.plan") << testing::kKomodoPlan;
  EXPECT_THROW(load_plans({tmp / "a.plan", tmp / "a.plan"}), CorpusError);
  EXPECT_THROW(load_plans({tmp / "nope.plan"}), CorpusError);
  EXPECT_THROW(load_plans({}), CorpusError);
  std::ofstream(tmp / "bad.plan") << "strategy: recommend\nitems: X\nassert: 1 bogus X\n";
  EXPECT_THROW(load_plans({tmp / "bad.plan"}), PlanError);
}

TEST(AlternativeId, DependsOnContent) {
  const auto a = alternative_id("p", "spg", "T", "text");
  EXPECT_EQ(a.size(), 12u);
  EXPECT_EQ(a, alternative_id("p", "spg", "T", "text"));
  EXPECT_NE(a, alternative_id("p", "spg", "T", "text."));
  EXPECT_NE(a, alternative_id("q", "spg", "T", "text"));
  EXPECT_NE(alternative_id("p", "spg", "", "ab"), alternative_id("p", "spg", "a", "b"));
}

}  // namespace
}  // namespace sentplan
