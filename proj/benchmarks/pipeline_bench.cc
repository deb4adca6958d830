#include <benchmark/benchmark.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <unistd.h>

#include "sentplan/evaluation.h"
#include "sentplan/lexicon.h"
#include "sentplan/ratings.h"
#include "sentplan/realizer.h"
#include "sentplan/sentence_plan.h"
#include "sentplan/synthetic.h"

namespace {

using namespace sentplan;

constexpr const char* kCompare3 = R"(strategy: compare3
items: Above; Carmine's
relation: elaboration(nuc:1,sat:2)
relation: elaboration(nuc:1,sat:3)
relation: elaboration(nuc:1,sat:4)
relation: elaboration(nuc:1,sat:5)
relation: elaboration(nuc:1,sat:6)
relation: elaboration(nuc:1,sat:7)
relation: contrast(nuc:2,nuc:3)
relation: contrast(nuc:4,nuc:5)
relation: contrast(nuc:6,nuc:7)
assert: 1 claim-exceptional Above, Carmine's
assert: 2 decor Above good
assert: 3 decor Carmine's decent
assert: 4 service Above good
assert: 5 service Carmine's good
assert: 6 cuisine Above New American
assert: 7 cuisine Carmine's Italian
)";

const ContentPlan& plan() {
  static const ContentPlan p = parse_plan(kCompare3, "above-carmines");
  return p;
}

const SyntheticCorpus& corpus() {
  static const SyntheticCorpus c = build_synthetic_corpus({});
  return c;
}

void BM_BuildTpTrees(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(build_tp_trees(plan(), 20, seed++));
}
BENCHMARK(BM_BuildTpTrees);

void BM_SampleAlternative(benchmark::State& state) {
  const auto trees = build_tp_trees(plan(), 20, 1);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sample_alternative(plan(), default_dictionary(), trees[seed % trees.size()],
                           seed % trees.size(), seed));
    ++seed;
  }
}
BENCHMARK(BM_SampleAlternative);

void BM_GenerateAlternatives(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_alternatives(plan(), default_dictionary(), n, 3));
  }
}
BENCHMARK(BM_GenerateAlternatives)->Arg(20)->Arg(100);

void BM_ExtractFeatures(benchmark::State& state) {
  const auto alts = generate_alternatives(plan(), default_dictionary(), 20, 3);
  EntityLexicon lexicon;
  lexicon.add_plan(plan());
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_features(plan(), alts[i++ % alts.size()], lexicon));
  }
}
BENCHMARK(BM_ExtractFeatures);

void BM_Train(benchmark::State& state) {
  const auto& c = corpus();
  const auto pairs = make_pairs(c.matrix.rows, c.ratings);
  TrainOptions options;
  options.rounds = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train(pairs, c.matrix, options));
  state.counters["pairs"] = static_cast<double>(pairs.size());
  state.counters["columns"] = static_cast<double>(c.matrix.num_columns());
}
BENCHMARK(BM_Train)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ScoreRows(benchmark::State& state) {
  const auto& c = corpus();
  TrainOptions options;
  const auto model = train(make_pairs(c.matrix.rows, c.ratings), c.matrix, options);
  for (auto _ : state) benchmark::DoNotOptimize(score_rows(model, c.matrix));
}
BENCHMARK(BM_ScoreRows);

void BM_RatingAppend(benchmark::State& state) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("sentplan-bench-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  {
    RatingLog log(dir / "ratings.jsonl");
    std::int64_t ts = 0;
    for (auto _ : state) log.append({++ts, "bench", "p", "a" + std::to_string(ts % 50), 3});
  }
  std::filesystem::remove_all(dir);
}
BENCHMARK(BM_RatingAppend)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
