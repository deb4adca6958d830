// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <httplib.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sentplan/corpus.h"
#include "sentplan/evaluation.h"
#include "sentplan/ratings.h"
#include "sentplan/synthetic.h"
#include "temp_dir.h"
#include "test_plans.h"
#include "tree_builders.h"

namespace fs = std::filesystem;
using namespace sentplan;
using nlohmann::json;

namespace {

// Thrown to report a failed condition with detail.
struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

std::string operator_goldens() {
  using namespace sentplan::testing;
  const auto chanpen = chanpen_thai();
  const auto nbhd = parse_plan(R"(strategy: recommend
items: Chanpen Thai
relation: justify(nuc:1, sat:2)
assert: 1 claim-best Chanpen Thai
assert: 2 neighborhood Chanpen Thai Midtown West
)", "nbhd");
  const auto penang = parse_plan(R"(strategy: compare2
items: Penang; Baluchi's
relation: contrast(nuc:1, nuc:2)
assert: 1 decor Penang very good
assert: 2 decor Baluchi's mediocre
)", "penang");

  const std::vector<std::pair<std::string, std::string>> cases = {
      {text_of(infer(merge(), leaf(chanpen, 4), leaf(chanpen, 3))),
       "Chanpen Thai has good service and good food quality."},
      {text_of(infer(with(), leaf(chanpen, 2), leaf(chanpen, 3))),
       "Chanpen Thai is a Thai restaurant, with good food quality."},
      {text_of(justify(relative(), leaf(nbhd, 1), leaf(nbhd, 2))),
       "Chanpen Thai, which is located in Midtown West, has the best overall "
       "quality among the selected restaurants."},
      {text_of(justify(conj(CueWord::kSince), leaf(chanpen, 1),
                       infer(with(), leaf(chanpen, 2), leaf(chanpen, 4)))),
       "Chanpen Thai has the best overall quality among the selected restaurants, "
       "since it is a Thai restaurant, with good service."},
      {text_of(contrast(insertion(CueWord::kOnTheOtherHand), leaf(penang, 1),
                        leaf(penang, 2))),
       "Penang has very good decor. On the other hand, Baluchi's has mediocre decor."},
      {text_of(infer(period(), leaf(chanpen, 2), leaf(chanpen, 3))),
       "Chanpen Thai is a Thai restaurant. It has good food quality."},
  };
  for (const auto& [got, want] : cases) require(got == want, "got \"" + got + "\"");
  return "6/6 byte-exact";
}

std::string global_tree_features() {
  using namespace sentplan::testing;
  const auto plan = chanpen_thai();
  const auto f = chanpen_since_tree(plan);
  SpgAlternative alt;
  alt.sp_tree = f.sp;
  alt.d_tree = pronominalize(f.d);
  const auto fv = extract_tree(alt);
  const double max = fv.get("CW-CONJUNCTION-INFER-MAX-LEAVES-UNDER");
  const double min = fv.get("CW-CONJUNCTION-INFER-MIN-LEAVES-UNDER");
  const double avg = fv.get("CW-CONJUNCTION-INFER-AVG-LEAVES-UNDER");
  const std::string got = fmt(max) + "/" + fmt(min) + "/" + fmt(avg);
  require(max == 4 && min == 2 && avg == 3, "MAX/MIN/AVG = " + got);
  return "MAX/MIN/AVG = " + got;
}

// Samples `n` alternatives of `plan`, cycling through its tp-trees.
template <typename Fn>
void sample_many(const ContentPlan& plan, std::size_t n, const GeneratorOptions& options,
                 Fn&& fn) {
  const auto trees = build_tp_trees(plan, 20, options.seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t tp = i % trees.size();
    fn(trees[tp], sample_alternative(plan, default_dictionary(), trees[tp], tp,
                                     mix_seed(options.seed, i), options));
  }
}

std::string constraint_soundness() {
  std::size_t total = 0;
  for (const auto& plan : {testing::chanpen_thai(), testing::above_carmines()}) {
    std::set<int> ids;
    for (const auto& a : plan.assertions) ids.insert(a.id);
    for (int variant = 0; variant < 2; ++variant) {
      GeneratorOptions options;
      options.seed = 1000 + variant;
      if (variant == 1) options.distribution = OperatorDistribution::uniform();
      sample_many(plan, 2500, options, [&](const TpTree&, const SpgAlternative& alt) {
        ++total;
        const auto sp = check_sp_tree(alt.sp_tree);
        require(sp.empty(), plan.plan_id + ": " + (sp.empty() ? "" : sp.front()));
        const auto d = check_dtree(alt.d_tree);
        require(d.empty(), plan.plan_id + ": " + (d.empty() ? "" : d.front()));
        std::vector<int> frontier_ids;
        for (const auto* l : frontier(alt.sp_tree)) frontier_ids.push_back(l->assertion_id);
        const std::set<int> distinct(frontier_ids.begin(), frontier_ids.end());
        require(distinct.size() == frontier_ids.size() && distinct == ids,
                plan.plan_id + ": frontier is not a bijection onto the plan");
      });
    }
  }
  return std::to_string(total) + " alternatives, 0 violations";
}

std::string sampling_fidelity() {
  const OperatorDistribution dist;
  std::array<std::size_t, kNumCategories> counts{};
  std::size_t draws = 0;
  const std::size_t wanted = 10000;
  GeneratorOptions options;
  options.observer = [&](DiscourseRelation, std::span<const OpChoice> legal,
                         const OpChoice& pick) {
    if (draws >= wanted) return;
    std::set<OpCategory> present;
    for (const auto& c : legal) present.insert(category(c.operation));
    if (present.size() != kNumCategories) return;
    ++counts[static_cast<std::size_t>(category(pick.operation))];
    ++draws;
  };
  const std::vector<ContentPlan> plans = {testing::above_carmines(), testing::buon_gusto(),
                                          testing::chanpen_thai(), testing::komodo()};
  for (std::uint64_t seed = 0; draws < wanted && seed < 200; ++seed) {
    options.seed = seed;
    for (const auto& plan : plans) {
      sample_many(plan, 500, options, [](const TpTree&, const SpgAlternative&) {});
    }
  }
  require(draws == wanted, "only " + std::to_string(draws) + " fully-legal choice points");
  const std::array<double, kNumCategories> expected = {dist.syntactic, dist.conjunction,
                                                       dist.insertion, dist.period};
  std::string detail;
  bool ok = true;
  for (std::size_t c = 0; c < kNumCategories; ++c) {
    const double f = static_cast<double>(counts[c]) / static_cast<double>(draws);
    ok = ok && std::abs(f - expected[c]) <= 0.02;
    detail += (c ? ", " : "") + fmt(f);
  }
  require(ok, "frequencies (" + detail + ")");
  return std::to_string(draws) + " draws, frequencies (" + detail + ")";
}

// True when every contrast pair's two leaves are adjacent in `order`.
bool contrast_pairs_adjacent(const ContentPlan& plan, const std::vector<int>& order) {
  for (const auto& rel : plan.relations) {
    if (rel.kind != RelationKind::kContrast) continue;
    const auto a = std::find(order.begin(), order.end(), rel.nuclei.at(0));
    const auto b = std::find(order.begin(), order.end(), rel.nuclei.at(1));
    if (std::abs(std::distance(a, b)) != 1) return false;
  }
  return true;
}

std::string centering() {
  // Claim, then decor, cuisine, service, decor, cuisine, service, alternating restaurants.
  const std::vector<int> interleaved = {1, 2, 7, 4, 3, 6, 5};
  std::size_t total = 0;
  std::map<Grouping, std::size_t> by_grouping;
  for (const auto& plan : {testing::above_carmines(), testing::buon_gusto()}) {
    const std::size_t entities = plan.items.size();
    for (int variant = 0; variant < 2; ++variant) {
      GeneratorOptions options;
      options.seed = 77 + variant;
      if (variant == 1) options.distribution = OperatorDistribution::uniform();
      sample_many(plan, 2500, options, [&](const TpTree& tree, const SpgAlternative& alt) {
        ++total;
        ++by_grouping[tree.grouping];
        const std::size_t switches = entity_switch_count(tree);
        if (tree.grouping == Grouping::kByAttribute) {
          require(contrast_pairs_adjacent(plan, leaf_order(tree)),
                  "by-attribute tree with a split contrast pair");
        } else {
          require(switches + 1 <= entities,
                  "entity switch count " + std::to_string(switches));
        }
        const auto order = linearize(alt.d_tree).assertion_order();
        require(order != interleaved, "interleaved order generated");
        std::vector<int> frontier_order;
        for (const auto* l : frontier(alt.sp_tree)) frontier_order.push_back(l->assertion_id);
        require(frontier_order != interleaved, "interleaved frontier generated");
      });
    }
  }
  return std::to_string(total) + " compare alternatives (" +
         std::to_string(by_grouping[Grouping::kByEntity]) + " by entity, " +
         std::to_string(by_grouping[Grouping::kByAttribute]) + " by attribute), none interleaved";
}

const SyntheticCorpus& synthetic() {
  static const SyntheticCorpus corpus = [] {
    SyntheticOptions options;
    options.plans = 30;
    options.max_alts = 20;
    return build_synthetic_corpus(options);
  }();
  return corpus;
}

std::string synthetic_oracle() {
  const auto& corpus = synthetic();
  CvOptions options;
  options.folds = 10;
  options.rounds = 100;
  const auto report = cross_validate(corpus.matrix, corpus.ratings, options);
  const double loss = report.test_rank_loss.mean;
  const double top = report.top_gap.mean;
  const double random = report.random_rank_loss.mean;
  const std::string detail = std::to_string(corpus.plans.size()) + " plans, " +
                             std::to_string(corpus.matrix.num_rows()) + " rows: RankLoss " +
                             fmt(loss) + ", TopRank gap " + fmt(top) + ", random " + fmt(random);
  require(report.fold_results.size() == 10, "only " +
                                                std::to_string(report.fold_results.size()) +
                                                " folds ran; " + detail);
  require(loss <= 0.05 && top <= 0.1 && std::abs(random - 0.5) <= 0.03, detail);
  return detail;
}

std::string boosting_monotonicity() {
  std::vector<std::pair<std::string, PairSet>> sets;
  std::vector<const FeatureMatrix*> matrices;
  const auto& corpus = synthetic();
  sets.emplace_back("synthetic", make_pairs(corpus.matrix.rows, corpus.ratings));
  matrices.push_back(&corpus.matrix);

  // The sample plans with arbitrary ratings, where no rule separates the pairs.
  GenerateOptions g;
  g.seed = 3;
  g.min_count = 2;
  static const Corpus sample = generate_corpus(
      {testing::chanpen_thai(), testing::above_carmines(), testing::buon_gusto(),
       testing::komodo()},
      default_dictionary(), default_dictionary_text(), g);
  Rng rng(9);
  Ratings noisy;
  for (std::size_t i = 0; i < sample.matrix.num_rows(); ++i) {
    noisy.push_back(static_cast<double>(1 + uniform_index(rng, 5)));
  }
  sets.emplace_back("random ratings", make_pairs(sample.matrix.rows, noisy));
  matrices.push_back(&sample.matrix);

  std::string detail;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    TrainOptions options;
    options.rounds = 100;
    LossTrace trace;
    train(sets[i].second, *matrices[i], options, &trace);
    for (std::size_t k = 1; k < trace.size(); ++k) {
      require(trace[k] <= trace[k - 1] * (1 + 1e-12),
              sets[i].first + ": loss rose in round " + std::to_string(k));
    }
    detail += (i ? "; " : "") + sets[i].first + " " + fmt(trace.front()) + " -> " +
              fmt(trace.back()) + " over " + std::to_string(trace.size() - 1) + " rounds";
  }
  return detail;
}

std::string pruning_boundary() {
  std::vector<FeatureRow> rows;
  for (int i = 0; i < 20; ++i) {
    FeatureRow r;
    r.id = {"p" + std::to_string(i % 4), std::to_string(i)};
    r.features.add("EVERY-ROW");
    if (i < 9) r.features.add("NINE-ROWS");
    if (i < 10) r.features.add("TEN-ROWS");
    if (i == 0) r.features.add("ONE-ROW-MANY", 50);
    rows.push_back(r);
  }
  const auto m = assemble_and_prune(rows, 10);
  const std::vector<std::string> want = {"EVERY-ROW", "TEN-ROWS"};
  require(m.columns == want, "kept " + json(m.columns).dump());
  return "9 rows dropped, 10 rows kept";
}

std::string bootstrap_pipeline() {
  const auto& corpus = synthetic();
  std::vector<FeatureRow> rows;
  for (std::size_t r = 0; r < corpus.matrix.num_rows(); ++r) {
    FeatureRow row;
    row.id = corpus.matrix.rows[r];
    for (const auto& [c, v] : corpus.matrix.cells[r]) row.features.add(corpus.matrix.columns[c], v);
    const double oracle = oracle_rating(corpus.alternatives[r]);
    row.features.add("ORACLE", oracle);
    row.features.add("ORACLE-COPY", oracle);
    rows.push_back(std::move(row));
  }
  const auto m = assemble_and_prune(rows, 0);
  BootstrapOptions options;
  options.runs = 50;
  options.rounds = 100;
  options.top_k = 20;
  const auto summary = bootstrap_features(m, corpus.ratings, options);
  const bool orig = summary.mean_alpha.count("ORACLE") == 1;
  const bool copy = summary.mean_alpha.count("ORACLE-COPY") == 1;
  require(orig != copy, "kept " + std::to_string(orig + copy) + " of the duplicated pair");
  const std::string kept = orig ? "ORACLE" : "ORACLE-COPY";
  require(!summary.selected.empty() && summary.selected.front() == kept,
          "top feature is " + (summary.selected.empty() ? "none" : summary.selected.front()));
  return "kept " + kept + " (mean alpha " + fmt(summary.mean_alpha.at(kept)) + "), next " +
         summary.selected.at(1) + " (" + fmt(summary.mean_alpha.at(summary.selected.at(1))) +
         "), test RankLoss " + fmt(summary.test_rank_loss.mean);
}

// Runs the CLI and returns its exit status.
int run_cli(const std::vector<std::string>& args) {
  const pid_t pid = fork();
  if (pid == 0) {
    std::vector<char*> argv;
    std::string bin = SENTPLAN_BIN;
    argv.push_back(bin.data());
    std::vector<std::string> copy = args;
    for (auto& a : copy) argv.push_back(a.data());
    argv.push_back(nullptr);
    freopen("/dev/null", "w", stdout);
    execv(SENTPLAN_BIN, argv.data());
    _exit(127);
  }
  int status = 0;
  waitpid(pid, &status, 0);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    const auto rel = fs::relative(e.path(), dir).string();
    out[rel] = e.is_regular_file() ? read_file(e.path()) : "<dir>";
  }
  return out;
}

std::string end_to_end_determinism() {
  testing::TempDir tmp;
  for (const char* name : {"a", "b"}) {
    const int rc = run_cli({"generate", "--plans", SENTPLAN_PLANS_DIR, "--seed", "2024",
                            "--max-alts", "20", "--out", (tmp / name).string()});
    require(rc == 0, "generate exited " + std::to_string(rc));
  }
  const auto a = snapshot(tmp / "a");
  const auto b = snapshot(tmp / "b");
  require(!a.empty(), "empty corpus directory");
  require(a == b, "corpus directories differ");
  std::size_t bytes = 0;
  for (const auto& [_, content] : a) bytes += content.size();
  return std::to_string(a.size()) + " entries, " + std::to_string(bytes) + " bytes identical";
}

struct Server {
  pid_t pid = -1;
  int port = 0;
};

Server start_server(const fs::path& corpus) {
  int fds[2];
  require(pipe(fds) == 0, "pipe failed");
  const pid_t pid = fork();
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl(SENTPLAN_BIN, SENTPLAN_BIN, "serve", "--corpus", corpus.c_str(), "--port", "0",
          static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  FILE* in = fdopen(fds[0], "r");
  char line[256] = {};
  const bool got = fgets(line, sizeof line, in) != nullptr;
  fclose(in);
  Server s{pid, 0};
  const std::string text = got ? line : "";
  const auto colon = text.rfind(':');
  if (text.rfind("listening on http://", 0) == 0 && colon != std::string::npos) {
    s.port = std::stoi(text.substr(colon + 1));
  }
  if (s.port == 0) {
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    throw Failure{"server did not start: \"" + text + "\""};
  }
  return s;
}

void kill_server(const Server& s, int sig) {
  kill(s.pid, sig);
  waitpid(s.pid, nullptr, 0);
}

std::string service_durability() {
  testing::TempDir tmp;
  const auto corpus = tmp / "corpus";
  require(run_cli({"generate", "--plans", SENTPLAN_PLANS_DIR, "--seed", "7", "--out",
                   corpus.string()}) == 0,
          "generate failed");
  const Corpus c = load_corpus(corpus);

  // 100 distinct (user, alternative) keys so last-write-wins keeps them all.
  std::map<std::pair<std::string, std::string>, int> sent;
  Server server = start_server(corpus);
  {
    httplib::Client client("127.0.0.1", server.port);
    for (std::size_t i = 0; sent.size() < 100; ++i) {
      const auto& alt = c.alternatives[i % c.alternatives.size()];
      const std::string user = "rater" + std::to_string(i / c.alternatives.size());
      const int rating = static_cast<int>(1 + i % 5);
      const json body = {{"user", user}, {"plan-id", alt.plan_id}, {"alt-id", alt.alt_id},
                         {"rating", rating}};
      const auto res = client.Post("/api/ratings", body.dump(), "application/json");
      if (!res || res->status != 200) {
        kill_server(server, SIGKILL);
        throw Failure{"post " + std::to_string(i) + " not acknowledged"};
      }
      sent[{user, alt.alt_id}] = rating;
    }
  }
  kill_server(server, SIGKILL);

  server = start_server(corpus);
  std::size_t recovered = 0;
  std::string problem;
  {
    httplib::Client client("127.0.0.1", server.port);
    std::set<std::string> users;
    for (const auto& [key, _] : sent) users.insert(key.first);
    for (const auto& user : users) {
      const auto res = client.Get("/api/ratings?user=" + user);
      if (!res || res->status != 200) {
        problem = "GET /api/ratings failed for " + user;
        break;
      }
      for (const auto& r : json::parse(res->body)) {
        const auto it = sent.find({user, r.at("alt").get<std::string>()});
        if (it != sent.end() && it->second == r.at("rating").get<int>()) ++recovered;
      }
    }
  }
  kill_server(server, SIGTERM);
  require(problem.empty(), problem);
  require(recovered == sent.size(), std::to_string(recovered) + " of " +
                                        std::to_string(sent.size()) + " ratings recovered");
  return std::to_string(recovered) + "/100 ratings recovered after SIGKILL";
}

struct Criterion {
  std::string name;
  double limit_seconds;
  std::function<std::string()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"operator goldens", 1, operator_goldens},
      {"global tree features", 1, global_tree_features},
      {"constraint soundness", 30, constraint_soundness},
      {"sampling fidelity", 30, sampling_fidelity},
      {"centering", 30, centering},
      {"synthetic ranking oracle", 120, synthetic_oracle},
      {"boosting monotonicity", 60, boosting_monotonicity},
      {"pruning boundary", 1, pruning_boundary},
      {"bootstrap pipeline", 180, bootstrap_pipeline},
      {"end-to-end determinism", 30, end_to_end_determinism},
      {"service durability", 30, service_durability},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.run();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (ok && secs > c.limit_seconds) {
      ok = false;
      detail += "; over the " + fmt(c.limit_seconds) + " s limit";
    }
    failed += !ok;
    std::printf("%s %-26s %7.2fs  %s\n", ok ? "PASS" : "FAIL", c.name.c_str(), secs,
                detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
