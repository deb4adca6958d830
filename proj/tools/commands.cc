#include "commands.h"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sentplan/evaluation.h"
#include "sentplan/lexicon.h"

namespace sentplan::cli {
namespace fs = std::filesystem;
namespace {

std::string fixed4(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v;
  return ss.str();
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw UsageError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::vector<RatingRecord> corpus_ratings(const fs::path& corpus) {
  auto records = read_ratings(ratings_path(corpus));
  if (records.empty()) throw UsageError("no ratings in " + ratings_path(corpus).string());
  return records;
}

std::map<std::string, std::string> strategy_groups(const Corpus& corpus) {
  std::map<std::string, std::string> out;
  for (const auto& p : corpus.plans) out[p.plan_id] = std::string(to_string(p.strategy));
  return out;
}

std::vector<std::string> grid_users(const std::vector<RatingRecord>& records) {
  std::set<std::string> users;
  for (const auto& r : records) users.insert(r.user);
  std::vector<std::string> out(users.begin(), users.end());
  if (out.size() > 1) out.push_back(kAverageUser);
  return out;
}

}  // namespace

std::string model_id(const std::string& user, FeatureSet features) {
  std::string id;
  for (char c : user) {
    id += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  }
  return id + "." + std::string(to_string(features));
}

TrainOutcome train_model(const Corpus& corpus, const std::vector<RatingRecord>& ratings,
                         const std::string& user, int rounds, std::uint64_t seed,
                         FeatureSet features) {
  const FeatureMatrix m = restrict_features(corpus.matrix, features);
  const Ratings r = ratings_for(ratings, m.rows, user);
  const PairSet pairs = make_pairs(m.rows, r);
  if (pairs.empty()) {
    throw NoPairsError("no preference pairs for user '" + user +
                       "': every plan's ratings are tied or missing");
  }
  TrainOptions options;
  options.rounds = rounds;
  options.seed = seed;
  options.feature_set = std::string(to_string(features));
  TrainOutcome out;
  out.model = train(pairs, m, options);
  out.model_id = model_id(user, features);
  out.pairs = pairs.size();
  out.rank_loss = rank_loss(score_rows(out.model, m), pairs);
  return out;
}

void save_model(const RankModel& model, const std::string& user, const fs::path& path) {
  auto j = model_to_json(model);
  j["user"] = user;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  write_text(tmp, j.dump(2) + "\n");
  fs::rename(tmp, path);
}

RankModel load_model(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("no model file " + path.string());
  try {
    return model_from_json(nlohmann::json::parse(read_text(path)));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("bad model file " + path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError("bad model file " + path.string() + ": " + e.what());
  }
}

int run_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
  if (args.out.empty()) throw UsageError("--out is required");
  if (args.plans.empty()) throw UsageError("--plans is required");
  if (args.max_alts == 0) throw UsageError("--max-alts must be positive");
  const auto plans = load_plans(args.plans);

  GenerationDictionary custom;
  const GenerationDictionary* dict = &default_dictionary();
  std::string dict_text(default_dictionary_text());
  if (args.dict) {
    dict_text = read_text(*args.dict);
    auto loaded = load_dictionary(dict_text);
    for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
    for (const auto& w : loaded.coverage_warnings) {
      err << "warning: dictionary has no template for " << w << '\n';
    }
    custom = std::move(loaded.dictionary);
    dict = &custom;
  }
  GenerateOptions options;
  options.max_alts = args.max_alts;
  options.seed = args.seed;
  options.min_count = args.min_count;
  const Corpus corpus = generate_corpus(plans, *dict, dict_text, options);
  write_corpus(corpus, args.out);
  out << "wrote " << corpus.alternatives.size() << " realizations (" << corpus.matrix.num_rows()
      << " generated, " << plans.size() << " template) for " << plans.size() << " plans, "
      << corpus.matrix.num_columns() << " features, to " << args.out.string() << '\n';
  return 0;
}

int run_train(const TrainArgs& args, std::ostream& out, std::ostream&) {
  if (args.rounds <= 0) throw UsageError("--rounds must be positive");
  const Corpus corpus = load_corpus(args.corpus);
  const auto records = corpus_ratings(args.corpus);
  const TrainOutcome t =
      train_model(corpus, records, args.user, args.rounds, args.seed, args.features);
  const fs::path path =
      args.out ? *args.out : models_dir(args.corpus) / (t.model_id + ".json");
  save_model(t.model, args.user, path);
  out << "trained " << args.user << " (" << to_string(args.features) << "): " << t.pairs
      << " pairs, " << t.model.rounds << " rounds, " << t.model.rules.size()
      << " rules, train RankLoss " << fixed4(t.rank_loss) << '\n'
      << "model written to " << path.string() << '\n';
  return 0;
}

int run_evaluate(const EvaluateArgs& args, std::ostream& out, std::ostream& err) {
  const Corpus corpus = load_corpus(args.corpus);
  const auto records = corpus_ratings(args.corpus);
  const fs::path report_dir = args.report_dir ? *args.report_dir : args.corpus / "reports";
  const FeatureMatrix m = restrict_features(corpus.matrix, args.features);

  if (!args.models.empty()) {
    const std::string user = args.user.value_or(kAverageUser);
    const Ratings r = ratings_for(records, m.rows, user);
    std::vector<std::size_t> rated;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i]) rated.push_back(i);
    }
    const FeatureMatrix rm = m.select_rows(rated);
    Ratings rr;
    for (auto i : rated) rr.push_back(r[i]);
    const PairSet pairs = make_pairs(rm.rows, rr);
    std::ostringstream table;
    table << "model\tuser\tpairs\trank_loss\ttop_model\ttop_human\ttop_random\n";
    for (const auto& path : args.models) {
      const RankModel model = load_model(path);
      const auto scores = score_rows(model, rm);
      bool empty = false;
      const double loss = rank_loss(scores, pairs, &empty);
      const TopRank top = top_rank(scores, rm.rows, rr);
      table << path.filename().string() << '\t' << user << '\t' << pairs.size() << '\t'
            << fixed4(loss) << '\t' << fixed4(top.model) << '\t' << fixed4(top.oracle) << '\t'
            << fixed4(top.random) << '\n';
      if (empty) err << "warning: no preference pairs for " << user << '\n';
    }
    out << table.str();
    write_text(report_dir / "models.tsv", table.str());
    return 0;
  }

  const std::vector<std::string> users =
      args.user ? std::vector<std::string>{*args.user} : grid_users(records);
  std::map<std::string, Ratings> by_user;
  for (const auto& u : users) by_user[u] = ratings_for(records, m.rows, u);

  CvOptions options;
  options.folds = args.folds;
  options.rounds = args.rounds;
  options.seed = args.seed;
  options.groups = strategy_groups(corpus);

  std::ostringstream grid;
  grid << "train\ttest\tgroup\trank_loss_mean\trank_loss_sd\tfolds\ttop_gap_mean\n";
  for (const auto& tu : users) {
    for (const auto& su : users) {
      EvalReport report;
      try {
        report = cross_validate(m, by_user[tu], by_user[su], options);
      } catch (const EvaluationError& e) {
        err << "warning: train " << tu << " test " << su << ": " << e.what() << '\n';
        continue;
      }
      const std::string stem = "cv-" + model_id(tu, args.features) + "-on-" + model_id(su, args.features);
      std::ostringstream text, table;
      write_report(text, report);
      write_report_table(table, report);
      write_text(report_dir / (stem + ".txt"), text.str());
      write_text(report_dir / (stem + ".tsv"), table.str());
      out << "train " << tu << ", test " << su << ": RankLoss "
          << fixed4(report.test_rank_loss.mean) << " +- " << fixed4(report.test_rank_loss.sd)
          << ", random " << fixed4(report.random_rank_loss.mean) << ", TopRank "
          << fixed4(report.top_model.mean) << " (human " << fixed4(report.top_oracle.mean)
          << ", random " << fixed4(report.top_random.mean) << ")\n";
      for (const auto& w : report.warnings) err << "warning: " << w << '\n';
      const std::size_t n = report.fold_results.size();
      grid << tu << '\t' << su << "\tall\t" << report.test_rank_loss.mean << '\t'
           << report.test_rank_loss.sd << '\t' << n << '\t' << report.top_gap.mean << '\n';
      for (const auto& [g, s] : report.group_rank_loss) {
        out << "  " << g << ": RankLoss " << fixed4(s.mean) << " +- " << fixed4(s.sd) << '\n';
        grid << tu << '\t' << su << '\t' << g << '\t' << s.mean << '\t' << s.sd << '\t' << s.n
             << "\t\n";
      }
    }
  }
  write_text(report_dir / "grid.tsv", grid.str());

  if (args.compare_features) {
    std::ostringstream cmp;
    cmp << "user\tfeatures\trank_loss_mean\trank_loss_sd\tt\tp\n";
    for (const auto& u : users) {
      const Ratings r = ratings_for(records, corpus.matrix.rows, u);
      std::map<FeatureSet, std::map<std::size_t, double>> per_fold;
      for (auto fs_ : {FeatureSet::kAll, FeatureSet::kNgram, FeatureSet::kConcept,
                       FeatureSet::kTree}) {
        const auto report =
            cross_validate(restrict_features(corpus.matrix, fs_), r, options);
        for (const auto& f : report.fold_results) per_fold[fs_][f.fold] = f.test_rank_loss;
      }
      for (auto fs_ : {FeatureSet::kNgram, FeatureSet::kConcept, FeatureSet::kTree,
                       FeatureSet::kAll}) {
        std::vector<double> a, b;
        for (const auto& [k, v] : per_fold[fs_]) {
          auto it = per_fold[FeatureSet::kAll].find(k);
          if (it == per_fold[FeatureSet::kAll].end()) continue;
          a.push_back(v);
          b.push_back(it->second);
        }
        const MeanSd s = mean_sd(a);
        cmp << u << '\t' << to_string(fs_) << '\t' << s.mean << '\t' << s.sd;
        if (fs_ != FeatureSet::kAll && a.size() >= 2) {
          const TTest t = paired_t_test(a, b);
          cmp << '\t' << t.t << '\t' << t.p;
        } else {
          cmp << "\t\t";
        }
        cmp << '\n';
      }
    }
    out << cmp.str();
    write_text(report_dir / "features.tsv", cmp.str());
  }
  out << "reports in " << report_dir.string() << '\n';
  return 0;
}

int run_bootstrap(const BootstrapArgs& args, std::ostream& out, std::ostream&) {
  const Corpus corpus = load_corpus(args.corpus);
  const auto records = corpus_ratings(args.corpus);
  const FeatureMatrix m = restrict_features(corpus.matrix, args.features);
  BootstrapOptions options;
  options.runs = args.runs;
  options.top_k = args.top_k;
  options.rounds = args.rounds;
  options.seed = args.seed;
  const auto summary = bootstrap_features(m, ratings_for(records, m.rows, args.user), options);
  write_bootstrap(out, summary);
  if (args.out) {
    std::ostringstream table;
    write_bootstrap_table(table, summary);
    write_text(*args.out, table.str());
  }
  return 0;
}

}  // namespace sentplan::cli
