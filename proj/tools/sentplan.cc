// sentplan: generate sentence-plan corpora, collect ratings, and train and
// evaluate RankBoost rankers.

#include <CLI11.hpp>

#include <iostream>
#include <nlohmann/json.hpp>

#include "commands.h"
#include "sentplan/evaluation.h"
#include "sentplan/lexicon.h"
#include "sentplan/plan.h"
#include "service.h"

namespace {

using namespace sentplan;

FeatureSet feature_set(const std::string& s) {
  auto f = parse_feature_set(s);
  if (!f) throw cli::UsageError("--features must be one of all, ngram, concept, tree");
  return *f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trainable sentence planning: generate, rate, train, evaluate"};
  app.require_subcommand(1);

  cli::GenerateArgs gen;
  std::vector<std::string> plan_paths;
  std::string dict_path;
  auto* g = app.add_subcommand("generate", "Generate alternatives for content plans");
  g->add_option("--plans", plan_paths, "Plan files or directories")->required();
  g->add_option("--dict", dict_path, "Generation dictionary (default: built in)");
  g->add_option("--max-alts", gen.max_alts, "Alternatives per plan")->capture_default_str();
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->add_option("--min-count", gen.min_count, "Feature pruning threshold")
      ->capture_default_str();
  g->add_option("--out", gen.out, "New corpus directory")->required();

  cli::TrainArgs tr;
  std::string tr_features = "all", tr_out;
  auto* t = app.add_subcommand("train", "Train a ranker on collected ratings");
  t->add_option("--corpus", tr.corpus, "Corpus directory")->required();
  t->add_option("--user", tr.user, "User id, or AVG for the mean of all users")
      ->capture_default_str();
  t->add_option("--rounds", tr.rounds, "Boosting rounds")->capture_default_str();
  t->add_option("--seed", tr.seed, "Random seed")->capture_default_str();
  t->add_option("--features", tr_features, "all, ngram, concept or tree")
      ->capture_default_str();
  t->add_option("--out", tr_out, "Model file (default: corpus models/)");

  cli::EvaluateArgs ev;
  std::string ev_features = "all", ev_user, ev_reports;
  std::vector<std::string> ev_models;
  auto* e = app.add_subcommand("evaluate", "Cross-validate rankers or score saved models");
  e->add_option("--corpus", ev.corpus, "Corpus directory")->required();
  e->add_option("--model", ev_models, "Saved models to score instead of cross-validating");
  e->add_option("--user", ev_user, "Only this user (default: every user and AVG)");
  e->add_option("--folds", ev.folds, "Cross-validation folds")->capture_default_str();
  e->add_option("--rounds", ev.rounds, "Boosting rounds")->capture_default_str();
  e->add_option("--seed", ev.seed, "Random seed")->capture_default_str();
  e->add_option("--features", ev_features, "all, ngram, concept or tree")
      ->capture_default_str();
  e->add_flag("--compare-features", ev.compare_features,
              "Also cross-validate each feature family and t-test it against all");
  e->add_option("--out", ev_reports, "Report directory (default: corpus reports/)");

  cli::BootstrapArgs bs;
  std::string bs_features = "all", bs_out;
  auto* b = app.add_subcommand("bootstrap", "Rank features by mean alpha over bootstrap runs");
  b->add_option("--corpus", bs.corpus, "Corpus directory")->required();
  b->add_option("--user", bs.user, "User id, or AVG")->capture_default_str();
  b->add_option("--runs", bs.runs, "Bootstrap runs")->capture_default_str();
  b->add_option("--top-k", bs.top_k, "Features to keep")->capture_default_str();
  b->add_option("--rounds", bs.rounds, "Boosting rounds")->capture_default_str();
  b->add_option("--seed", bs.seed, "Random seed")->capture_default_str();
  b->add_option("--features", bs_features, "all, ngram, concept or tree")
      ->capture_default_str();
  b->add_option("--out", bs_out, "Write the selected features as a table");

  cli::ServeArgs sv;
  auto* s = app.add_subcommand("serve", "Serve the rating API over a corpus");
  s->add_option("--corpus", sv.corpus, "Corpus directory")->required();
  s->add_option("--host", sv.host, "Address to bind")->capture_default_str();
  s->add_option("--port", sv.port, "Port, 0 for any free port")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*g) {
      for (const auto& p : plan_paths) gen.plans.emplace_back(p);
      if (!dict_path.empty()) gen.dict = dict_path;
      return cli::run_generate(gen, std::cout, std::cerr);
    }
    if (*t) {
      tr.features = feature_set(tr_features);
      if (!tr_out.empty()) tr.out = tr_out;
      return cli::run_train(tr, std::cout, std::cerr);
    }
    if (*e) {
      ev.features = feature_set(ev_features);
      for (const auto& m : ev_models) ev.models.emplace_back(m);
      if (!ev_user.empty()) ev.user = ev_user;
      if (!ev_reports.empty()) ev.report_dir = ev_reports;
      return cli::run_evaluate(ev, std::cout, std::cerr);
    }
    if (*b) {
      bs.features = feature_set(bs_features);
      if (!bs_out.empty()) bs.out = bs_out;
      return cli::run_bootstrap(bs, std::cout, std::cerr);
    }
    if (*s) return cli::run_serve(sv, std::cout);
  } catch (const cli::NoPairsError& err) {
    std::cerr << "sentplan: " << err.what() << '\n';
    return 3;
  } catch (const cli::UsageError& err) {
    std::cerr << "sentplan: " << err.what() << '\n';
    return 2;
  } catch (const PlanError& err) {
    std::cerr << "sentplan: invalid plan: " << err.what() << '\n';
    if (auto* shape = dynamic_cast<const PlanShapeError*>(&err)) {
      for (const auto& v : shape->violations()) {
        std::cerr << "  " << v.code << ": " << v.message << '\n';
      }
    }
    return 2;
  } catch (const DictionaryError& err) {
    std::cerr << "sentplan: dictionary: " << err.what() << '\n';
    return 2;
  } catch (const CorpusError& err) {
    std::cerr << "sentplan: " << err.what() << '\n';
    return 2;
  } catch (const RatingError& err) {
    std::cerr << "sentplan: " << err.what() << '\n';
    return 2;
  } catch (const EvaluationError& err) {
    std::cerr << "sentplan: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "sentplan: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
