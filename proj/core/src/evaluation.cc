#include "sentplan/evaluation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "sentplan/random.h"

namespace sentplan {
namespace {

// Runs fn(i) for i in [0, n) on a few threads; results keep index order.
template <typename Fn>
auto parallel_map(std::size_t n, Fn fn) -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
  std::vector<T> out(n);
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

std::map<std::string, std::vector<std::size_t>> rows_by_plan(const std::vector<RowId>& rows) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) out[rows[i].plan_id].push_back(i);
  return out;
}

Ratings subset(const Ratings& ratings, const std::vector<std::size_t>& rows) {
  Ratings out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(ratings[r]);
  return out;
}

// The rated rows only, so every plan that survives has a rating.
std::pair<FeatureMatrix, Ratings> rated_only(const FeatureMatrix& m, const Ratings& ratings) {
  if (ratings.size() != m.num_rows()) {
    throw EvaluationError("ratings do not match matrix rows");
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    if (ratings[i]) keep.push_back(i);
  }
  return {m.select_rows(keep), subset(ratings, keep)};
}

PairSet pairs_in_group(const PairSet& pairs, const std::map<std::string, std::string>& groups,
                       const std::string& group) {
  PairSet out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto it = groups.find(pairs.plan_ids[i]);
    if (it != groups.end() && it->second == group) {
      out.pairs.push_back(pairs.pairs[i]);
      out.plan_ids.push_back(pairs.plan_ids[i]);
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(4) << v;
  return ss.str();
}

std::string fmt(const MeanSd& m) { return fmt(m.mean) + " +- " + fmt(m.sd); }

}  // namespace

MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double sum = 0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

TopRank top_rank(const std::vector<double>& scores, const std::vector<RowId>& rows,
                 const Ratings& ratings) {
  if (scores.size() != rows.size() || ratings.size() != rows.size()) {
    throw EvaluationError("scores, rows and ratings differ in length");
  }
  TopRank out;
  const auto plans = rows_by_plan(rows);
  if (plans.empty()) return out;
  for (const auto& [plan, members] : plans) {
    std::size_t chosen = members.front();
    double best = 0;
    double sum = 0;
    std::size_t rated = 0;
    for (std::size_t r : members) {
      if (scores[r] > scores[chosen] ||
          (scores[r] == scores[chosen] && rows[r].alt_id < rows[chosen].alt_id)) {
        chosen = r;
      }
      if (ratings[r]) {
        best = rated ? std::max(best, *ratings[r]) : *ratings[r];
        sum += *ratings[r];
        ++rated;
      }
    }
    if (!rated) throw EvaluationError("plan " + plan + " has no rated alternative");
    if (!ratings[chosen]) {
      throw EvaluationError("top alternative " + rows[chosen].alt_id + " of plan " + plan +
                            " is unrated");
    }
    out.model += *ratings[chosen];
    out.oracle += best;
    out.random += sum / static_cast<double>(rated);
  }
  const double n = static_cast<double>(plans.size());
  out.model /= n;
  out.oracle /= n;
  out.random /= n;
  out.gap = out.oracle - out.model;
  return out;
}

std::vector<double> random_scores(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = uniform_unit(rng);
  return out;
}

std::vector<std::vector<std::string>> assign_folds(const std::vector<RowId>& rows,
                                                   std::size_t folds,
                                                   std::uint64_t seed) {
  std::vector<std::string> plans;
  for (const auto& [plan, members] : rows_by_plan(rows)) plans.push_back(plan);
  if (folds < 2) throw EvaluationError("need at least 2 folds");
  if (folds > plans.size()) {
    throw EvaluationError(std::to_string(folds) + " folds but only " +
                          std::to_string(plans.size()) + " plans");
  }
  Rng rng(mix_seed(seed, 0xf01d));
  shuffle(std::span(plans), rng);
  std::vector<std::vector<std::string>> out(folds);
  for (std::size_t i = 0; i < plans.size(); ++i) out[i % folds].push_back(plans[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

EvalReport cross_validate(const FeatureMatrix& matrix, const Ratings& ratings,
                          const CvOptions& options) {
  return cross_validate(matrix, ratings, ratings, options);
}

EvalReport cross_validate(const FeatureMatrix& matrix, const Ratings& train_ratings,
                          const Ratings& test_ratings, const CvOptions& options) {
  if (train_ratings.size() != matrix.num_rows() || test_ratings.size() != matrix.num_rows()) {
    throw EvaluationError("ratings do not match matrix rows");
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < matrix.num_rows(); ++i) {
    if (train_ratings[i] || test_ratings[i]) keep.push_back(i);
  }
  const FeatureMatrix m = matrix.select_rows(keep);
  const Ratings rt = subset(train_ratings, keep);
  const Ratings rs = subset(test_ratings, keep);
  const auto folds = assign_folds(m.rows, options.folds, options.seed);

  std::set<std::string> group_names;
  for (const auto& [plan, g] : options.groups) group_names.insert(g);

  struct Outcome {
    std::optional<FoldResult> result;
    std::string warning;
  };
  auto outcomes = parallel_map(folds.size(), [&](std::size_t k) -> Outcome {
    const std::set<std::string> held(folds[k].begin(), folds[k].end());
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < m.num_rows(); ++i) {
      if (held.count(m.rows[i].plan_id)) {
        if (rs[i]) test_rows.push_back(i);
      } else if (rt[i]) {
        train_rows.push_back(i);
      }
    }
    const FeatureMatrix train_m = m.select_rows(train_rows);
    const FeatureMatrix test_m = m.select_rows(test_rows);
    const Ratings train_r = subset(rt, train_rows);
    const Ratings test_r = subset(rs, test_rows);
    const PairSet train_pairs = make_pairs(train_m.rows, train_r);
    const PairSet test_pairs = make_pairs(test_m.rows, test_r);
    if (train_pairs.empty() || test_pairs.empty()) {
      return {std::nullopt, "fold " + std::to_string(k) + " skipped: no " +
                                (train_pairs.empty() ? "training" : "test") + " pairs"};
    }
    TrainOptions to;
    to.rounds = options.rounds;
    to.seed = options.seed;
    const RankModel model = train(train_pairs, train_m, to);

    FoldResult fr;
    fr.fold = k;
    fr.train_pairs = train_pairs.size();
    fr.test_pairs = test_pairs.size();
    fr.train_rank_loss = rank_loss(score_rows(model, train_m), train_pairs);
    const auto scores = score_rows(model, test_m);
    fr.test_rank_loss = rank_loss(scores, test_pairs);
    fr.random_rank_loss = rank_loss(
        random_scores(test_m.num_rows(), mix_seed(options.seed, 0x7a2d + k)), test_pairs);
    fr.top = top_rank(scores, test_m.rows, test_r);
    for (const auto& g : group_names) {
      const PairSet gp = pairs_in_group(test_pairs, options.groups, g);
      if (!gp.empty()) fr.group_rank_loss[g] = rank_loss(scores, gp);
    }
    return {fr, ""};
  });

  EvalReport report;
  report.folds = options.folds;
  report.seed = options.seed;
  report.rounds = options.rounds;
  std::vector<double> train_l, test_l, rand_l, tm, to, tr, tg;
  std::map<std::string, std::vector<double>> groups;
  for (auto& o : outcomes) {
    if (!o.result) {
      report.warnings.push_back(o.warning);
      continue;
    }
    const FoldResult& f = *o.result;
    train_l.push_back(f.train_rank_loss);
    test_l.push_back(f.test_rank_loss);
    rand_l.push_back(f.random_rank_loss);
    tm.push_back(f.top.model);
    to.push_back(f.top.oracle);
    tr.push_back(f.top.random);
    tg.push_back(f.top.gap);
    for (const auto& [g, l] : f.group_rank_loss) groups[g].push_back(l);
    report.fold_results.push_back(f);
  }
  if (report.fold_results.empty()) throw EvaluationError("every fold was skipped");
  report.train_rank_loss = mean_sd(train_l);
  report.test_rank_loss = mean_sd(test_l);
  report.random_rank_loss = mean_sd(rand_l);
  report.top_model = mean_sd(tm);
  report.top_oracle = mean_sd(to);
  report.top_random = mean_sd(tr);
  report.top_gap = mean_sd(tg);
  for (const auto& [g, ls] : groups) report.group_rank_loss[g] = mean_sd(ls);
  return report;
}

std::pair<FeatureMatrix, std::vector<std::pair<std::string, std::string>>>
eliminate_correlated(const FeatureMatrix& matrix) {
  std::map<std::vector<long long>, std::vector<std::size_t>> groups;
  for (std::size_t c = 0; c < matrix.num_columns(); ++c) {
    std::vector<double> x = matrix.column(c);
    double mean = 0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(std::max<std::size_t>(x.size(), 1));
    double norm = 0;
    for (double& v : x) {
      v -= mean;
      norm += v * v;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;  // constant: correlation undefined
    double sign = 0;
    for (double v : x) {
      if (std::abs(v / norm) > 1e-9) {
        sign = v > 0 ? 1 : -1;
        break;
      }
    }
    std::vector<long long> key;
    key.reserve(x.size());
    for (double v : x) key.push_back(std::llround(sign * v / norm * 1e9));
    groups[std::move(key)].push_back(c);
  }
  std::vector<bool> drop(matrix.num_columns(), false);
  std::vector<std::pair<std::string, std::string>> dropped;
  for (auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return matrix.columns[a] < matrix.columns[b];
    });
    for (std::size_t i = 1; i < members.size(); ++i) {
      drop[members[i]] = true;
      dropped.emplace_back(matrix.columns[members[0]], matrix.columns[members[i]]);
    }
  }
  std::sort(dropped.begin(), dropped.end());
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < matrix.num_columns(); ++c) {
    if (!drop[c]) keep.push_back(c);
  }
  return {matrix.select_columns(keep), dropped};
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> bootstrap_split(
    const std::vector<RowId>& rows, const BootstrapOptions& options, std::size_t run) {
  Rng rng(mix_seed(options.seed, run));
  std::vector<std::size_t> train_rows, test_rows;
  for (const auto& [plan, members] : rows_by_plan(rows)) {
    std::vector<std::size_t> order = members;
    shuffle(std::span(order), rng);
    std::size_t n_train = options.train_per_plan;
    std::size_t n_test = options.test_per_plan;
    if (order.size() < n_train + n_test) {
      n_train = order.size() / 2;
      n_test = order.size() - n_train;
    }
    train_rows.insert(train_rows.end(), order.begin(), order.begin() + n_train);
    test_rows.insert(test_rows.end(), order.begin() + n_train,
                     order.begin() + n_train + n_test);
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {train_rows, test_rows};
}

BootstrapSummary bootstrap_features(const FeatureMatrix& matrix, const Ratings& ratings,
                                    const BootstrapOptions& options) {
  if (options.runs == 0) throw EvaluationError("bootstrap needs at least one run");
  const auto [rated_m, rated_r] = rated_only(matrix, ratings);
  auto [m, eliminated] = eliminate_correlated(rated_m);

  struct RunResult {
    std::map<std::string, double> alpha;
    std::optional<double> test_loss;
  };
  auto runs = parallel_map(options.runs, [&](std::size_t run) -> RunResult {
    const auto [train_rows, test_rows] = bootstrap_split(m.rows, options, run);
    const FeatureMatrix train_m = m.select_rows(train_rows);
    const PairSet pairs = make_pairs(train_m.rows, subset(rated_r, train_rows));
    RunResult out;
    if (pairs.empty()) return out;
    TrainOptions to;
    to.rounds = options.rounds;
    to.seed = mix_seed(options.seed, run);
    const RankModel model = train(pairs, train_m, to);
    for (const auto& rule : model.rules) out.alpha[rule.feature] += rule.alpha;
    const FeatureMatrix test_m = m.select_rows(test_rows);
    const PairSet test_pairs = make_pairs(test_m.rows, subset(rated_r, test_rows));
    if (!test_pairs.empty()) out.test_loss = rank_loss(score_rows(model, test_m), test_pairs);
    return out;
  });

  BootstrapSummary summary;
  summary.runs = options.runs;
  summary.eliminated = std::move(eliminated);
  for (const auto& c : m.columns) summary.mean_alpha[c] = 0;
  std::vector<double> losses;
  for (const auto& run : runs) {
    for (const auto& [f, a] : run.alpha) summary.mean_alpha[f] += a;
    if (run.test_loss) losses.push_back(*run.test_loss);
  }
  for (auto& [f, a] : summary.mean_alpha) a /= static_cast<double>(options.runs);
  summary.test_rank_loss = mean_sd(losses);

  std::vector<std::pair<std::string, double>> ranked(summary.mean_alpha.begin(),
                                                     summary.mean_alpha.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return std::abs(a.second) > std::abs(b.second);
  });
  for (std::size_t i = 0; i < ranked.size() && i < options.top_k; ++i) {
    summary.selected.push_back(ranked[i].first);
  }
  return summary;
}

TTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw EvaluationError("paired samples differ in length");
  if (a.size() < 2) throw EvaluationError("paired t-test needs at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const MeanSd s = mean_sd(d);
  TTest out;
  out.df = a.size() - 1;
  if (s.sd == 0) {
    if (s.mean == 0) return out;
    out.t = s.mean > 0 ? INFINITY : -INFINITY;
    out.p = 0;
    return out;
  }
  out.t = s.mean / (s.sd / std::sqrt(static_cast<double>(a.size())));
  const double df = static_cast<double>(out.df);
  out.p = boost::math::ibeta(df / 2, 0.5, df / (df + out.t * out.t));
  return out;
}

void write_report(std::ostream& out, const EvalReport& r) {
  out << "folds " << r.folds << " (ran " << r.fold_results.size() << "), rounds "
      << r.rounds << ", seed " << r.seed << '\n';
  out << "train RankLoss   " << fmt(r.train_rank_loss) << '\n';
  out << "test RankLoss    " << fmt(r.test_rank_loss) << '\n';
  out << "random RankLoss  " << fmt(r.random_rank_loss) << '\n';
  out << "TopRank model    " << fmt(r.top_model) << '\n';
  out << "TopRank human    " << fmt(r.top_oracle) << '\n';
  out << "TopRank random   " << fmt(r.top_random) << '\n';
  out << "TopRank gap      " << fmt(r.top_gap) << '\n';
  for (const auto& [g, m] : r.group_rank_loss) {
    out << "test RankLoss " << g << "  " << fmt(m) << '\n';
  }
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
}

void write_report_table(std::ostream& out, const EvalReport& r) {
  out << "fold\ttrain_pairs\ttest_pairs\ttrain_rank_loss\ttest_rank_loss\t"
         "random_rank_loss\ttop_model\ttop_human\ttop_random\ttop_gap\n";
  for (const auto& f : r.fold_results) {
    out << f.fold << '\t' << f.train_pairs << '\t' << f.test_pairs << '\t'
        << fmt(f.train_rank_loss) << '\t' << fmt(f.test_rank_loss) << '\t'
        << fmt(f.random_rank_loss) << '\t' << fmt(f.top.model) << '\t'
        << fmt(f.top.oracle) << '\t' << fmt(f.top.random) << '\t' << fmt(f.top.gap)
        << '\n';
  }
}

void write_bootstrap(std::ostream& out, const BootstrapSummary& s) {
  out << "runs " << s.runs << ", selected " << s.selected.size() << ", test RankLoss "
      << fmt(s.test_rank_loss) << '\n';
  out << "eliminated " << s.eliminated.size() << " perfectly correlated features\n";
  for (std::size_t i = 0; i < s.selected.size(); ++i) {
    out << i + 1 << "  " << s.selected[i] << "  " << fmt(s.mean_alpha.at(s.selected[i]))
        << '\n';
  }
}

void write_bootstrap_table(std::ostream& out, const BootstrapSummary& s) {
  out << "rank\tfeature\tmean_alpha\n";
  for (std::size_t i = 0; i < s.selected.size(); ++i) {
    out << i + 1 << '\t' << s.selected[i] << '\t' << s.mean_alpha.at(s.selected[i]) << '\n';
  }
}

}  // namespace sentplan
