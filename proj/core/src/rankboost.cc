#include "sentplan/rankboost.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

namespace sentplan {
namespace {

// Per-column view used by the weak-learner search.
struct ColumnIndex {
  std::vector<double> distinct;        // ascending
  std::vector<std::uint32_t> row_bin;  // index into distinct, per row
  // Pairs whose two rows fall in different bins.
  struct Active {
    std::uint32_t pair;
    std::uint32_t preferred_bin;
    std::uint32_t other_bin;
  };
  std::vector<Active> active;
};

std::vector<ColumnIndex> index_columns(const FeatureMatrix& m, const PairSet& pairs) {
  const std::size_t n_rows = m.num_rows();
  std::vector<std::vector<std::pair<std::size_t, double>>> by_column(m.num_columns());
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (const auto& [c, v] : m.cells[r]) by_column[c].emplace_back(r, v);
  }
  std::vector<ColumnIndex> out(m.num_columns());
  std::vector<double> dense(n_rows);
  for (std::size_t c = 0; c < m.num_columns(); ++c) {
    std::fill(dense.begin(), dense.end(), 0.0);
    for (const auto& [r, v] : by_column[c]) dense[r] = v;
    ColumnIndex& ci = out[c];
    ci.distinct = dense;
    std::sort(ci.distinct.begin(), ci.distinct.end());
    ci.distinct.erase(std::unique(ci.distinct.begin(), ci.distinct.end()), ci.distinct.end());
    ci.row_bin.resize(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
      ci.row_bin[r] = static_cast<std::uint32_t>(
          std::lower_bound(ci.distinct.begin(), ci.distinct.end(), dense[r]) -
          ci.distinct.begin());
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto a = ci.row_bin[pairs.pairs[p].preferred];
      const auto b = ci.row_bin[pairs.pairs[p].other];
      if (a != b) ci.active.push_back({static_cast<std::uint32_t>(p), a, b});
    }
  }
  return out;
}

struct Candidate {
  std::size_t column = 0;
  std::size_t bin = 0;  // h(x) = [bin(x) >= bin]
  double r = 0;
};

}  // namespace

PairSet make_pairs(const std::vector<RowId>& rows,
                   const std::vector<std::optional<double>>& ratings) {
  if (rows.size() != ratings.size()) {
    throw std::invalid_argument("rows and ratings differ in length");
  }
  std::map<std::string, std::vector<std::size_t>> by_plan;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (ratings[i]) by_plan[rows[i].plan_id].push_back(i);
  }
  PairSet out;
  for (const auto& [plan, members] : by_plan) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const double a = *ratings[members[i]];
        const double b = *ratings[members[j]];
        if (a == b) continue;
        out.pairs.push_back(a > b ? PreferencePair{members[i], members[j]}
                                  : PreferencePair{members[j], members[i]});
        out.plan_ids.push_back(plan);
      }
    }
  }
  return out;
}

RankModel train(const PairSet& pairs, const FeatureMatrix& matrix,
                const TrainOptions& options, LossTrace* trace) {
  if (pairs.empty()) throw TrainingError("no preference pairs to train on");
  if (options.rounds <= 0) throw TrainingError("rounds must be positive");
  for (const auto& p : pairs.pairs) {
    if (p.preferred >= matrix.num_rows() || p.other >= matrix.num_rows()) {
      throw TrainingError("pair refers to a row outside the matrix");
    }
  }

  const auto columns = index_columns(matrix, pairs);
  const std::size_t n_pairs = pairs.size();
  const double eps = 1.0 / (2.0 * static_cast<double>(n_pairs));
  std::vector<double> dist(n_pairs, 1.0 / static_cast<double>(n_pairs));
  std::vector<double> scores(matrix.num_rows(), 0.0);

  RankModel model;
  model.seed = options.seed;
  model.feature_set = options.feature_set;
  double loss = 1.0;
  if (trace) *trace = {loss};

  std::vector<double> diff;
  for (int round = 0; round < options.rounds; ++round) {
    Candidate best;
    bool found = false;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const ColumnIndex& ci = columns[c];
      if (ci.distinct.size() < 2 || ci.active.empty()) continue;
      diff.assign(ci.distinct.size() + 1, 0.0);
      for (const auto& a : ci.active) {
        // h(pref) - h(other) is +1 for cut bins in (other, pref], -1 in (pref, other].
        const double d = dist[a.pair];
        if (a.preferred_bin > a.other_bin) {
          diff[a.other_bin + 1] += d;
          diff[a.preferred_bin + 1] -= d;
        } else {
          diff[a.preferred_bin + 1] -= d;
          diff[a.other_bin + 1] += d;
        }
      }
      double r = 0;
      for (std::size_t k = 1; k < ci.distinct.size(); ++k) {
        r += diff[k];
        const double mag = std::abs(r);
        const double best_mag = std::abs(best.r);
        if (!found || mag > best_mag ||
            (mag == best_mag && c != best.column &&
             matrix.columns[c] < matrix.columns[best.column])) {
          best = {c, k, r};
          found = true;
        }
      }
    }
    if (!found || best.r == 0) break;  // nothing separates any pair

    const double r = std::clamp(best.r, -1.0, 1.0);
    const double alpha = 0.5 * std::log((1 + r + eps) / (1 - r + eps));
    const ColumnIndex& ci = columns[best.column];
    const double threshold = 0.5 * (ci.distinct[best.bin - 1] + ci.distinct[best.bin]);
    // A stump chosen again folds into its earlier rule; scores are unchanged.
    auto same = std::find_if(model.rules.begin(), model.rules.end(), [&](const Rule& rule) {
      return rule.feature == matrix.columns[best.column] && rule.threshold == threshold;
    });
    if (same != model.rules.end()) {
      same->alpha += alpha;
    } else {
      model.rules.push_back({matrix.columns[best.column], threshold, alpha});
    }
    for (std::size_t row = 0; row < scores.size(); ++row) {
      if (ci.row_bin[row] >= best.bin) scores[row] += alpha;
    }
    double z = 0;
    for (std::size_t p = 0; p < n_pairs; ++p) {
      const double hx = ci.row_bin[pairs.pairs[p].preferred] >= best.bin ? 1 : 0;
      const double hy = ci.row_bin[pairs.pairs[p].other] >= best.bin ? 1 : 0;
      dist[p] *= std::exp(alpha * (hy - hx));
      z += dist[p];
    }
    for (double& d : dist) d /= z;

    const double next = exponential_loss(scores, pairs);
    if (next > loss * (1 + 1e-9)) {
      throw std::logic_error("exponential loss increased in round " +
                             std::to_string(round + 1));
    }
    loss = next;
    if (trace) trace->push_back(loss);
    model.rounds = round + 1;
  }
  return model;
}

double score(const RankModel& model, const FeatureVector& x) {
  double f = 0;
  for (const auto& rule : model.rules) {
    if (x.get(rule.feature) >= rule.threshold) f += rule.alpha;
  }
  return f;
}

std::vector<double> score_rows(const RankModel& model, const FeatureMatrix& matrix) {
  std::vector<double> out(matrix.num_rows(), 0.0);
  for (const auto& rule : model.rules) {
    const std::size_t c = matrix.find_column(rule.feature);
    for (std::size_t r = 0; r < out.size(); ++r) {
      const double v = c < matrix.num_columns() ? matrix.at(r, c) : 0.0;
      if (v >= rule.threshold) out[r] += rule.alpha;
    }
  }
  return out;
}

double rank_loss(const std::vector<double>& scores, const PairSet& pairs, bool* empty) {
  if (empty) *empty = pairs.empty();
  if (pairs.empty()) return 0.0;
  std::size_t wrong = 0;
  for (const auto& p : pairs.pairs) {
    if (scores.at(p.preferred) <= scores.at(p.other)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(pairs.size());
}

double exponential_loss(const std::vector<double>& scores, const PairSet& pairs) {
  if (pairs.empty()) return 0.0;
  double sum = 0;
  for (const auto& p : pairs.pairs) sum += std::exp(scores[p.other] - scores[p.preferred]);
  return sum / static_cast<double>(pairs.size());
}

nlohmann::json model_to_json(const RankModel& model) {
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : model.rules) {
    nlohmann::json threshold =
        std::isinf(r.threshold) ? nlohmann::json("-inf") : nlohmann::json(r.threshold);
    rules.push_back({{"feature", r.feature}, {"threshold", threshold}, {"alpha", r.alpha}});
  }
  return {{"rounds", model.rounds},
          {"seed", model.seed},
          {"feature_set", model.feature_set},
          {"rules", rules}};
}

RankModel model_from_json(const nlohmann::json& j) {
  RankModel m;
  m.rounds = j.at("rounds").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.feature_set = j.value("feature_set", "");
  for (const auto& r : j.at("rules")) {
    Rule rule;
    rule.feature = r.at("feature").get<std::string>();
    const auto& t = r.at("threshold");
    if (t.is_string()) {
      if (t.get<std::string>() != "-inf") {
        throw std::invalid_argument("bad threshold " + t.dump());
      }
      rule.threshold = kMinusInfinity;
    } else {
      rule.threshold = t.get<double>();
    }
    rule.alpha = r.at("alpha").get<double>();
    if (!std::isfinite(rule.alpha)) throw std::invalid_argument("non-finite alpha");
    m.rules.push_back(std::move(rule));
  }
  return m;
}

}  // namespace sentplan
