#include "sentplan/synthetic.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>

#include "sentplan/lexicon.h"
#include "sentplan/random.h"

namespace sentplan {
namespace {

constexpr std::array<const char*, 16> kNames = {
    "Babbo",       "Uguale",     "Da Andrea",   "Komodo",     "Takahachi", "Japonica",
    "Bond Street", "Dojo",       "Penang",      "Baluchi's",  "Above",     "Carmine's",
    "Caffe Cielo", "Chanpen Thai", "Shabu-Tatsu", "John's Pizzeria"};
constexpr std::array<const char*, 8> kCuisines = {
    "Italian", "Thai", "Japanese", "French", "New American", "Indian", "Malaysian", "Pizza"};
constexpr std::array<const char*, 6> kNeighborhoods = {
    "Midtown West", "Chelsea", "Gramercy", "Tribeca", "Soho", "Greenwich Village"};
constexpr std::array<const char*, 5> kQualities = {"mediocre", "decent", "good",
                                                   "very good", "excellent"};

template <std::size_t N>
const char* pick(const std::array<const char*, N>& xs, Rng& rng) {
  return xs[uniform_index(rng, N)];
}

std::string attribute_value(Predicate p, Rng& rng) {
  switch (p) {
    case Predicate::kCuisine: return pick(kCuisines, rng);
    case Predicate::kNeighborhood: return pick(kNeighborhoods, rng);
    case Predicate::kPrice: return std::to_string(12 + uniform_index(rng, 40));
    default: return pick(kQualities, rng);
  }
}

std::vector<Predicate> attributes(Rng& rng, std::size_t n) {
  std::vector<Predicate> all = {Predicate::kCuisine, Predicate::kFoodQuality,
                                Predicate::kService, Predicate::kDecor,
                                Predicate::kPrice,   Predicate::kNeighborhood};
  shuffle(std::span(all), rng);
  all.resize(n);
  return all;
}

ContentPlan recommend_plan(const std::string& id, Rng& rng) {
  const std::string name = pick(kNames, rng);
  std::string text = "strategy: recommend\nitems: " + name + "\n";
  const auto attrs = attributes(rng, 4);
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    text += "relation: justify(nuc:1, sat:" + std::to_string(i + 2) + ")\n";
  }
  text += "assert: 1 claim-best " + name + "\n";
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    text += "assert: " + std::to_string(i + 2) + " " + std::string(to_string(attrs[i])) +
            " " + name + " " + attribute_value(attrs[i], rng) + "\n";
  }
  return parse_plan(text, id);
}

ContentPlan compare_plan(const std::string& id, Rng& rng) {
  std::string a = pick(kNames, rng);
  std::string b = pick(kNames, rng);
  while (b == a) b = pick(kNames, rng);
  const auto attrs = attributes(rng, 2);
  std::string text = "strategy: compare3\nitems: " + a + "; " + b + "\n";
  for (int i = 2; i <= 5; ++i) {
    text += "relation: elaboration(nuc:1, sat:" + std::to_string(i) + ")\n";
  }
  text += "relation: contrast(nuc:2, nuc:3)\nrelation: contrast(nuc:4, nuc:5)\n";
  text += "assert: 1 claim-exceptional " + a + ", " + b + "\n";
  int id_no = 2;
  for (Predicate p : attrs) {
    for (const auto& e : {a, b}) {
      text += "assert: " + std::to_string(id_no++) + " " + std::string(to_string(p)) + " " +
              e + " " + attribute_value(p, rng) + "\n";
    }
  }
  return parse_plan(text, id);
}

void count_periods(const SpNode& n, std::size_t& count) {
  if (!n.is_leaf() && n.operation == Operation::kPeriod) ++count;
  for (const auto& c : n.children) count_periods(c, count);
}

}  // namespace

std::vector<ContentPlan> synthetic_plans(std::size_t count, std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x5e7));
  std::vector<ContentPlan> out;
  for (std::size_t i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "synthetic-%03zu", i);
    out.push_back(i % 2 == 0 ? recommend_plan(id, rng) : compare_plan(id, rng));
  }
  return out;
}

std::size_t period_count(const SpNode& root) {
  std::size_t n = 0;
  count_periods(root, n);
  return n;
}

double oracle_rating(const SpgAlternative& alt) {
  const double r = 5.0 - static_cast<double>(period_count(alt.sp_tree));
  return std::clamp(r, 1.0, 5.0);
}

SyntheticCorpus build_synthetic_corpus(const SyntheticOptions& options) {
  SyntheticCorpus corpus;
  corpus.plans = synthetic_plans(options.plans, options.seed);
  std::vector<FeatureRow> rows;
  for (std::size_t p = 0; p < corpus.plans.size(); ++p) {
    const ContentPlan& plan = corpus.plans[p];
    EntityLexicon lexicon;
    lexicon.add_plan(plan);
    GeneratorOptions g;
    g.max_alts = options.max_alts;
    g.seed = mix_seed(options.seed, p);
    g.distribution = options.distribution;
    auto alts = generate_alternatives(plan, default_dictionary(), g);
    for (std::size_t a = 0; a < alts.size(); ++a) {
      char alt_id[16];
      std::snprintf(alt_id, sizeof alt_id, "a%02zu", a);
      rows.push_back({{plan.plan_id, alt_id}, extract_features(plan, alts[a], lexicon)});
      corpus.ratings.push_back(oracle_rating(alts[a]));
      corpus.alternatives.push_back(std::move(alts[a]));
    }
  }
  corpus.matrix = assemble_and_prune(rows, options.min_count);
  return corpus;
}

}  // namespace sentplan
