#pragma once

// Sentence planning: walks a tp-tree bottom-up and combines the clauses of
// sibling subtrees with clause-combining operations, building an sp-tree
// (which operations were used) and a d-tree (the resulting syntax) in
// parallel. Operation choice is random, biased by an operator distribution
// and restricted by the rhetorical relation and by syntactic fit.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sentplan/discourse.h"
#include "sentplan/dtree.h"
#include "sentplan/lexicon.h"
#include "sentplan/plan.h"
#include "sentplan/random.h"

namespace sentplan {

enum class Operation {
  kMerge,
  kWithReduction,
  kRelativeClause,
  kCwConjunction,
  kCwInsertion,
  kPeriod,
};

enum class CueWord { kBecause, kSince, kWhile, kAnd, kBut, kHowever, kOnTheOtherHand };

enum class Order { kNS, kSN };

enum class OpCategory { kSyntactic, kConjunction, kInsertion, kPeriod };
inline constexpr std::size_t kNumCategories = 4;

std::string_view to_string(Operation op);
std::string_view to_string(CueWord cue);  // surface form, e.g. "on the other hand"
std::string_view to_string(Order order);
std::string_view to_string(OpCategory c);
OpCategory category(Operation op);

struct OpChoice {
  Operation operation = Operation::kPeriod;
  std::optional<CueWord> cue;
  Order order = Order::kNS;
  bool operator==(const OpChoice&) const = default;
};

struct SpNode {
  // Leaf fields.
  int assertion_id = 0;
  std::string speech_act;

  // Interior fields.
  Operation operation = Operation::kPeriod;
  std::optional<CueWord> cue;
  Order order = Order::kNS;
  DiscourseRelation relation = DiscourseRelation::kInfer;
  std::vector<SpNode> children;

  bool is_leaf() const { return children.empty(); }
  // Upper-case node name, e.g. CW-SINCE-NS-JUSTIFY or ASSERT-RECO-BEST.
  std::string label() const;
  bool operator==(const SpNode&) const = default;
};

std::string to_string(const SpNode& node);
std::vector<const SpNode*> frontier(const SpNode& root);

// Invariant breaches of an sp-tree: non-binary nodes, (operation, cue)
// pairs the relation does not permit, cue presence mismatches.
std::vector<std::string> check_sp_tree(const SpNode& root);

// The relation/operator table, before syntactic filtering.
bool relation_permits(DiscourseRelation rel, Operation op,
                      std::optional<CueWord> cue);

// A clause (or combination of clauses) being built.
struct PlanFragment {
  SpNode sp;
  DNode d;
};

// Operations legal for joining `left` then `right` under `rel`. `order`
// says whether the nucleus comes first; it only varies under justify.
std::vector<OpChoice> legal_ops(DiscourseRelation rel, const DNode& left,
                                const DNode& right, Order order = Order::kNS);

class IllegalOperationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

PlanFragment apply_op(const OpChoice& choice, PlanFragment left,
                      PlanFragment right, DiscourseRelation rel);

// Replaces a proper-name subject (or possessor) by a pronoun when the
// preceding clause has the same topic.
DNode pronominalize(DNode d);

// Category probabilities; renormalized over the categories that are legal
// at a choice point.
struct OperatorDistribution {
  double syntactic = 0.80;
  double conjunction = 0.10;
  double insertion = 0.09;
  double period = 0.01;

  double weight(OpCategory c) const;
  static OperatorDistribution uniform() { return {0.25, 0.25, 0.25, 0.25}; }
};

// Observes every choice point: the relation, the legal options and the pick.
using ChoiceObserver = std::function<void(
    DiscourseRelation, std::span<const OpChoice>, const OpChoice&)>;

OpChoice choose_op(std::span<const OpChoice> legal,
                   const OperatorDistribution& dist, Rng& rng);

struct SpgAlternative {
  std::string plan_id;
  std::size_t tp_index = 0;
  SpNode sp_tree;
  DNode d_tree;
  std::uint64_t seed = 0;
};

struct GeneratorOptions {
  std::size_t max_alts = 20;
  std::uint64_t seed = 0;
  OperatorDistribution distribution;
  ChoiceObserver observer;
};

// One sp-tree/d-tree pair for `tree`, fully determined by `seed`.
SpgAlternative sample_alternative(const ContentPlan& plan,
                                  const GenerationDictionary& dict,
                                  const TpTree& tree, std::size_t tp_index,
                                  std::uint64_t seed,
                                  const GeneratorOptions& options = {});

// Up to max_alts distinct alternatives; sampling stops after 10 * max_alts
// attempts.
std::vector<SpgAlternative> generate_alternatives(
    const ContentPlan& plan, const GenerationDictionary& dict,
    const GeneratorOptions& options);
std::vector<SpgAlternative> generate_alternatives(
    const ContentPlan& plan, const GenerationDictionary& dict,
    std::size_t max_alts, std::uint64_t seed);

}  // namespace sentplan
