#pragma once

// Discourse planning: arranges a content plan's assertions into text-plan
// trees whose leaves are assertions and whose interior nodes are rhetorical
// relations. Assertions are grouped by what they talk about, either by
// restaurant or by attribute, so that the discourse center does not hop back
// and forth between entities.

#include <cstdint>
#include <string>
#include <vector>

#include "sentplan/plan.h"

namespace sentplan {

enum class DiscourseRelation { kJustify, kContrast, kElaboration, kInfer };

std::string_view to_string(DiscourseRelation r);

enum class Grouping { kSingle, kByEntity, kByAttribute };

std::string_view to_string(Grouping g);

// Speech-act label of a leaf, e.g. assert-reco-best, assert-com-decor.
std::string speech_act_label(Strategy strategy, Predicate predicate);

struct TpNode {
  static constexpr int kAllNuclei = -1;

  // Leaf fields.
  int assertion_id = 0;
  std::string speech_act;
  std::string entity;  // empty for claims spanning several entities

  // Interior fields.
  DiscourseRelation relation = DiscourseRelation::kInfer;
  int nucleus = kAllNuclei;  // index of the nucleus child, or all children
  std::vector<TpNode> children;

  bool is_leaf() const { return children.empty(); }
  bool operator==(const TpNode&) const = default;
};

struct TpTree {
  TpNode root;
  Grouping grouping = Grouping::kSingle;
};

// Samples distinct tp-trees for `plan`. Deterministic in (plan, max_trees,
// seed); always returns at least one tree.
std::vector<TpTree> build_tp_trees(const ContentPlan& plan,
                                   std::size_t max_trees, std::uint64_t seed);

// Adjacent leaf pairs that concern different entities. Claims that span all
// entities are skipped.
std::size_t entity_switch_count(const TpTree& tree);

std::vector<int> leaf_order(const TpTree& tree);
std::vector<const TpNode*> leaves(const TpTree& tree);

std::string to_string(const TpNode& node);

}  // namespace sentplan
