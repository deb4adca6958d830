#include "sentplan/discourse.h"

#include <algorithm>
#include <map>
#include <set>

#include "sentplan/random.h"

namespace sentplan {
namespace {

TpNode make_leaf(const ContentPlan& plan, const Assertion& a) {
  TpNode leaf;
  leaf.assertion_id = a.id;
  leaf.speech_act = speech_act_label(plan.strategy, a.predicate);
  if (a.entities.size() == 1 && a.predicate != Predicate::kClaimExceptional) {
    leaf.entity = a.entity();
  }
  return leaf;
}

TpNode make_internal(DiscourseRelation rel, std::vector<TpNode> children,
                     int nucleus = TpNode::kAllNuclei) {
  TpNode node;
  node.relation = rel;
  node.nucleus = nucleus;
  node.children = std::move(children);
  return node;
}

// Joins units under an infer node, or passes a single unit through.
TpNode join(std::vector<TpNode> units) {
  if (units.size() == 1) return std::move(units.front());
  return make_internal(DiscourseRelation::kInfer, std::move(units));
}

const Assertion* claim_of(const ContentPlan& plan) {
  for (const auto& a : plan.assertions) {
    if (is_claim(a.predicate)) return &a;
  }
  return nullptr;
}

std::vector<const Assertion*> attributes_of(const ContentPlan& plan) {
  std::vector<const Assertion*> out;
  for (const auto& a : plan.assertions) {
    if (!is_claim(a.predicate)) out.push_back(&a);
  }
  return out;
}

std::vector<std::string> entity_order(const ContentPlan& plan) {
  std::vector<std::string> out;
  if (const Assertion* claim = claim_of(plan);
      claim && claim->predicate == Predicate::kClaimExceptional) {
    out = claim->entities;
  }
  for (const auto* a : attributes_of(plan)) {
    if (std::find(out.begin(), out.end(), a->entity()) == out.end()) {
      out.push_back(a->entity());
    }
  }
  return out;
}

std::vector<TpNode> entity_groups(const ContentPlan& plan, Rng& rng) {
  std::vector<std::string> entities = entity_order(plan);
  shuffle(std::span(entities), rng);
  std::vector<TpNode> groups;
  for (const auto& e : entities) {
    std::vector<TpNode> leaves;
    for (const auto* a : attributes_of(plan)) {
      if (a->entity() == e) leaves.push_back(make_leaf(plan, *a));
    }
    if (leaves.empty()) continue;
    shuffle(std::span(leaves), rng);
    groups.push_back(join(std::move(leaves)));
  }
  return groups;
}

// Same-attribute units: a contrast node when the attribute's assertions are
// exactly one contrast pair, otherwise a single leaf or an infer group.
std::vector<TpNode> attribute_units(const ContentPlan& plan, Rng& rng) {
  std::vector<Predicate> order;
  std::map<Predicate, std::vector<const Assertion*>> by_predicate;
  for (const auto* a : attributes_of(plan)) {
    if (!by_predicate.count(a->predicate)) order.push_back(a->predicate);
    by_predicate[a->predicate].push_back(a);
  }
  std::vector<TpNode> units;
  for (Predicate p : order) {
    const auto& members = by_predicate[p];
    std::vector<TpNode> leaves;
    for (const auto* a : members) leaves.push_back(make_leaf(plan, *a));
    shuffle(std::span(leaves), rng);
    if (leaves.size() == 1) {
      units.push_back(std::move(leaves.front()));
      continue;
    }
    bool contrasted = false;
    if (members.size() == 2) {
      std::set<int> ids = {members[0]->id, members[1]->id};
      for (const auto& rel : plan.relations) {
        if (rel.kind == RelationKind::kContrast &&
            std::set<int>(rel.nuclei.begin(), rel.nuclei.end()) == ids) {
          contrasted = true;
        }
      }
    }
    units.push_back(make_internal(contrasted ? DiscourseRelation::kContrast
                                             : DiscourseRelation::kInfer,
                                  std::move(leaves)));
  }
  shuffle(std::span(units), rng);
  return units;
}

TpTree sample_recommend(const ContentPlan& plan, Rng& rng) {
  const Assertion* claim = claim_of(plan);
  TpNode claim_leaf = make_leaf(plan, *claim);
  std::vector<TpNode> sats;
  for (const auto* a : attributes_of(plan)) sats.push_back(make_leaf(plan, *a));
  if (sats.empty()) return {std::move(claim_leaf), Grouping::kSingle};
  shuffle(std::span(sats), rng);
  TpNode group = join(std::move(sats));
  const bool claim_first = uniform_index(rng, 2) == 0;
  std::vector<TpNode> children;
  if (claim_first) {
    children.push_back(std::move(claim_leaf));
    children.push_back(std::move(group));
  } else {
    children.push_back(std::move(group));
    children.push_back(std::move(claim_leaf));
  }
  return {make_internal(DiscourseRelation::kJustify, std::move(children),
                        claim_first ? 0 : 1),
          Grouping::kSingle};
}

TpTree sample_compare(const ContentPlan& plan, Rng& rng) {
  const bool by_entity = uniform_index(rng, 2) == 0;
  TpNode body;
  if (by_entity) {
    std::vector<TpNode> groups = entity_groups(plan, rng);
    if (plan.strategy == Strategy::kCompare2 && groups.size() == 2) {
      body = make_internal(DiscourseRelation::kContrast, std::move(groups));
    } else {
      body = join(std::move(groups));
    }
  } else {
    body = join(attribute_units(plan, rng));
  }
  const Grouping grouping =
      by_entity ? Grouping::kByEntity : Grouping::kByAttribute;
  if (plan.strategy == Strategy::kCompare2) return {std::move(body), grouping};

  std::vector<TpNode> children;
  children.push_back(make_leaf(plan, *claim_of(plan)));
  children.push_back(std::move(body));
  return {make_internal(DiscourseRelation::kElaboration, std::move(children), 0),
          grouping};
}

void collect_leaves(const TpNode& node, std::vector<const TpNode*>& out) {
  if (node.is_leaf()) {
    out.push_back(&node);
    return;
  }
  for (const auto& c : node.children) collect_leaves(c, out);
}

}  // namespace

std::string_view to_string(DiscourseRelation r) {
  switch (r) {
    case DiscourseRelation::kJustify: return "justify";
    case DiscourseRelation::kContrast: return "contrast";
    case DiscourseRelation::kElaboration: return "elaboration";
    case DiscourseRelation::kInfer: return "infer";
  }
  return "?";
}

std::string_view to_string(Grouping g) {
  switch (g) {
    case Grouping::kSingle: return "single";
    case Grouping::kByEntity: return "by-entity";
    case Grouping::kByAttribute: return "by-attribute";
  }
  return "?";
}

std::string speech_act_label(Strategy strategy, Predicate predicate) {
  std::string label = strategy == Strategy::kRecommend ? "assert-reco-"
                                                       : "assert-com-";
  switch (predicate) {
    case Predicate::kClaimBest: return label + "best";
    case Predicate::kClaimExceptional: return label + "exceptional";
    case Predicate::kNeighborhood: return label + "nbhd";
    default: return label + std::string(to_string(predicate));
  }
}

std::vector<TpTree> build_tp_trees(const ContentPlan& plan,
                                   std::size_t max_trees, std::uint64_t seed) {
  max_trees = std::max<std::size_t>(max_trees, 1);
  std::vector<TpTree> out;
  std::set<std::string> seen;
  const std::size_t attempts = std::max<std::size_t>(10 * max_trees, 100);
  for (std::size_t i = 0; i < attempts && out.size() < max_trees; ++i) {
    Rng rng(mix_seed(seed, i));
    TpTree tree = plan.strategy == Strategy::kRecommend
                      ? sample_recommend(plan, rng)
                      : sample_compare(plan, rng);
    if (seen.insert(to_string(tree.root)).second) out.push_back(std::move(tree));
  }
  return out;
}

std::vector<const TpNode*> leaves(const TpTree& tree) {
  std::vector<const TpNode*> out;
  collect_leaves(tree.root, out);
  return out;
}

std::vector<int> leaf_order(const TpTree& tree) {
  std::vector<int> out;
  for (const auto* leaf : leaves(tree)) out.push_back(leaf->assertion_id);
  return out;
}

std::size_t entity_switch_count(const TpTree& tree) {
  std::size_t switches = 0;
  const std::string* prev = nullptr;
  for (const auto* leaf : leaves(tree)) {
    if (leaf->entity.empty()) continue;
    if (prev && *prev != leaf->entity) ++switches;
    prev = &leaf->entity;
  }
  return switches;
}

std::string to_string(const TpNode& node) {
  if (node.is_leaf()) {
    return node.speech_act + "#" + std::to_string(node.assertion_id);
  }
  std::string out = "(" + std::string(to_string(node.relation));
  if (node.nucleus != TpNode::kAllNuclei) {
    out += "/n" + std::to_string(node.nucleus);
  }
  for (const auto& c : node.children) out += " " + to_string(c);
  return out + ")";
}

}  // namespace sentplan
