#include "sentplan/sentence_plan.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace sentplan {
namespace {

constexpr OpChoice conj(CueWord c) { return {Operation::kCwConjunction, c, Order::kNS}; }
constexpr OpChoice insert(CueWord c) { return {Operation::kCwInsertion, c, Order::kNS}; }
constexpr OpChoice op(Operation o) { return {o, std::nullopt, Order::kNS}; }

// Relation/operator table. Infer also admits WITH-REDUCTION and
// RELATIVE-CLAUSE, which the operation catalogue lists for it.
std::vector<OpChoice> table_row(DiscourseRelation rel) {
  switch (rel) {
    case DiscourseRelation::kJustify:
      return {op(Operation::kWithReduction), op(Operation::kRelativeClause),
              conj(CueWord::kBecause), conj(CueWord::kSince),
              op(Operation::kPeriod)};
    case DiscourseRelation::kContrast:
      return {op(Operation::kMerge),        insert(CueWord::kHowever),
              conj(CueWord::kWhile),        conj(CueWord::kAnd),
              conj(CueWord::kBut),          insert(CueWord::kOnTheOtherHand),
              op(Operation::kPeriod)};
    case DiscourseRelation::kInfer:
      return {op(Operation::kMerge), op(Operation::kWithReduction),
              op(Operation::kRelativeClause), conj(CueWord::kAnd),
              op(Operation::kPeriod)};
    case DiscourseRelation::kElaboration:
      return {op(Operation::kPeriod)};
  }
  return {};
}

std::string upper(std::string_view s) {
  std::string out;
  for (char c : s) {
    out += c == ' ' ? '-' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

// Structural equality that ignores referring-expression marks and sources.
bool same_node(const DNode& a, const DNode& b) {
  if (a.lexeme != b.lexeme || a.word_class != b.word_class ||
      a.relation != b.relation || a.children.size() != b.children.size()) {
    return false;
  }
  auto fa = a.features;
  auto fb = b.features;
  fa.erase("pro");
  fb.erase("pro");
  if (fa != fb) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!same_node(a.children[i], b.children[i])) return false;
  }
  return true;
}

const DNode* subject(const DNode& clause) { return clause.child(DepRel::kI); }

// Name of a single proper-noun subject, or null.
const std::string* subject_name(const DNode& clause) {
  const DNode* s = subject(clause);
  if (!s || s->word_class != WordClass::kProperNoun) return nullptr;
  return &s->lexeme;
}

bool has_relative(const DNode& clause) {
  const DNode* s = subject(clause);
  if (!s) return false;
  return std::any_of(s->children.begin(), s->children.end(), [](const DNode& c) {
    return c.has("clause", "relative");
  });
}

bool has_clause_adjunct(const DNode& clause) {
  return std::any_of(clause.children.begin(), clause.children.end(),
                     [](const DNode& c) { return c.has("clause", "with"); });
}

bool same_subject(const DNode& a, const DNode& b) {
  const std::string* x = subject_name(a);
  const std::string* y = subject_name(b);
  return x && y && *x == *y;
}

bool reducible_to_with(const DNode& c) {
  return c.lexeme == "HAVE1" && !has_clause_adjunct(c) && !has_relative(c);
}

// Index of the single differing I/II argument, or -1.
int merge_position(const DNode& a, const DNode& b) {
  if (!a.is_clause() || !b.is_clause()) return -1;
  if (a.lexeme != b.lexeme || a.children.size() != b.children.size()) return -1;
  auto fa = a.features;
  auto fb = b.features;
  if (fa != fb) return -1;
  int diff = -1;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (a.children[i].relation != b.children[i].relation) return -1;
    if (same_node(a.children[i], b.children[i])) continue;
    if (diff != -1) return -1;
    diff = static_cast<int>(i);
  }
  if (diff == -1) return -1;
  const DepRel rel = a.children[diff].relation;
  return rel == DepRel::kI || rel == DepRel::kII ? diff : -1;
}

// Which side (0 = left, 1 = right) WITH-REDUCTION reduces, or -1.
int with_target(DiscourseRelation rel, const DNode& left, const DNode& right,
                Order order) {
  if (!left.is_clause() || !right.is_clause() || !same_subject(left, right)) {
    return -1;
  }
  if (rel == DiscourseRelation::kJustify) {
    const int sat = order == Order::kNS ? 1 : 0;
    return reducible_to_with(sat ? right : left) ? sat : -1;
  }
  if (reducible_to_with(right)) return 1;
  if (reducible_to_with(left)) return 0;
  return -1;
}

// Which side becomes the relative clause, or -1.
int relative_target(DiscourseRelation rel, const DNode& left,
                    const DNode& right, Order order) {
  if (!left.is_clause() || !right.is_clause() || !same_subject(left, right) ||
      has_relative(left) || has_relative(right)) {
    return -1;
  }
  if (rel == DiscourseRelation::kJustify) return order == Order::kNS ? 1 : 0;
  return 0;
}

bool is_phrase_coordination(const DNode& n) {
  return n.word_class == WordClass::kCoordConj && n.lexeme == "and" &&
         !n.has("join", "clause");
}

DNode coordinate(const DNode& a, const DNode& b) {
  DNode coord;
  coord.lexeme = "and";
  coord.word_class = WordClass::kCoordConj;
  coord.relation = a.relation;
  coord.features = {{"number", "pl"}, {"person", "3rd"}};
  for (const DNode* side : {&a, &b}) {
    if (is_phrase_coordination(*side)) {
      for (const auto& c : side->children) coord.children.push_back(c);
    } else {
      DNode item = *side;
      item.relation = DepRel::kCoord;
      coord.children.push_back(std::move(item));
    }
  }
  return coord;
}

DNode join_node(std::string lexeme, DepRel child_rel, DNode left, DNode right) {
  DNode j;
  j.lexeme = std::move(lexeme);
  j.word_class = WordClass::kCoordConj;
  left.relation = child_rel;
  right.relation = child_rel;
  j.children.push_back(std::move(left));
  j.children.push_back(std::move(right));
  return j;
}

void check_sp(const SpNode& n, std::vector<std::string>& out) {
  if (n.is_leaf()) return;
  if (n.children.size() != 2) {
    out.push_back(n.label() + ": " + std::to_string(n.children.size()) +
                  " children");
  }
  const bool wants_cue = n.operation == Operation::kCwConjunction ||
                         n.operation == Operation::kCwInsertion;
  if (wants_cue != n.cue.has_value()) out.push_back(n.label() + ": cue mismatch");
  if (!relation_permits(n.relation, n.operation, n.cue)) {
    out.push_back(n.label() + ": not permitted for " +
                  std::string(to_string(n.relation)));
  }
  for (const auto& c : n.children) check_sp(c, out);
}

void frontier_of(const SpNode& n, std::vector<const SpNode*>& out) {
  if (n.is_leaf()) {
    out.push_back(&n);
    return;
  }
  for (const auto& c : n.children) frontier_of(c, out);
}

// Topic of a clause: its proper-name subject or the possessor of its
// subject ("Chanpen Thai's price").
DNode* topic(DNode& clause) {
  DNode* s = clause.child(DepRel::kI);
  if (!s) return nullptr;
  if (s->word_class == WordClass::kProperNoun) return s;
  if (s->word_class == WordClass::kCommonNoun) {
    for (auto& c : s->children) {
      if (c.word_class == WordClass::kProperNoun && c.has("case", "gen")) return &c;
    }
  }
  return nullptr;
}

void pronominalize_clauses(DNode& n, std::string& prev) {
  if (!n.is_clause()) {
    for (auto& c : n.children) pronominalize_clauses(c, prev);
    return;
  }
  DNode* t = topic(n);
  if (!t) {
    prev.clear();
    return;
  }
  if (t->lexeme == prev && !has_relative(n)) t->features["pro"] = "yes";
  prev = t->lexeme;
}

PlanFragment leaf_fragment(const ContentPlan& plan,
                           const GenerationDictionary& dict, const TpNode& n) {
  PlanFragment f;
  f.sp.assertion_id = n.assertion_id;
  f.sp.speech_act = n.speech_act;
  f.d = lookup_and_instantiate(dict, *plan.find(n.assertion_id));
  return f;
}

PlanFragment build(const ContentPlan& plan, const GenerationDictionary& dict,
                   const TpNode& node, const GeneratorOptions& options,
                   Rng& rng) {
  if (node.is_leaf()) return leaf_fragment(plan, dict, node);
  std::vector<PlanFragment> items;
  std::vector<bool> nucleus;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    items.push_back(build(plan, dict, node.children[i], options, rng));
    nucleus.push_back(node.nucleus == static_cast<int>(i));
  }
  while (items.size() > 1) {
    const std::size_t i = uniform_index(rng, items.size() - 1);
    const Order order = node.relation == DiscourseRelation::kJustify &&
                                nucleus[i + 1] && !nucleus[i]
                            ? Order::kSN
                            : Order::kNS;
    const auto legal = legal_ops(node.relation, items[i].d, items[i + 1].d, order);
    const OpChoice choice = choose_op(legal, options.distribution, rng);
    if (options.observer) options.observer(node.relation, legal, choice);
    items[i] = apply_op(choice, std::move(items[i]), std::move(items[i + 1]),
                        node.relation);
    nucleus[i] = nucleus[i] || nucleus[i + 1];
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    nucleus.erase(nucleus.begin() + static_cast<std::ptrdiff_t>(i) + 1);
  }
  return std::move(items.front());
}

}  // namespace

std::string_view to_string(Operation op) {
  switch (op) {
    case Operation::kMerge: return "MERGE";
    case Operation::kWithReduction: return "WITH-REDUCTION";
    case Operation::kRelativeClause: return "RELATIVE-CLAUSE";
    case Operation::kCwConjunction: return "CW-CONJUNCTION";
    case Operation::kCwInsertion: return "CW-INSERTION";
    case Operation::kPeriod: return "PERIOD";
  }
  return "?";
}

std::string_view to_string(CueWord cue) {
  switch (cue) {
    case CueWord::kBecause: return "because";
    case CueWord::kSince: return "since";
    case CueWord::kWhile: return "while";
    case CueWord::kAnd: return "and";
    case CueWord::kBut: return "but";
    case CueWord::kHowever: return "however";
    case CueWord::kOnTheOtherHand: return "on the other hand";
  }
  return "?";
}

std::string_view to_string(Order order) { return order == Order::kNS ? "NS" : "SN"; }

std::string_view to_string(OpCategory c) {
  switch (c) {
    case OpCategory::kSyntactic: return "syntactic";
    case OpCategory::kConjunction: return "conjunction";
    case OpCategory::kInsertion: return "insertion";
    case OpCategory::kPeriod: return "period";
  }
  return "?";
}

OpCategory category(Operation op) {
  switch (op) {
    case Operation::kMerge:
    case Operation::kWithReduction:
    case Operation::kRelativeClause:
      return OpCategory::kSyntactic;
    case Operation::kCwConjunction: return OpCategory::kConjunction;
    case Operation::kCwInsertion: return OpCategory::kInsertion;
    case Operation::kPeriod: return OpCategory::kPeriod;
  }
  return OpCategory::kPeriod;
}

std::string SpNode::label() const {
  if (is_leaf()) return upper(speech_act);
  const std::string rel = upper(to_string(relation));
  const std::string ord(to_string(order));
  switch (operation) {
    case Operation::kMerge: return "MERGE-" + rel;
    case Operation::kWithReduction: return "WITH-" + ord + "-" + rel;
    case Operation::kRelativeClause: return "RELATIVE-CLAUSE-" + rel;
    case Operation::kCwConjunction:
      if (cue == CueWord::kAnd) return "CW-CONJUNCTION-" + rel;
      [[fallthrough]];
    case Operation::kCwInsertion:
      return "CW-" + upper(cue ? to_string(*cue) : "?") + "-" + ord + "-" + rel;
    case Operation::kPeriod: return "PERIOD-" + rel;
  }
  return "?";
}

std::string to_string(const SpNode& node) {
  if (node.is_leaf()) return node.label() + "#" + std::to_string(node.assertion_id);
  std::string out = "(" + node.label();
  for (const auto& c : node.children) out += " " + to_string(c);
  return out + ")";
}

std::vector<const SpNode*> frontier(const SpNode& root) {
  std::vector<const SpNode*> out;
  frontier_of(root, out);
  return out;
}

std::vector<std::string> check_sp_tree(const SpNode& root) {
  std::vector<std::string> out;
  check_sp(root, out);
  return out;
}

bool relation_permits(DiscourseRelation rel, Operation operation,
                      std::optional<CueWord> cue) {
  for (const auto& c : table_row(rel)) {
    if (c.operation == operation && c.cue == cue) return true;
  }
  return false;
}

std::vector<OpChoice> legal_ops(DiscourseRelation rel, const DNode& left,
                                const DNode& right, Order order) {
  if (rel != DiscourseRelation::kJustify) order = Order::kNS;
  std::vector<OpChoice> out;
  for (OpChoice c : table_row(rel)) {
    c.order = order;
    switch (c.operation) {
      case Operation::kMerge:
        if (merge_position(left, right) < 0) continue;
        break;
      case Operation::kWithReduction:
        if (with_target(rel, left, right, order) < 0) continue;
        break;
      case Operation::kRelativeClause:
        if (relative_target(rel, left, right, order) < 0) continue;
        break;
      default:
        break;
    }
    out.push_back(c);
  }
  return out;
}

PlanFragment apply_op(const OpChoice& choice, PlanFragment left,
                      PlanFragment right, DiscourseRelation rel) {
  const auto legal = legal_ops(rel, left.d, right.d, choice.order);
  if (std::find(legal.begin(), legal.end(), choice) == legal.end()) {
    throw IllegalOperationError(
        std::string(to_string(choice.operation)) + " is not legal for " +
        std::string(to_string(rel)) + " here");
  }

  PlanFragment out;
  out.sp.operation = choice.operation;
  out.sp.cue = choice.cue;
  out.sp.order = choice.order;
  out.sp.relation = rel;
  out.sp.children.push_back(std::move(left.sp));
  out.sp.children.push_back(std::move(right.sp));

  switch (choice.operation) {
    case Operation::kMerge: {
      const int pos = merge_position(left.d, right.d);
      out.d = std::move(left.d);
      out.d.children[pos] = coordinate(out.d.children[pos], right.d.children[pos]);
      out.d.sources.insert(out.d.sources.end(), right.d.sources.begin(),
                           right.d.sources.end());
      break;
    }
    case Operation::kWithReduction: {
      const int target = with_target(rel, left.d, right.d, choice.order);
      DNode reduced = std::move(target == 1 ? right.d : left.d);
      out.d = std::move(target == 1 ? left.d : right.d);
      reduced.relation = DepRel::kAttr;
      reduced.features["clause"] = "with";
      out.d.children.push_back(std::move(reduced));
      break;
    }
    case Operation::kRelativeClause: {
      const int target = relative_target(rel, left.d, right.d, choice.order);
      DNode relative = std::move(target == 1 ? right.d : left.d);
      out.d = std::move(target == 1 ? left.d : right.d);
      relative.relation = DepRel::kAttr;
      relative.features["clause"] = "relative";
      out.d.child(DepRel::kI)->children.push_back(std::move(relative));
      break;
    }
    case Operation::kCwConjunction: {
      out.d = join_node(std::string(to_string(*choice.cue)), DepRel::kCoord,
                        std::move(left.d), std::move(right.d));
      out.d.features["join"] = "clause";
      if (choice.order == Order::kSN &&
          (choice.cue == CueWord::kSince || choice.cue == CueWord::kBecause)) {
        out.d.features["lead"] = "yes";
      }
      break;
    }
    case Operation::kCwInsertion:
    case Operation::kPeriod: {
      out.d = join_node(std::string(kPeriodLexeme), DepRel::kPeriod,
                        std::move(left.d), std::move(right.d));
      if (choice.cue) out.d.features["cue"] = std::string(to_string(*choice.cue));
      break;
    }
  }
  out.d.relation = DepRel::kRoot;
  return out;
}

DNode pronominalize(DNode d) {
  std::string prev;
  pronominalize_clauses(d, prev);
  return d;
}

double OperatorDistribution::weight(OpCategory c) const {
  switch (c) {
    case OpCategory::kSyntactic: return syntactic;
    case OpCategory::kConjunction: return conjunction;
    case OpCategory::kInsertion: return insertion;
    case OpCategory::kPeriod: return period;
  }
  return 0;
}

OpChoice choose_op(std::span<const OpChoice> legal,
                   const OperatorDistribution& dist, Rng& rng) {
  if (legal.empty()) throw IllegalOperationError("no legal operation");
  std::array<std::vector<const OpChoice*>, kNumCategories> by_category;
  for (const auto& c : legal) {
    by_category[static_cast<std::size_t>(category(c.operation))].push_back(&c);
  }
  double total = 0;
  for (std::size_t k = 0; k < kNumCategories; ++k) {
    if (!by_category[k].empty()) total += dist.weight(static_cast<OpCategory>(k));
  }
  std::size_t picked = kNumCategories;
  if (total > 0) {
    double u = uniform_unit(rng) * total;
    for (std::size_t k = 0; k < kNumCategories; ++k) {
      if (by_category[k].empty()) continue;
      const double w = dist.weight(static_cast<OpCategory>(k));
      picked = k;
      if (u < w) break;
      u -= w;
    }
  } else {
    // All legal categories have zero weight; fall back to uniform.
    std::vector<std::size_t> present;
    for (std::size_t k = 0; k < kNumCategories; ++k) {
      if (!by_category[k].empty()) present.push_back(k);
    }
    picked = present[uniform_index(rng, present.size())];
  }
  const auto& members = by_category[picked];
  return *members[uniform_index(rng, members.size())];
}

SpgAlternative sample_alternative(const ContentPlan& plan,
                                  const GenerationDictionary& dict,
                                  const TpTree& tree, std::size_t tp_index,
                                  std::uint64_t seed,
                                  const GeneratorOptions& options) {
  Rng rng(seed);
  PlanFragment f = build(plan, dict, tree.root, options, rng);
  SpgAlternative alt;
  alt.plan_id = plan.plan_id;
  alt.tp_index = tp_index;
  alt.sp_tree = std::move(f.sp);
  alt.d_tree = pronominalize(std::move(f.d));
  alt.seed = seed;
  return alt;
}

std::vector<SpgAlternative> generate_alternatives(
    const ContentPlan& plan, const GenerationDictionary& dict,
    const GeneratorOptions& options) {
  for (const auto& a : plan.assertions) {
    if (!dict.covers(a.predicate)) throw MissingPredicateError(a.predicate);
  }
  const std::size_t max_alts = std::max<std::size_t>(options.max_alts, 1);
  const auto trees = build_tp_trees(plan, max_alts, options.seed);
  const std::uint64_t stream = mix_seed(options.seed, 0x5a7e);
  std::vector<SpgAlternative> out;
  std::set<std::string> seen;
  for (std::size_t attempt = 0;
       attempt < 10 * max_alts && out.size() < max_alts; ++attempt) {
    const std::uint64_t sub = mix_seed(stream, attempt);
    Rng pick(mix_seed(sub, 1));
    const std::size_t tp = uniform_index(pick, trees.size());
    SpgAlternative alt = sample_alternative(plan, dict, trees[tp], tp, sub, options);
    if (seen.insert(to_string(alt.sp_tree) + "\n" + to_string(alt.d_tree)).second) {
      out.push_back(std::move(alt));
    }
  }
  return out;
}

std::vector<SpgAlternative> generate_alternatives(
    const ContentPlan& plan, const GenerationDictionary& dict,
    std::size_t max_alts, std::uint64_t seed) {
  GeneratorOptions options;
  options.max_alts = max_alts;
  options.seed = seed;
  return generate_alternatives(plan, dict, options);
}

}  // namespace sentplan
