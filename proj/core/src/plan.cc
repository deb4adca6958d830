#include "sentplan/plan.h"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sentplan {
namespace {

constexpr std::pair<Predicate, std::string_view> kPredicateNames[] = {
    {Predicate::kClaimBest, "claim-best"},
    {Predicate::kClaimExceptional, "claim-exceptional"},
    {Predicate::kCuisine, "cuisine"},
    {Predicate::kFoodQuality, "food-quality"},
    {Predicate::kService, "service"},
    {Predicate::kDecor, "decor"},
    {Predicate::kPrice, "price"},
    {Predicate::kNeighborhood, "neighborhood"},
};

constexpr std::pair<Quality, std::string_view> kQualityNames[] = {
    {Quality::kMediocre, "mediocre"}, {Quality::kDecent, "decent"},
    {Quality::kGood, "good"},         {Quality::kVeryGood, "very good"},
    {Quality::kExcellent, "excellent"},
};

constexpr std::pair<RelationKind, std::string_view> kRelationNames[] = {
    {RelationKind::kJustify, "justify"},
    {RelationKind::kContrast, "contrast"},
    {RelationKind::kElaboration, "elaboration"},
};

constexpr std::pair<Strategy, std::string_view> kStrategyNames[] = {
    {Strategy::kRecommend, "recommend"},
    {Strategy::kCompare2, "compare2"},
    {Strategy::kCompare3, "compare3"},
};

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N],
                         E e) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::pair<E, std::string_view> (&table)[N],
                          std::string_view s) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  return std::nullopt;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

// Cursor over one line of plan text, tracking columns for diagnostics.
class LineCursor {
 public:
  LineCursor(std::string_view line, int line_no)
      : line_(line), line_no_(line_no) {}

  int column() const { return static_cast<int>(pos_) + 1; }
  bool done() const { return pos_ >= line_.size(); }
  std::string_view rest() const { return line_.substr(pos_); }

  void skip_space() {
    while (!done() && (line_[pos_] == ' ' || line_[pos_] == '\t')) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (!done() && line_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept(std::string_view word) {
    skip_space();
    if (rest().substr(0, word.size()) == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  int integer() {
    skip_space();
    int value = 0;
    const char* begin = line_.data() + pos_;
    const char* end = line_.data() + line_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("expected integer");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  std::string_view word() {
    skip_space();
    std::size_t start = pos_;
    while (!done() && line_[pos_] != ' ' && line_[pos_] != '\t') ++pos_;
    if (start == pos_) fail("expected word");
    return line_.substr(start, pos_ - start);
  }

  void advance(std::size_t n) { pos_ = std::min(pos_ + n, line_.size()); }

  [[noreturn]] void fail(const std::string& what) const {
    throw PlanSyntaxError(line_no_, column(), what);
  }

 private:
  std::string_view line_;
  int line_no_;
  std::size_t pos_ = 0;
};

// Longest item name that prefixes the cursor's remaining text at a word
// boundary.
std::optional<std::string> match_item(LineCursor& cur,
                                      const std::vector<std::string>& items) {
  cur.skip_space();
  std::string_view rest = cur.rest();
  const std::string* best = nullptr;
  for (const auto& item : items) {
    if (rest.substr(0, item.size()) != item) continue;
    if (rest.size() > item.size()) {
      char next = rest[item.size()];
      if (next != ' ' && next != '\t' && next != ',' && next != ';') continue;
    }
    if (!best || item.size() > best->size()) best = &item;
  }
  if (!best) return std::nullopt;
  cur.advance(best->size());
  return *best;
}

AssertionValue parse_value(Predicate p, std::string_view text,
                           LineCursor& cur) {
  switch (p) {
    case Predicate::kClaimBest:
    case Predicate::kClaimExceptional:
      if (!text.empty()) cur.fail("claims take no value");
      return std::monostate{};
    case Predicate::kFoodQuality:
    case Predicate::kService:
    case Predicate::kDecor: {
      auto q = parse_quality(text);
      if (!q) cur.fail("expected quality scalar, got '" + std::string(text) + "'");
      return *q;
    }
    case Predicate::kPrice: {
      std::string_view t = text;
      if (!t.empty() && t.front() == '$') t.remove_prefix(1);
      if (t.ends_with(" dollars")) t.remove_suffix(8);
      int dollars = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), dollars);
      if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        cur.fail("expected price in whole dollars");
      }
      return dollars;
    }
    case Predicate::kCuisine:
    case Predicate::kNeighborhood:
      if (text.empty()) cur.fail("expected label value");
      return std::string(text);
  }
  return std::monostate{};
}

void parse_id_list(LineCursor& cur, std::vector<int>& out) {
  out.push_back(cur.integer());
  while (cur.accept(',')) {
    cur.skip_space();
    // "nuc:1, sat:2" uses the comma as the field separator, and
    // "nuc:2,nuc:3" repeats the field name.
    if (cur.rest().starts_with("sat:")) return;
    cur.accept("nuc:");
    out.push_back(cur.integer());
  }
}

RhetoricalRelation parse_relation(LineCursor& cur) {
  RhetoricalRelation rel;
  cur.skip_space();
  std::string_view rest = cur.rest();
  std::size_t paren = rest.find('(');
  if (paren == std::string_view::npos) cur.fail("expected '('");
  auto kind = parse_relation_kind(trim(rest.substr(0, paren)));
  if (!kind) cur.fail("unknown relation kind");
  rel.kind = *kind;
  cur.advance(paren + 1);
  if (!cur.accept("nuc:")) cur.fail("expected 'nuc:'");
  parse_id_list(cur, rel.nuclei);
  cur.accept(';');
  if (cur.accept("sat:")) parse_id_list(cur, rel.satellites);
  cur.expect(')');
  cur.skip_space();
  if (!cur.done()) cur.fail("trailing text after relation");
  return rel;
}

Assertion parse_assertion(LineCursor& cur,
                          const std::vector<std::string>& items) {
  Assertion a;
  a.id = cur.integer();
  std::string_view pred_word = cur.word();
  auto pred = parse_predicate(pred_word);
  if (!pred) cur.fail("unknown predicate '" + std::string(pred_word) + "'");
  a.predicate = *pred;
  if (a.predicate == Predicate::kClaimExceptional) {
    do {
      auto name = match_item(cur, items);
      if (!name) cur.fail("expected restaurant name from items");
      a.entities.push_back(*name);
    } while (cur.accept(',') || cur.accept(';'));
  } else {
    auto name = match_item(cur, items);
    if (!name) cur.fail("expected restaurant name from items");
    a.entities.push_back(*name);
  }
  cur.skip_space();
  a.value = parse_value(a.predicate, trim(cur.rest()), cur);
  return a;
}

void check_dangling(const ContentPlan& plan) {
  for (const auto& rel : plan.relations) {
    for (const auto* ids : {&rel.nuclei, &rel.satellites}) {
      for (int id : *ids) {
        if (!plan.find(id)) {
          throw DanglingIdError(
              id, "relation " + std::string(to_string(rel.kind)) +
                      " references missing assertion " + std::to_string(id));
        }
      }
    }
  }
}

ContentPlan finish(ContentPlan plan) {
  check_dangling(plan);
  auto violations = validate_plan(plan);
  if (!violations.empty()) throw PlanShapeError(std::move(violations));
  return plan;
}

void add(std::vector<Violation>& out, std::string code, std::string message,
         std::vector<int> ids = {}) {
  out.push_back({std::move(code), std::move(message), std::move(ids)});
}

bool value_well_typed(const Assertion& a) {
  switch (a.predicate) {
    case Predicate::kClaimBest:
    case Predicate::kClaimExceptional:
      return std::holds_alternative<std::monostate>(a.value);
    case Predicate::kFoodQuality:
    case Predicate::kService:
    case Predicate::kDecor:
      return std::holds_alternative<Quality>(a.value);
    case Predicate::kPrice:
      return std::holds_alternative<int>(a.value) && std::get<int>(a.value) >= 0;
    case Predicate::kCuisine:
    case Predicate::kNeighborhood:
      return std::holds_alternative<std::string>(a.value) &&
             !std::get<std::string>(a.value).empty();
  }
  return false;
}

// Shared check for recommend/compare3: every non-claim assertion is the
// satellite of exactly one `kind` relation whose nucleus is the claim.
void check_satellites_of_claim(const ContentPlan& plan, RelationKind kind,
                               int claim_id, std::vector<Violation>& out) {
  std::map<int, int> sat_count;
  for (const auto& rel : plan.relations) {
    if (rel.kind != kind) continue;
    if (rel.nuclei.size() == 1 && rel.nuclei.front() != claim_id) {
      add(out, std::string(to_string(kind)) + "-nucleus",
          "nucleus must be the claim", rel.nuclei);
    }
    for (int s : rel.satellites) ++sat_count[s];
  }
  for (const auto& a : plan.assertions) {
    if (is_claim(a.predicate)) continue;
    int n = sat_count[a.id];
    if (n != 1) {
      add(out, "unlinked-satellite",
          "assertion must be the satellite of exactly one " +
              std::string(to_string(kind)) + " relation (found " +
              std::to_string(n) + ")",
          {a.id});
    }
  }
}

void check_contrast_pairs(const ContentPlan& plan,
                          std::vector<Violation>& out) {
  for (const auto& rel : plan.relations) {
    if (rel.kind != RelationKind::kContrast || rel.nuclei.size() != 2) continue;
    const Assertion* a = plan.find(rel.nuclei[0]);
    const Assertion* b = plan.find(rel.nuclei[1]);
    if (!a || !b) continue;
    if (is_claim(a->predicate) || is_claim(b->predicate) ||
        a->predicate != b->predicate || a->entities == b->entities) {
      add(out, "contrast-pairing",
          "contrast must pair same-attribute assertions across entities",
          rel.nuclei);
    }
  }
}

}  // namespace

std::string_view to_string(Predicate p) { return name_of(kPredicateNames, p); }
std::string_view to_string(Quality q) { return name_of(kQualityNames, q); }
std::string_view to_string(RelationKind k) {
  return name_of(kRelationNames, k);
}
std::string_view to_string(Strategy s) { return name_of(kStrategyNames, s); }

std::optional<Predicate> parse_predicate(std::string_view s) {
  return value_of(kPredicateNames, s);
}
std::optional<Quality> parse_quality(std::string_view s) {
  return value_of(kQualityNames, s);
}
std::optional<RelationKind> parse_relation_kind(std::string_view s) {
  return value_of(kRelationNames, s);
}
std::optional<Strategy> parse_strategy(std::string_view s) {
  return value_of(kStrategyNames, s);
}

bool is_claim(Predicate p) {
  return p == Predicate::kClaimBest || p == Predicate::kClaimExceptional;
}

bool takes_quality(Predicate p) {
  return p == Predicate::kFoodQuality || p == Predicate::kService ||
         p == Predicate::kDecor;
}

const Assertion* ContentPlan::find(int id) const {
  for (const auto& a : assertions) {
    if (a.id == id) return &a;
  }
  return nullptr;
}

PlanSyntaxError::PlanSyntaxError(int line, int column, const std::string& what)
    : PlanError("line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

PlanShapeError::PlanShapeError(std::vector<Violation> violations)
    : PlanError([&] {
        std::string msg = "plan violates invariants:";
        for (const auto& v : violations) msg += " [" + v.code + "] " + v.message;
        return msg;
      }()),
      violations_(std::move(violations)) {}

ContentPlan parse_plan(std::string_view text, std::string plan_id) {
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw PlanSyntaxError(1, static_cast<int>(e.byte), e.what());
    }
    ContentPlan plan = plan_from_json(j);
    if (plan.plan_id.empty()) plan.plan_id = std::move(plan_id);
    return finish(std::move(plan));
  }

  ContentPlan plan;
  plan.plan_id = std::move(plan_id);
  int line_no = 0;
  int header = 0;  // number of header lines consumed (strategy, items)
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (trim(line).empty() || trim(line).front() == '#') continue;

    LineCursor cur(line, line_no);
    if (header == 0) {
      if (!cur.accept("strategy:")) cur.fail("expected 'strategy:'");
      auto s = parse_strategy(trim(cur.rest()));
      if (!s) cur.fail("unknown strategy '" + std::string(trim(cur.rest())) + "'");
      plan.strategy = *s;
      ++header;
    } else if (header == 1) {
      if (!cur.accept("items:")) cur.fail("expected 'items:'");
      std::string_view rest = cur.rest();
      std::size_t start = 0;
      while (start <= rest.size()) {
        std::size_t semi = rest.find(';', start);
        auto name = trim(rest.substr(start, semi == std::string_view::npos
                                                ? std::string_view::npos
                                                : semi - start));
        if (name.empty()) {
          throw PlanSyntaxError(line_no, cur.column() + static_cast<int>(start),
                                "empty item name");
        }
        plan.items.emplace_back(name);
        if (semi == std::string_view::npos) break;
        start = semi + 1;
      }
      ++header;
    } else if (cur.accept("relation:")) {
      plan.relations.push_back(parse_relation(cur));
    } else if (cur.accept("assert:")) {
      plan.assertions.push_back(parse_assertion(cur, plan.items));
    } else {
      cur.fail("expected 'relation:' or 'assert:'");
    }
  }
  if (header < 2) {
    throw PlanSyntaxError(line_no, 1, "missing strategy/items header");
  }
  return finish(std::move(plan));
}

std::vector<Violation> validate_plan(const ContentPlan& plan) {
  std::vector<Violation> out;

  std::set<int> seen;
  for (const auto& a : plan.assertions) {
    if (!seen.insert(a.id).second) {
      add(out, "duplicate-id", "assertion id is not unique", {a.id});
    }
    if (a.id <= 0) add(out, "invalid-id", "ids must be positive", {a.id});
    if (!value_well_typed(a)) {
      add(out, "value-type",
          "value does not match predicate " + std::string(to_string(a.predicate)),
          {a.id});
    }
    if (a.predicate == Predicate::kClaimExceptional) {
      if (a.entities.size() < 2) {
        add(out, "claim-exceptional-arity",
            "claim-exceptional needs at least two entities", {a.id});
      }
    } else if (a.entities.size() != 1) {
      add(out, "entity-arity", "assertion needs exactly one entity", {a.id});
    }
    for (const auto& e : a.entities) {
      if (std::find(plan.items.begin(), plan.items.end(), e) ==
          plan.items.end()) {
        add(out, "unknown-entity", "entity '" + e + "' is not in items",
            {a.id});
      }
    }
  }

  for (const auto& rel : plan.relations) {
    std::vector<int> ids = rel.nuclei;
    ids.insert(ids.end(), rel.satellites.begin(), rel.satellites.end());
    switch (rel.kind) {
      case RelationKind::kJustify:
      case RelationKind::kElaboration:
        if (rel.nuclei.size() != 1 || rel.satellites.size() != 1) {
          add(out, std::string(to_string(rel.kind)) + "-arity",
              "needs exactly one nucleus and one satellite", ids);
        }
        break;
      case RelationKind::kContrast:
        if (rel.nuclei.size() != 2 || !rel.satellites.empty()) {
          add(out, "contrast-arity",
              "contrast needs exactly two nuclei and no satellites", ids);
        }
        break;
    }
    for (int id : ids) {
      if (!plan.find(id)) {
        add(out, "dangling-id", "relation references a missing assertion",
            {id});
      }
    }
  }

  std::vector<int> best, exceptional;
  for (const auto& a : plan.assertions) {
    if (a.predicate == Predicate::kClaimBest) best.push_back(a.id);
    if (a.predicate == Predicate::kClaimExceptional) exceptional.push_back(a.id);
  }
  auto relation_allowed = [&](std::initializer_list<RelationKind> kinds) {
    for (const auto& rel : plan.relations) {
      if (std::find(kinds.begin(), kinds.end(), rel.kind) == kinds.end()) {
        add(out, "strategy-relation",
            std::string(to_string(rel.kind)) + " is not used by " +
                std::string(to_string(plan.strategy)),
            rel.nuclei);
      }
    }
  };

  switch (plan.strategy) {
    case Strategy::kRecommend: {
      relation_allowed({RelationKind::kJustify});
      if (!exceptional.empty()) {
        add(out, "strategy-predicate",
            "recommend plans cannot hold claim-exceptional", exceptional);
      }
      if (best.empty()) {
        add(out, "missing-claim", "recommend needs one claim-best");
      } else if (best.size() > 1) {
        add(out, "duplicate-claim", "recommend has more than one claim-best",
            best);
      } else {
        check_satellites_of_claim(plan, RelationKind::kJustify, best.front(),
                                  out);
        const auto& subject = plan.find(best.front())->entities;
        for (const auto& a : plan.assertions) {
          if (!subject.empty() && a.entities != subject) {
            add(out, "entity-mismatch",
                "recommend assertions must concern the recommended entity",
                {a.id});
          }
        }
      }
      break;
    }
    case Strategy::kCompare2: {
      relation_allowed({RelationKind::kContrast});
      std::vector<int> claims = best;
      claims.insert(claims.end(), exceptional.begin(), exceptional.end());
      if (!claims.empty()) {
        add(out, "strategy-predicate", "compare2 plans hold no claim", claims);
      }
      std::set<std::string> entities;
      std::map<int, int> in_contrast;
      for (const auto& rel : plan.relations) {
        if (rel.kind != RelationKind::kContrast) continue;
        for (int id : rel.nuclei) ++in_contrast[id];
      }
      for (const auto& a : plan.assertions) {
        for (const auto& e : a.entities) entities.insert(e);
        if (!is_claim(a.predicate) && in_contrast[a.id] != 1) {
          add(out, "unpaired-assertion",
              "compare2 assertions belong to exactly one contrast", {a.id});
        }
      }
      if (entities.size() != 2) {
        add(out, "compare2-entities", "compare2 concerns exactly two entities");
      }
      check_contrast_pairs(plan, out);
      break;
    }
    case Strategy::kCompare3: {
      relation_allowed({RelationKind::kElaboration, RelationKind::kContrast});
      if (!best.empty()) {
        add(out, "strategy-predicate", "compare3 plans cannot hold claim-best",
            best);
      }
      if (exceptional.empty()) {
        add(out, "missing-claim", "compare3 needs one claim-exceptional");
      } else if (exceptional.size() > 1) {
        add(out, "duplicate-claim",
            "compare3 has more than one claim-exceptional", exceptional);
      } else {
        check_satellites_of_claim(plan, RelationKind::kElaboration,
                                  exceptional.front(), out);
        const auto& compared = plan.find(exceptional.front())->entities;
        for (const auto& a : plan.assertions) {
          if (is_claim(a.predicate) || a.entities.size() != 1) continue;
          if (std::find(compared.begin(), compared.end(), a.entity()) ==
              compared.end()) {
            add(out, "entity-mismatch",
                "attribute entity is not among the compared entities",
                {a.id});
          }
        }
      }
      check_contrast_pairs(plan, out);
      // An attribute stated for several entities is contrasted.
      std::map<Predicate, int> per_attribute;
      std::set<int> contrasted;
      for (const auto& a : plan.assertions) {
        if (!is_claim(a.predicate)) ++per_attribute[a.predicate];
      }
      for (const auto& rel : plan.relations) {
        if (rel.kind == RelationKind::kContrast) {
          contrasted.insert(rel.nuclei.begin(), rel.nuclei.end());
        }
      }
      for (const auto& a : plan.assertions) {
        if (!is_claim(a.predicate) && per_attribute[a.predicate] > 1 &&
            !contrasted.count(a.id)) {
          add(out, "uncontrasted-assertion",
              "shared attribute is not in any contrast relation", {a.id});
        }
      }
      break;
    }
  }
  return out;
}

std::string serialize_plan(const ContentPlan& plan) {
  std::ostringstream os;
  os << "strategy: " << to_string(plan.strategy) << '\n';
  os << "items: ";
  for (std::size_t i = 0; i < plan.items.size(); ++i) {
    if (i) os << "; ";
    os << plan.items[i];
  }
  os << '\n';
  for (const auto& rel : plan.relations) {
    os << "relation: " << to_string(rel.kind) << "(nuc:" << join_ids(rel.nuclei);
    if (!rel.satellites.empty()) os << "; sat:" << join_ids(rel.satellites);
    os << ")\n";
  }
  for (const auto& a : plan.assertions) {
    os << "assert: " << a.id << ' ' << to_string(a.predicate) << ' ';
    for (std::size_t i = 0; i < a.entities.size(); ++i) {
      if (i) os << ", ";
      os << a.entities[i];
    }
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Quality>) {
            os << ' ' << to_string(v);
          } else if constexpr (std::is_same_v<T, int>) {
            os << ' ' << v;
          } else if constexpr (std::is_same_v<T, std::string>) {
            os << ' ' << v;
          }
        },
        a.value);
    os << '\n';
  }
  return os.str();
}

nlohmann::json plan_to_json(const ContentPlan& plan) {
  nlohmann::json j;
  j["plan-id"] = plan.plan_id;
  j["strategy"] = std::string(to_string(plan.strategy));
  j["items"] = plan.items;
  j["relations"] = nlohmann::json::array();
  for (const auto& rel : plan.relations) {
    j["relations"].push_back({{"kind", std::string(to_string(rel.kind))},
                              {"nuclei", rel.nuclei},
                              {"satellites", rel.satellites}});
  }
  j["assertions"] = nlohmann::json::array();
  for (const auto& a : plan.assertions) {
    nlohmann::json ja = {{"id", a.id},
                         {"predicate", std::string(to_string(a.predicate))},
                         {"entities", a.entities}};
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Quality>) {
            ja["value"] = std::string(to_string(v));
          } else if constexpr (!std::is_same_v<T, std::monostate>) {
            ja["value"] = v;
          }
        },
        a.value);
    j["assertions"].push_back(std::move(ja));
  }
  return j;
}

ContentPlan plan_from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> PlanSyntaxError {
    return PlanSyntaxError(1, 1, what);
  };
  try {
    ContentPlan plan;
    plan.plan_id = j.value("plan-id", std::string());
    auto strategy = parse_strategy(j.at("strategy").get<std::string>());
    if (!strategy) throw fail("unknown strategy");
    plan.strategy = *strategy;
    plan.items = j.at("items").get<std::vector<std::string>>();
    for (const auto& jr : j.at("relations")) {
      RhetoricalRelation rel;
      auto kind = parse_relation_kind(jr.at("kind").get<std::string>());
      if (!kind) throw fail("unknown relation kind");
      rel.kind = *kind;
      rel.nuclei = jr.at("nuclei").get<std::vector<int>>();
      rel.satellites = jr.value("satellites", std::vector<int>{});
      plan.relations.push_back(std::move(rel));
    }
    for (const auto& ja : j.at("assertions")) {
      Assertion a;
      a.id = ja.at("id").get<int>();
      auto pred = parse_predicate(ja.at("predicate").get<std::string>());
      if (!pred) throw fail("unknown predicate");
      a.predicate = *pred;
      a.entities = ja.at("entities").get<std::vector<std::string>>();
      if (ja.contains("value")) {
        const auto& v = ja.at("value");
        if (takes_quality(a.predicate)) {
          auto q = parse_quality(v.get<std::string>());
          if (!q) throw fail("unknown quality scalar");
          a.value = *q;
        } else if (a.predicate == Predicate::kPrice) {
          a.value = v.get<int>();
        } else {
          a.value = v.get<std::string>();
        }
      }
      plan.assertions.push_back(std::move(a));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
}

}  // namespace sentplan
