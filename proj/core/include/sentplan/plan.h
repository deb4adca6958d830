#pragma once

// Content plans: assertions to communicate plus the rhetorical relations that
// hold between them. Plans are inputs to the pipeline; nothing here selects
// content.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sentplan {

enum class Predicate {
  kClaimBest,
  kClaimExceptional,
  kCuisine,
  kFoodQuality,
  kService,
  kDecor,
  kPrice,
  kNeighborhood,
};

inline constexpr Predicate kAllPredicates[] = {
    Predicate::kClaimBest, Predicate::kClaimExceptional,
    Predicate::kCuisine,   Predicate::kFoodQuality,
    Predicate::kService,   Predicate::kDecor,
    Predicate::kPrice,     Predicate::kNeighborhood,
};

// Ordered five-point scale.
enum class Quality { kMediocre, kDecent, kGood, kVeryGood, kExcellent };

enum class RelationKind { kJustify, kContrast, kElaboration };

enum class Strategy { kRecommend, kCompare2, kCompare3 };

std::string_view to_string(Predicate p);
std::string_view to_string(Quality q);
std::string_view to_string(RelationKind k);
std::string_view to_string(Strategy s);

std::optional<Predicate> parse_predicate(std::string_view s);
std::optional<Quality> parse_quality(std::string_view s);
std::optional<RelationKind> parse_relation_kind(std::string_view s);
std::optional<Strategy> parse_strategy(std::string_view s);

bool is_claim(Predicate p);
bool takes_quality(Predicate p);

// Price is whole dollars; cuisine and neighborhood are labels.
using AssertionValue = std::variant<std::monostate, Quality, int, std::string>;

struct Assertion {
  int id = 0;
  Predicate predicate = Predicate::kClaimBest;
  std::vector<std::string> entities;
  AssertionValue value;

  // Single entity of a non-exceptional assertion.
  const std::string& entity() const { return entities.front(); }
  bool operator==(const Assertion&) const = default;
};

struct RhetoricalRelation {
  RelationKind kind = RelationKind::kJustify;
  std::vector<int> nuclei;
  std::vector<int> satellites;
  bool operator==(const RhetoricalRelation&) const = default;
};

struct ContentPlan {
  std::string plan_id;
  Strategy strategy = Strategy::kRecommend;
  std::vector<std::string> items;
  std::vector<Assertion> assertions;
  std::vector<RhetoricalRelation> relations;

  const Assertion* find(int id) const;
  bool operator==(const ContentPlan&) const = default;
};

struct Violation {
  std::string code;  // e.g. "contrast-arity", "duplicate-claim"
  std::string message;
  std::vector<int> ids;
};

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PlanSyntaxError : public PlanError {
 public:
  PlanSyntaxError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class DanglingIdError : public PlanError {
 public:
  DanglingIdError(int id, const std::string& what)
      : PlanError(what), id_(id) {}
  int id() const { return id_; }

 private:
  int id_;
};

class PlanShapeError : public PlanError {
 public:
  explicit PlanShapeError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

// Parses the line-oriented plan format, or the JSON object form when the text
// starts with '{'. The returned plan satisfies validate_plan().
ContentPlan parse_plan(std::string_view text, std::string plan_id = {});

std::vector<Violation> validate_plan(const ContentPlan& plan);

std::string serialize_plan(const ContentPlan& plan);

nlohmann::json plan_to_json(const ContentPlan& plan);
ContentPlan plan_from_json(const nlohmann::json& j);

}  // namespace sentplan
