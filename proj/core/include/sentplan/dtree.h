#pragma once

// Deep-syntactic dependency trees. Lexemes carry grammatical features;
// children hang off their head by dependency relation (I = subject,
// II = object, ATTR = modifier). Clause-combining adds COORD and PERIOD
// joins.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sentplan {

enum class WordClass {
  kVerb,
  kCommonNoun,
  kProperNoun,
  kAdjective,
  kCoordConj,
  kPreposition,
};

enum class DepRel { kRoot, kI, kII, kAttr, kCoord, kPeriod };

std::string_view to_string(WordClass c);
std::string_view to_string(DepRel r);
std::optional<WordClass> parse_word_class(std::string_view s);
std::optional<DepRel> parse_dep_rel(std::string_view s);

// Lexemes for join nodes built by clause combining.
inline constexpr std::string_view kPeriodLexeme = "PERIOD";

struct DNode {
  std::string lexeme;  // "$NAME" marks an uninstantiated slot
  WordClass word_class = WordClass::kVerb;
  DepRel relation = DepRel::kRoot;
  std::map<std::string, std::string> features;
  std::vector<DNode> children;
  std::vector<int> sources;  // assertion ids realized by this clause

  bool is_slot() const { return !lexeme.empty() && lexeme.front() == '$'; }
  bool is_period() const { return lexeme == kPeriodLexeme; }
  // A single clause: finite verb at the head.
  bool is_clause() const { return word_class == WordClass::kVerb; }

  // Empty string when absent.
  const std::string& feature(const std::string& key) const;
  bool has(const std::string& key, std::string_view value) const {
    return feature(key) == value;
  }

  const DNode* child(DepRel rel) const;
  DNode* child(DepRel rel);

  bool operator==(const DNode&) const = default;
};

// One-line bracketed form, e.g.
//   BE3[class:verb](I Chanpen Thai[class:proper_noun,number:sg] II ...)
std::string to_string(const DNode& node);

std::size_t count_nodes(const DNode& node, std::string_view lexeme);

// Violations of the structural invariants (finite verbs have one subject,
// PERIOD children only under binary period joins, no slots left).
std::vector<std::string> check_dtree(const DNode& node);

// Assertion ids under `node` in linear (left-to-right) order.
std::vector<int> collect_sources(const DNode& node);

}  // namespace sentplan
