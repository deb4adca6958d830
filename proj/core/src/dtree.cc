#include "sentplan/dtree.h"

#include <algorithm>

namespace sentplan {
namespace {

constexpr std::pair<WordClass, std::string_view> kClassNames[] = {
    {WordClass::kVerb, "verb"},
    {WordClass::kCommonNoun, "common_noun"},
    {WordClass::kProperNoun, "proper_noun"},
    {WordClass::kAdjective, "adjective"},
    {WordClass::kCoordConj, "coordconj"},
    {WordClass::kPreposition, "preposition"},
};

constexpr std::pair<DepRel, std::string_view> kRelNames[] = {
    {DepRel::kRoot, "ROOT"}, {DepRel::kI, "I"},
    {DepRel::kII, "II"},     {DepRel::kAttr, "ATTR"},
    {DepRel::kCoord, "COORD"}, {DepRel::kPeriod, "PERIOD"},
};

void print(const DNode& n, std::string& out) {
  out += n.lexeme;
  out += "[class:";
  out += to_string(n.word_class);
  for (const auto& [k, v] : n.features) {
    out += ',';
    out += k;
    out += ':';
    out += v;
  }
  out += ']';
  if (n.children.empty()) return;
  out += '(';
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i) out += ' ';
    out += to_string(n.children[i].relation);
    out += ' ';
    print(n.children[i], out);
  }
  out += ')';
}

void check(const DNode& n, bool under_period_join, std::vector<std::string>& out) {
  if (n.is_slot()) out.push_back("uninstantiated slot " + n.lexeme);
  if (n.relation == DepRel::kPeriod && !under_period_join) {
    out.push_back("PERIOD child outside a period join: " + n.lexeme);
  }
  if (n.is_period()) {
    if (n.children.size() != 2) out.push_back("period join is not binary");
    for (const auto& c : n.children) {
      if (c.relation != DepRel::kPeriod) {
        out.push_back("period join child with relation " +
                      std::string(to_string(c.relation)));
      }
    }
  }
  if (n.is_clause()) {
    const auto subjects = std::count_if(
        n.children.begin(), n.children.end(),
        [](const DNode& c) { return c.relation == DepRel::kI; });
    if (subjects != 1) {
      out.push_back("verb " + n.lexeme + " has " + std::to_string(subjects) +
                    " subjects");
    }
  }
  for (const auto& c : n.children) check(c, n.is_period(), out);
}

void sources_of(const DNode& n, std::vector<int>& out) {
  out.insert(out.end(), n.sources.begin(), n.sources.end());
  for (const auto& c : n.children) sources_of(c, out);
}

}  // namespace

std::string_view to_string(WordClass c) {
  for (const auto& [k, name] : kClassNames) {
    if (k == c) return name;
  }
  return "?";
}

std::string_view to_string(DepRel r) {
  for (const auto& [k, name] : kRelNames) {
    if (k == r) return name;
  }
  return "?";
}

std::optional<WordClass> parse_word_class(std::string_view s) {
  for (const auto& [k, name] : kClassNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

std::optional<DepRel> parse_dep_rel(std::string_view s) {
  for (const auto& [k, name] : kRelNames) {
    if (name == s) return k;
  }
  return std::nullopt;
}

const std::string& DNode::feature(const std::string& key) const {
  static const std::string kEmpty;
  auto it = features.find(key);
  return it == features.end() ? kEmpty : it->second;
}

const DNode* DNode::child(DepRel rel) const {
  for (const auto& c : children) {
    if (c.relation == rel) return &c;
  }
  return nullptr;
}

DNode* DNode::child(DepRel rel) {
  for (auto& c : children) {
    if (c.relation == rel) return &c;
  }
  return nullptr;
}

std::string to_string(const DNode& node) {
  std::string out;
  print(node, out);
  return out;
}

std::size_t count_nodes(const DNode& node, std::string_view lexeme) {
  std::size_t n = node.lexeme == lexeme ? 1 : 0;
  for (const auto& c : node.children) n += count_nodes(c, lexeme);
  return n;
}

std::vector<std::string> check_dtree(const DNode& node) {
  std::vector<std::string> out;
  check(node, false, out);
  return out;
}

std::vector<int> collect_sources(const DNode& node) {
  std::vector<int> out;
  sources_of(node, out);
  return out;
}

}  // namespace sentplan
