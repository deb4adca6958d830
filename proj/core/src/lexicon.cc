#include "sentplan/lexicon.h"

#include <cctype>
#include <set>

namespace sentplan {

extern const char kRestaurantDictionary[];

namespace {

const std::set<std::string, std::less<>> kSlotNames = {
    "$ENTITY", "$CUISINE", "$SCALAR", "$PRICE", "$NBHD"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

struct NodeLine {
  int depth;
  DNode node;
};

NodeLine parse_node_line(std::string_view line, int line_no) {
  std::size_t indent = 0;
  while (indent < line.size() && line[indent] == ' ') ++indent;
  if (indent < 2 || indent % 2 != 0) {
    throw DictionaryParseError(line_no, static_cast<int>(indent) + 1,
                               "node indentation must be a positive even "
                               "number of spaces");
  }
  std::size_t pos = indent;
  auto col = [&] { return static_cast<int>(pos) + 1; };
  if (line[pos] != '(') throw DictionaryParseError(line_no, col(), "expected '('");
  const std::size_t close = line.find(')', pos);
  if (close == std::string_view::npos) {
    throw DictionaryParseError(line_no, col(), "unterminated relation");
  }
  DNode node;
  auto rel = parse_dep_rel(line.substr(pos + 1, close - pos - 1));
  if (!rel) throw DictionaryParseError(line_no, col() + 1, "unknown relation");
  node.relation = *rel;
  pos = close + 1;
  while (pos < line.size() && line[pos] == ' ') ++pos;
  const std::size_t bracket = line.find('[', pos);
  node.lexeme = std::string(trim(line.substr(pos, bracket == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : bracket - pos)));
  if (node.lexeme.empty()) throw DictionaryParseError(line_no, col(), "missing lexeme");
  if (node.is_slot() && !kSlotNames.count(node.lexeme)) {
    throw DictionaryParseError(line_no, col(), "unknown slot " + node.lexeme);
  }
  bool has_class = false;
  if (bracket != std::string_view::npos) {
    const std::size_t end = line.find(']', bracket);
    if (end == std::string_view::npos) {
      throw DictionaryParseError(line_no, static_cast<int>(bracket) + 1,
                                 "unterminated feature list");
    }
    std::string_view feats = line.substr(bracket + 1, end - bracket - 1);
    std::size_t at = bracket + 1;
    while (!feats.empty()) {
      const std::size_t sp = feats.find(' ');
      std::string_view kv = feats.substr(0, sp);
      if (!kv.empty()) {
        const std::size_t colon = kv.find(':');
        if (colon == std::string_view::npos || colon == 0 ||
            colon + 1 == kv.size()) {
          throw DictionaryParseError(line_no, static_cast<int>(at) + 1,
                                     "feature must be key:value");
        }
        std::string key(kv.substr(0, colon));
        std::string value(kv.substr(colon + 1));
        if (key == "class") {
          auto wc = parse_word_class(value);
          if (!wc) {
            throw DictionaryParseError(line_no, static_cast<int>(at) + 1,
                                       "unknown word class " + value);
          }
          node.word_class = *wc;
          has_class = true;
        } else {
          node.features[key] = value;
        }
      }
      if (sp == std::string_view::npos) break;
      feats.remove_prefix(sp + 1);
      at += sp + 1;
    }
    if (!trim(line.substr(end + 1)).empty()) {
      throw DictionaryParseError(line_no, static_cast<int>(end) + 2,
                                 "trailing text after feature list");
    }
  }
  if (!has_class) throw DictionaryParseError(line_no, col(), "missing class feature");
  return {static_cast<int>(indent / 2) - 1, std::move(node)};
}

// Builds a tree from (depth, node) lines; depth 0 is the root.
DNode assemble(std::vector<NodeLine>& lines, const std::vector<int>& line_nos) {
  std::vector<DNode*> stack;
  DNode root = std::move(lines.front().node);
  if (lines.front().depth != 0 || root.relation != DepRel::kRoot) {
    throw DictionaryParseError(line_nos.front(), 1, "entry must start with a (ROOT) node");
  }
  stack.push_back(&root);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int depth = lines[i].depth;
    if (depth == 0) throw DictionaryParseError(line_nos[i], 1, "second root in entry");
    if (depth > static_cast<int>(stack.size())) {
      throw DictionaryParseError(line_nos[i], 1, "indentation skips a level");
    }
    stack.resize(depth);
    DNode* parent = stack.back();
    parent->children.push_back(std::move(lines[i].node));
    stack.push_back(&parent->children.back());
  }
  return root;
}

std::string_view type_name(const AssertionValue& v) {
  switch (v.index()) {
    case 0: return "none";
    case 1: return "quality";
    case 2: return "price";
    default: return "label";
  }
}

void fill(DNode& node, const Assertion& a) {
  if (node.is_slot()) {
    const std::string slot = node.lexeme.substr(1);
    auto mismatch = [&] {
      return SlotTypeError("slot $" + slot + " cannot take the " +
                           std::string(type_name(a.value)) + " value of " +
                           std::string(to_string(a.predicate)) + " assertion " +
                           std::to_string(a.id));
    };
    node.features["filled"] = slot;
    if (slot == "ENTITY") {
      if (a.entities.empty()) throw SlotTypeError("assertion without entity");
      if (a.entities.size() == 1) {
        node.lexeme = a.entities.front();
      } else {
        DNode coord;
        coord.lexeme = "and";
        coord.word_class = WordClass::kCoordConj;
        coord.relation = node.relation;
        coord.features = {{"number", "pl"}, {"person", "3rd"}};
        for (const auto& e : a.entities) {
          DNode item = node;
          item.lexeme = e;
          item.relation = DepRel::kCoord;
          coord.children.push_back(std::move(item));
        }
        node = std::move(coord);
      }
    } else if (slot == "SCALAR") {
      const auto* q = std::get_if<Quality>(&a.value);
      if (!q) throw mismatch();
      node.lexeme = quality_word(*q);
    } else if (slot == "PRICE") {
      const auto* p = std::get_if<int>(&a.value);
      if (!p) throw mismatch();
      node.lexeme = std::to_string(*p);
    } else if (slot == "CUISINE" || slot == "NBHD") {
      const auto* s = std::get_if<std::string>(&a.value);
      const Predicate expected =
          slot == "CUISINE" ? Predicate::kCuisine : Predicate::kNeighborhood;
      if (!s || a.predicate != expected) throw mismatch();
      node.lexeme = *s;
    } else {
      throw SlotTypeError("unknown slot $" + slot);
    }
    return;
  }
  for (auto& c : node.children) fill(c, a);
}

}  // namespace

MissingPredicateError::MissingPredicateError(Predicate p)
    : DictionaryError("generation dictionary has no entry for predicate " +
                      std::string(to_string(p))),
      predicate_(p) {}

DictionaryParseError::DictionaryParseError(int line, int column,
                                           const std::string& what)
    : DictionaryError("dictionary " + std::to_string(line) + ":" +
                      std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

void GenerationDictionary::set(Predicate p, std::vector<DNode> templates) {
  entries_[p] = std::move(templates);
}

void GenerationDictionary::add_alternative(Predicate p, DNode tmpl) {
  entries_[p].push_back(std::move(tmpl));
}

bool GenerationDictionary::covers(Predicate p) const {
  auto it = entries_.find(p);
  return it != entries_.end() && !it->second.empty();
}

const std::vector<DNode>& GenerationDictionary::templates(Predicate p) const {
  auto it = entries_.find(p);
  if (it == entries_.end() || it->second.empty()) throw MissingPredicateError(p);
  return it->second;
}

std::vector<Predicate> GenerationDictionary::uncovered() const {
  std::vector<Predicate> out;
  for (Predicate p : kAllPredicates) {
    if (!covers(p)) out.push_back(p);
  }
  return out;
}

DictionaryLoad load_dictionary(std::string_view text) {
  DictionaryLoad result;
  std::optional<Predicate> current;
  std::vector<NodeLine> lines;
  std::vector<int> line_nos;
  std::set<Predicate> seen;
  int header_line = 0;

  auto flush = [&] {
    if (!current) return;
    if (lines.empty()) {
      throw DictionaryParseError(header_line, 1,
                                 "entry " + std::string(to_string(*current)) +
                                     " has no nodes");
    }
    if (!seen.insert(*current).second) {
      result.warnings.push_back("duplicate entry for " +
                                std::string(to_string(*current)) +
                                "; the last one wins");
    }
    result.dictionary.set(*current, {assemble(lines, line_nos)});
    lines.clear();
    line_nos.clear();
    current.reset();
  };

  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string_view content = trim(line);
    if (content.empty() || content.front() == '#') continue;

    if (line.front() != ' ') {
      flush();
      if (!content.starts_with("entry ") || content.back() != ':') {
        throw DictionaryParseError(line_no, 1, "expected 'entry <predicate>:'");
      }
      std::string_view name =
          trim(content.substr(6, content.size() - 7));
      current = parse_predicate(name);
      if (!current) {
        throw DictionaryParseError(line_no, 7,
                                   "unknown predicate '" + std::string(name) + "'");
      }
      header_line = line_no;
      continue;
    }
    if (!current) throw DictionaryParseError(line_no, 1, "node line outside an entry");
    lines.push_back(parse_node_line(line, line_no));
    line_nos.push_back(line_no);
  }
  flush();
  for (Predicate p : result.dictionary.uncovered()) {
    result.coverage_warnings.emplace_back(to_string(p));
  }
  return result;
}

std::string_view default_dictionary_text() { return kRestaurantDictionary; }

const GenerationDictionary& default_dictionary() {
  static const GenerationDictionary dict =
      load_dictionary(default_dictionary_text()).dictionary;
  return dict;
}

DNode lookup_and_instantiate(const GenerationDictionary& dict,
                             const Assertion& a) {
  DNode node = dict.templates(a.predicate).front();
  fill(node, a);
  node.sources = {a.id};
  if (!node.is_clause()) {
    throw DictionaryError("template for " + std::string(to_string(a.predicate)) +
                          " is not headed by a verb");
  }
  return node;
}

std::string_view quality_word(Quality q) {
  switch (q) {
    case Quality::kMediocre: return "mediocre";
    case Quality::kDecent: return "decent";
    case Quality::kGood: return "good";
    case Quality::kVeryGood: return "very good";
    case Quality::kExcellent: return "excellent";
  }
  return "?";
}

}  // namespace sentplan
