#include "sentplan/realizer.h"

#include <algorithm>
#include <cctype>
#include <map>

#include "sentplan/lexicon.h"

namespace sentplan {
namespace {

struct Fragment {
  std::string text;
  std::vector<int> sources;
};

using Fragments = std::vector<Fragment>;

std::string join_list(const std::vector<std::string>& items, bool serial_comma) {
  if (items.empty()) return "";
  if (items.size() == 1) return items[0];
  if (items.size() == 2) return items[0] + " and " + items[1];
  std::string out;
  for (std::size_t i = 0; i + 1 < items.size(); ++i) {
    out += items[i];
    out += i + 2 < items.size() || serial_comma ? ", " : " ";
  }
  return out + "and " + items.back();
}

bool starts_with_vowel(std::string_view s) {
  if (s.empty()) return false;
  const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

std::string indefinite(std::string_view phrase) {
  return std::string(starts_with_vowel(phrase) ? "an " : "a ") + std::string(phrase);
}

std::string lemma(std::string_view lexeme) {
  std::string out;
  for (char c : lexeme) {
    if (std::isdigit(static_cast<unsigned char>(c))) continue;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string finite(std::string_view verb, bool plural) {
  if (verb == "be") return plural ? "are" : "is";
  if (verb == "have") return plural ? "have" : "has";
  if (plural) return std::string(verb);
  const std::string v(verb);
  if (v.ends_with("s") || v.ends_with("sh") || v.ends_with("ch") || v.ends_with("x")) {
    return v + "es";
  }
  return v + "s";
}

std::string participle(const std::string& verb) {
  return verb.ends_with("e") ? verb + "d" : verb + "ed";
}

void require_instantiated(const DNode& n) {
  if (n.is_slot()) throw RealizationError("uninstantiated slot " + n.lexeme);
}

bool is_plural(const DNode& np) {
  if (np.has("pro", "yes")) return false;
  return np.has("number", "pl") ||
         (np.word_class == WordClass::kCoordConj && np.children.size() > 1);
}

std::string noun_phrase(const DNode& n);

std::string prepositional_phrase(const DNode& p) {
  require_instantiated(p);
  std::string out = lemma(p.lexeme);
  if (const DNode* obj = p.child(DepRel::kII)) out += " " + noun_phrase(*obj);
  return out;
}

std::string noun_phrase(const DNode& n) {
  require_instantiated(n);
  switch (n.word_class) {
    case WordClass::kProperNoun:
      if (n.has("pro", "yes")) return n.has("case", "gen") ? "its" : "it";
      return n.has("case", "gen") ? n.lexeme + "'s" : n.lexeme;
    case WordClass::kAdjective:
      return n.lexeme;
    case WordClass::kCoordConj: {
      std::vector<std::string> items;
      for (const auto& c : n.children) items.push_back(noun_phrase(c));
      return join_list(items, true);
    }
    case WordClass::kCommonNoun: {
      std::string possessor;
      std::vector<std::string> pre;
      std::vector<std::string> post;
      for (const auto& c : n.children) {
        if (c.relation != DepRel::kAttr) continue;
        require_instantiated(c);
        if (c.word_class == WordClass::kProperNoun && c.has("case", "gen")) {
          possessor = noun_phrase(c);
        } else if (c.word_class == WordClass::kPreposition) {
          post.push_back(prepositional_phrase(c));
        } else if (c.word_class == WordClass::kAdjective ||
                   c.word_class == WordClass::kCommonNoun) {
          pre.push_back(c.lexeme);
        } else if (!c.has("clause", "relative")) {
          throw RealizationError("unexpected modifier " + c.lexeme);
        }
      }
      std::string head = n.lexeme;
      if (n.has("number", "pl")) head += "s";
      std::string core;
      for (const auto& w : pre) core += w + " ";
      core += head;
      std::string out;
      if (!possessor.empty()) {
        out = possessor + " " + core;
      } else if (n.has("article", "def")) {
        out = "the " + core;
      } else if (n.has("article", "indef")) {
        out = indefinite(core);
      } else {
        out = core;
      }
      for (const auto& p : post) out += " " + p;
      return out;
    }
    default:
      throw RealizationError("cannot realize " + std::string(to_string(n.word_class)) +
                             " '" + n.lexeme + "' as a noun phrase");
  }
}

// Verb phrase of a clause: finite verb, object, modifiers, with-adjuncts.
std::string verb_phrase(const DNode& clause, std::vector<int>& sources) {
  require_instantiated(clause);
  const DNode* subj = clause.child(DepRel::kI);
  const bool plural = subj && is_plural(*subj);
  const std::string verb = lemma(clause.lexeme);
  std::string out = clause.has("voice", "passive")
                        ? finite("be", plural) + " " + participle(verb)
                        : finite(verb, plural);
  if (const DNode* obj = clause.child(DepRel::kII)) out += " " + noun_phrase(*obj);
  std::vector<const DNode*> withs;
  for (const auto& c : clause.children) {
    if (c.relation != DepRel::kAttr) continue;
    if (c.has("clause", "with")) {
      withs.push_back(&c);
    } else if (c.word_class == WordClass::kPreposition) {
      out += " " + prepositional_phrase(c);
    } else {
      out += " " + noun_phrase(c);
    }
  }
  sources.insert(sources.end(), clause.sources.begin(), clause.sources.end());
  for (const DNode* w : withs) {
    const DNode* obj = w->child(DepRel::kII);
    if (!obj) throw RealizationError("with-adjunct without object");
    out += ", with " + noun_phrase(*obj);
    sources.insert(sources.end(), w->sources.begin(), w->sources.end());
  }
  return out;
}

Fragment clause_fragment(const DNode& clause) {
  const DNode* subj = clause.child(DepRel::kI);
  if (!subj) throw RealizationError("clause " + clause.lexeme + " has no subject");
  Fragment f;
  f.text = noun_phrase(*subj);
  for (const auto& c : subj->children) {
    if (!c.has("clause", "relative")) continue;
    f.text += ", which " + verb_phrase(c, f.sources) + ",";
  }
  f.text += " " + verb_phrase(clause, f.sources);
  return f;
}

bool is_and_list(const DNode& n) {
  return n.has("join", "clause") && n.lexeme == "and" && !n.has("lead", "yes");
}

Fragments realize(const DNode& n);

// Collects the members of nested "and" conjunctions.
void and_members(const DNode& n, std::vector<Fragments>& out) {
  for (const auto& c : n.children) {
    if (is_and_list(c)) {
      and_members(c, out);
    } else {
      out.push_back(realize(c));
    }
  }
}

Fragment join_and(const std::vector<Fragment>& items) {
  Fragment f;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) f.text += i + 1 == items.size() ? ", and " : ", ";
    f.text += items[i].text;
    f.sources.insert(f.sources.end(), items[i].sources.begin(), items[i].sources.end());
  }
  return f;
}

Fragments realize_and(const DNode& n) {
  std::vector<Fragments> members;
  and_members(n, members);
  Fragments out;
  std::vector<Fragment> current;
  for (auto& m : members) {
    current.push_back(std::move(m.front()));
    if (m.size() == 1) continue;
    out.push_back(join_and(current));
    for (std::size_t i = 1; i + 1 < m.size(); ++i) out.push_back(std::move(m[i]));
    current = {std::move(m.back())};
  }
  out.push_back(join_and(current));
  return out;
}

Fragments realize(const DNode& n) {
  require_instantiated(n);
  if (n.is_clause()) return {clause_fragment(n)};
  if (n.children.size() != 2 && !is_and_list(n)) {
    throw RealizationError("join node '" + n.lexeme + "' is not binary");
  }
  if (n.is_period()) {
    Fragments left = realize(n.children[0]);
    Fragments right = realize(n.children[1]);
    const std::string& cue = n.feature("cue");
    if (!cue.empty()) right.front().text = cue + ", " + right.front().text;
    left.insert(left.end(), right.begin(), right.end());
    return left;
  }
  if (!n.has("join", "clause")) {
    throw RealizationError("cannot realize '" + n.lexeme + "' as a clause");
  }
  if (is_and_list(n)) return realize_and(n);

  Fragments left = realize(n.children[0]);
  Fragments right = realize(n.children[1]);
  Fragment& a = left.back();
  Fragment& b = right.front();
  Fragment joined;
  if (n.has("lead", "yes")) {
    joined.text = n.lexeme + " " + a.text + ", " + b.text;
  } else {
    const bool comma = (n.lexeme == "since" || n.lexeme == "because") &&
                       !(is_and_list(n.children[1]) && right.size() == 1);
    joined.text = a.text + (comma ? ", " : " ") + n.lexeme + " " + b.text;
  }
  joined.sources = a.sources;
  joined.sources.insert(joined.sources.end(), b.sources.begin(), b.sources.end());
  Fragments out(left.begin(), left.end() - 1);
  out.push_back(std::move(joined));
  out.insert(out.end(), right.begin() + 1, right.end());
  return out;
}

std::string sentence(std::string text) {
  if (!text.empty()) {
    text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  }
  return text + ".";
}

void add_sentence(Realization& r, std::string text, std::vector<int> sources) {
  r.sentences.push_back(sentence(std::move(text)));
  r.sentence_assertions.push_back(std::move(sources));
}

void finish(Realization& r) {
  r.text.clear();
  for (std::size_t i = 0; i < r.sentences.size(); ++i) {
    if (i) r.text += ' ';
    r.text += r.sentences[i];
  }
}

// Template phrases.
std::string has_phrase(const Assertion& a) {
  std::string q(quality_word(std::get<Quality>(a.value)));
  switch (a.predicate) {
    case Predicate::kFoodQuality: return q + " food quality";
    case Predicate::kService: return q + " service";
    default: return q + " decor";
  }
}

struct EntityFacts {
  const Assertion* price = nullptr;
  const Assertion* cuisine = nullptr;
  const Assertion* neighborhood = nullptr;
  std::vector<const Assertion*> has;
};

EntityFacts facts_for(const ContentPlan& plan, const std::string& entity) {
  EntityFacts f;
  for (const auto& a : plan.assertions) {
    if (is_claim(a.predicate) || a.entity() != entity) continue;
    if (a.predicate == Predicate::kPrice) f.price = &a;
    else if (a.predicate == Predicate::kCuisine) f.cuisine = &a;
    else if (a.predicate == Predicate::kNeighborhood) f.neighborhood = &a;
    else f.has.push_back(&a);
  }
  return f;
}

std::vector<int> ids_of(const std::vector<const Assertion*>& as) {
  std::vector<int> out;
  for (const auto* a : as) out.push_back(a->id);
  return out;
}

// Sentences about one entity: price (with the has-list aggregated onto it
// when `aggregate`), has-list, cuisine, neighborhood. The name is used in
// the first sentence and "it" afterwards.
void entity_block(Realization& r, const std::string& name, const EntityFacts& f,
                  bool aggregate, const std::string& price_unit,
                  const std::string& lead = {}) {
  bool named = false;
  auto subject = [&]() -> std::string {
    if (named) return "it";
    named = true;
    return name;
  };
  auto emit = [&](std::string text, std::vector<int> ids) {
    add_sentence(r, std::move(text), std::move(ids));
  };
  std::vector<std::string> has_items;
  for (const auto* a : f.has) has_items.push_back(has_phrase(*a));
  const std::string has_list = join_list(has_items, false);
  std::string prefix = lead;

  if (f.price) {
    const int p = std::get<int>(f.price->value);
    std::string text = prefix + subject() + "'s price is " +
                       (price_unit == "$" ? "$" + std::to_string(p)
                                          : std::to_string(p) + " dollars");
    prefix.clear();
    std::vector<int> ids = {f.price->id};
    if (aggregate && !has_items.empty()) {
      text += " and " + subject() + " has " + has_list;
      auto more = ids_of(f.has);
      ids.insert(ids.end(), more.begin(), more.end());
      has_items.clear();
    }
    emit(text, ids);
  }
  if (!has_items.empty()) {
    emit(prefix + subject() + " has " + has_list, ids_of(f.has));
    prefix.clear();
  }
  if (f.cuisine) {
    emit(prefix + subject() + "'s " +
             indefinite(std::get<std::string>(f.cuisine->value)) + " restaurant",
         {f.cuisine->id});
    prefix.clear();
  }
  if (f.neighborhood) {
    emit(prefix + subject() + "'s located in " +
             std::get<std::string>(f.neighborhood->value),
         {f.neighborhood->id});
  }
}

std::vector<std::string> entity_order(const ContentPlan& plan) {
  std::vector<std::string> out;
  for (const auto& a : plan.assertions) {
    for (const auto& e : a.entities) {
      if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
    }
  }
  return out;
}

}  // namespace

std::vector<int> Realization::assertion_order() const {
  std::vector<int> out;
  for (const auto& s : sentence_assertions) out.insert(out.end(), s.begin(), s.end());
  return out;
}

Realization linearize(const DNode& d) {
  Realization r;
  for (auto& f : realize(d)) add_sentence(r, std::move(f.text), std::move(f.sources));
  finish(r);
  return r;
}

Realization realize_template(const ContentPlan& plan) {
  Realization r;
  switch (plan.strategy) {
    case Strategy::kRecommend: {
      const Assertion* claim = nullptr;
      for (const auto& a : plan.assertions) {
        if (a.predicate == Predicate::kClaimBest) claim = &a;
      }
      const std::string& name = claim->entity();
      add_sentence(r, name + " has the best overall value among the selected restaurants",
                   {claim->id});
      entity_block(r, name, facts_for(plan, name), true, "$");
      break;
    }
    case Strategy::kCompare3: {
      const Assertion* claim = nullptr;
      for (const auto& a : plan.assertions) {
        if (a.predicate == Predicate::kClaimExceptional) claim = &a;
      }
      add_sentence(r,
                   "among the selected restaurants, the following offer "
                   "exceptional overall value",
                   {claim->id});
      for (const auto& e : claim->entities) {
        entity_block(r, e, facts_for(plan, e), false, "dollars");
      }
      break;
    }
    case Strategy::kCompare2: {
      bool first = true;
      for (const auto& e : entity_order(plan)) {
        entity_block(r, e, facts_for(plan, e), true, "dollars",
                     first ? "" : "on the other hand, ");
        first = false;
      }
      break;
    }
  }
  finish(r);
  return r;
}

}  // namespace sentplan
