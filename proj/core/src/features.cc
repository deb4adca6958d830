#include "sentplan/features.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace sentplan {
namespace {

std::string upper_token(std::string_view s) {
  std::string out;
  for (char c : s) {
    out += c == ' ' ? '-' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string join(const std::vector<std::string>& parts, std::size_t begin,
                 std::size_t end, char sep) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += sep;
    out += parts[i];
  }
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-';
}

// Counts 1..3-grams; boundary tokens alone are not counted as unigrams.
void add_ngrams(FeatureVector& fv, const std::string& prefix,
                const std::vector<std::string>& tokens, char sep) {
  std::vector<std::string> padded;
  padded.reserve(tokens.size() + 2);
  padded.push_back("BEGIN");
  padded.insert(padded.end(), tokens.begin(), tokens.end());
  padded.push_back("END");
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::size_t i = 0; i + n <= padded.size(); ++i) {
      if (n == 1 && (i == 0 || i + 1 == padded.size())) continue;
      fv.add(prefix + join(padded, i, i + n, sep));
    }
  }
}

void add_stats(FeatureVector& fv, const std::string& name,
               const std::vector<double>& per_sentence) {
  if (per_sentence.empty()) {
    fv.add(name + "-MIN", 0);
    fv.add(name + "-MAX", 0);
    fv.add(name + "-AVG", 0);
    return;
  }
  double sum = 0;
  for (double v : per_sentence) sum += v;
  fv.add(name + "-MIN", *std::min_element(per_sentence.begin(), per_sentence.end()));
  fv.add(name + "-MAX", *std::max_element(per_sentence.begin(), per_sentence.end()));
  fv.add(name + "-AVG", sum / static_cast<double>(per_sentence.size()));
}

std::size_t count_words(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool w = !std::isspace(static_cast<unsigned char>(c));
    if (w && !in_word) ++n;
    in_word = w;
  }
  return n;
}

// A labelled ordered tree, the common shape of sp-trees and d-trees.
struct LTree {
  std::string label;
  std::vector<LTree> children;
};

LTree from_sp(const SpNode& n) {
  LTree t{n.label(), {}};
  for (const auto& c : n.children) t.children.push_back(from_sp(c));
  return t;
}

std::string d_label(const DNode& n) {
  if (n.has("pro", "yes")) return "PRONOUN";
  const std::string& slot = n.feature("filled");
  if (slot == "ENTITY") return "RESTNAME";
  if (slot == "CUISINE") return "CUISINENAME";
  if (slot == "NBHD") return "NBHDNAME";
  if (slot == "PRICE") return "NUMBER";
  return upper_token(n.lexeme);
}

LTree from_d(const DNode& n) {
  LTree t{d_label(n), {}};
  for (const auto& c : n.children) t.children.push_back(from_d(c));
  return t;
}

std::size_t height(const LTree& t) {
  std::size_t h = 0;
  for (const auto& c : t.children) h = std::max(h, height(c) + 1);
  return h;
}

// Preorder traversal of `t` cut off below `depth`.
void preorder(const LTree& t, std::size_t depth, std::vector<std::string>& out) {
  out.push_back(t.label);
  if (depth == 0) return;
  for (const auto& c : t.children) preorder(c, depth - 1, out);
}

void local_features(const LTree& t, std::vector<std::string>& path,
                    const std::string& prefix, FeatureVector& fv) {
  const std::size_t h = height(t);
  for (std::size_t d = 0; d <= h; ++d) {
    std::vector<std::string> trav;
    preorder(t, d, trav);
    fv.add(prefix + "TRAV-" + join(trav, 0, trav.size(), '*'));
  }
  // path holds root..parent; ancestor paths start at this node.
  std::vector<std::string> up{t.label};
  fv.add(prefix + "ANC-" + t.label);
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    up.push_back(*it);
    fv.add(prefix + "ANC-" + join(up, 0, up.size(), '*'));
  }
  for (std::size_t i = 0; i + 1 < t.children.size(); ++i) {
    fv.add(prefix + "SIS-" + t.children[i].label + "*" + t.children[i + 1].label);
  }
  path.push_back(t.label);
  for (const auto& c : t.children) local_features(c, path, prefix, fv);
  path.pop_back();
}

struct LeafStats {
  std::size_t min = 0;
  std::size_t max = 0;
  std::size_t sum = 0;
  std::size_t count = 0;
};

std::size_t global_features(const SpNode& n, std::map<std::string, LeafStats>& stats) {
  if (n.is_leaf()) return 1;
  std::size_t leaves = 0;
  for (const auto& c : n.children) leaves += global_features(c, stats);
  auto [it, fresh] = stats.try_emplace(n.label());
  LeafStats& s = it->second;
  s.min = fresh ? leaves : std::min(s.min, leaves);
  s.max = std::max(s.max, leaves);
  s.sum += leaves;
  ++s.count;
  return leaves;
}

std::string format_value(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_value(std::string_view s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FeatureError("bad value '" + std::string(s) + "'");
  }
  return v;
}

bool has_space(std::string_view s) {
  return s.empty() || std::any_of(s.begin(), s.end(), [](char c) {
           return std::isspace(static_cast<unsigned char>(c));
         });
}

}  // namespace

double FeatureVector::get(const std::string& name) const {
  auto it = values.find(name);
  return it == values.end() ? 0.0 : it->second;
}

void FeatureVector::merge(const FeatureVector& other) {
  for (const auto& [k, v] : other.values) values[k] += v;
}

void EntityLexicon::add_restaurant(std::string name) {
  names_.emplace_back(std::move(name), "RESTNAME");
}
void EntityLexicon::add_cuisine(std::string label) {
  names_.emplace_back(std::move(label), "CUISINENAME");
}
void EntityLexicon::add_neighborhood(std::string name) {
  names_.emplace_back(std::move(name), "NBHDNAME");
}

void EntityLexicon::add_plan(const ContentPlan& plan) {
  for (const auto& item : plan.items) add_restaurant(item);
  for (const auto& a : plan.assertions) {
    for (const auto& e : a.entities) add_restaurant(e);
    const auto* label = std::get_if<std::string>(&a.value);
    if (!label) continue;
    if (a.predicate == Predicate::kNeighborhood) {
      add_neighborhood(*label);
    } else if (a.predicate == Predicate::kCuisine) {
      std::stringstream ss(*label);
      std::string part;
      while (std::getline(ss, part, ',')) {
        const auto b = part.find_first_not_of(' ');
        const auto e = part.find_last_not_of(' ');
        if (b != std::string::npos) add_cuisine(part.substr(b, e - b + 1));
      }
    }
  }
}

std::vector<std::string> EntityLexicon::tag(std::string_view text) const {
  // Longest names first so "Chanpen Thai" wins over the cuisine "Thai".
  std::vector<const std::pair<std::string, std::string>*> names;
  for (const auto& n : names_) names.push_back(&n);
  std::stable_sort(names.begin(), names.end(), [](const auto* a, const auto* b) {
    return a->first.size() > b->first.size();
  });

  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    const bool at_boundary = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
    const std::pair<std::string, std::string>* hit = nullptr;
    if (at_boundary) {
      for (const auto* n : names) {
        const std::size_t end = i + n->first.size();
        if (text.substr(i, n->first.size()) == n->first &&
            (end == text.size() || !std::isalnum(static_cast<unsigned char>(text[end])))) {
          hit = n;
          break;
        }
      }
    }
    if (hit) {
      out.push_back(hit->second);
      i += hit->first.size();
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    std::string word = lower(text.substr(i, j - i));
    i = j;
    if (word.size() > 2 && word.ends_with("'s")) {
      out.push_back(word.substr(0, word.size() - 2));
      out.push_back("'s");
    } else if (word.starts_with("'s") || word == "'") {
      out.push_back(word);
    } else {
      out.push_back(std::move(word));
    }
  }
  return out;
}

FeatureVector extract_ngram(const Realization& r, const EntityLexicon& lexicon) {
  FeatureVector fv;
  std::vector<std::string> tokens;
  for (auto& t : lexicon.tag(r.text)) tokens.push_back(upper_token(t));
  add_ngrams(fv, "NGRAM-", tokens, '-');
  std::vector<double> per_sentence;
  double total = 0;
  for (const auto& s : r.sentences) {
    per_sentence.push_back(static_cast<double>(count_words(s)));
    total += per_sentence.back();
  }
  fv.add("WORDS-PER-PRESENTATION", total);
  add_stats(fv, "WORDS-PER-SENTENCE", per_sentence);
  return fv;
}

std::string concept_name(Predicate p) {
  if (is_claim(p)) return "CLAIM";
  return upper_token(to_string(p));
}

FeatureVector extract_concept(const ContentPlan& plan, const Realization& r) {
  FeatureVector fv;
  std::vector<std::string> concepts;
  for (int id : r.assertion_order()) {
    const Assertion* a = plan.find(id);
    if (!a) throw FeatureError("realization mentions unknown assertion " + std::to_string(id));
    concepts.push_back(concept_name(a->predicate));
  }
  add_ngrams(fv, "CONC-", concepts, '*');
  std::vector<double> per_sentence;
  for (const auto& s : r.sentence_assertions) {
    per_sentence.push_back(static_cast<double>(s.size()));
  }
  fv.add("CONCEPTS-PER-PRESENTATION", static_cast<double>(concepts.size()));
  add_stats(fv, "CONCEPTS-PER-SENTENCE", per_sentence);
  return fv;
}

FeatureVector extract_tree(const SpgAlternative& alt) {
  FeatureVector fv;
  std::vector<std::string> path;
  local_features(from_sp(alt.sp_tree), path, "R-", fv);
  local_features(from_d(alt.d_tree), path, "S-", fv);

  std::vector<std::string> leaf_labels;
  for (const auto* l : frontier(alt.sp_tree)) leaf_labels.push_back(l->label());
  for (std::size_t n = 1; n <= leaf_labels.size(); ++n) {
    fv.add("LEAF-" + join(leaf_labels, 0, n, '*'));
  }

  std::map<std::string, LeafStats> stats;
  global_features(alt.sp_tree, stats);
  for (const auto& [label, s] : stats) {
    fv.add(label + "-MIN-LEAVES-UNDER", static_cast<double>(s.min));
    fv.add(label + "-MAX-LEAVES-UNDER", static_cast<double>(s.max));
    fv.add(label + "-AVG-LEAVES-UNDER",
           static_cast<double>(s.sum) / static_cast<double>(s.count));
  }
  return fv;
}

FeatureVector extract_features(const ContentPlan& plan, const SpgAlternative& alt,
                               const EntityLexicon& lexicon) {
  const Realization r = linearize(alt.d_tree);
  FeatureVector fv = extract_ngram(r, lexicon);
  fv.merge(extract_concept(plan, r));
  fv.merge(extract_tree(alt));
  return fv;
}

double FeatureMatrix::at(std::size_t row, std::size_t col) const {
  const auto& cells_row = cells.at(row);
  auto it = std::lower_bound(cells_row.begin(), cells_row.end(), col,
                             [](const auto& cell, std::size_t c) { return cell.first < c; });
  return it != cells_row.end() && it->first == col ? it->second : 0.0;
}

std::vector<double> FeatureMatrix::column(std::size_t col) const {
  std::vector<double> out(rows.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) out[r] = at(r, col);
  return out;
}

std::size_t FeatureMatrix::find_column(std::string_view name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  return static_cast<std::size_t>(it - columns.begin());
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& which) const {
  FeatureMatrix out;
  out.columns = columns;
  for (std::size_t r : which) {
    out.rows.push_back(rows.at(r));
    out.cells.push_back(cells.at(r));
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(const std::vector<std::size_t>& which) const {
  FeatureMatrix out;
  out.rows = rows;
  std::vector<std::size_t> remap(columns.size(), columns.size());
  for (std::size_t i = 0; i < which.size(); ++i) {
    out.columns.push_back(columns.at(which[i]));
    remap[which[i]] = i;
  }
  for (const auto& row : cells) {
    std::vector<std::pair<std::size_t, double>> kept;
    for (const auto& [c, v] : row) {
      if (remap[c] != columns.size()) kept.emplace_back(remap[c], v);
    }
    std::sort(kept.begin(), kept.end());
    out.cells.push_back(std::move(kept));
  }
  return out;
}

FeatureMatrix assemble_and_prune(const std::vector<FeatureRow>& rows,
                                 std::size_t min_count, PruneBy by) {
  if (rows.empty()) throw FeatureError("empty corpus");
  std::map<std::string, double> occurrence;
  for (const auto& row : rows) {
    for (const auto& [name, v] : row.features.values) {
      if (v < 0) throw FeatureError("negative value for " + name);
      if (v == 0) continue;
      occurrence[name] += by == PruneBy::kRows ? 1.0 : v;
    }
  }
  FeatureMatrix m;
  std::map<std::string, std::size_t> index;
  for (const auto& [name, n] : occurrence) {
    if (n >= static_cast<double>(min_count)) {
      index[name] = m.columns.size();
      m.columns.push_back(name);
    }
  }
  for (const auto& row : rows) {
    m.rows.push_back(row.id);
    std::vector<std::pair<std::size_t, double>> cells;
    for (const auto& [name, v] : row.features.values) {
      auto it = index.find(name);
      if (it != index.end() && v != 0) cells.emplace_back(it->second, v);
    }
    m.cells.push_back(std::move(cells));
  }
  return m;
}

void write_matrix(std::ostream& out, const FeatureMatrix& m) {
  out << "columns";
  for (const auto& c : m.columns) {
    if (has_space(c)) throw FeatureError("column name '" + c + "' contains whitespace");
    out << ' ' << c;
  }
  out << '\n';
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    const RowId& id = m.rows[r];
    if (has_space(id.plan_id) || has_space(id.alt_id)) {
      throw FeatureError("row ids must be non-empty and free of whitespace");
    }
    out << id.plan_id << ' ' << id.alt_id;
    for (const auto& [c, v] : m.cells[r]) out << ' ' << c << ':' << format_value(v);
    out << '\n';
  }
}

FeatureMatrix read_matrix(std::istream& in) {
  FeatureMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw FeatureError("missing columns header");
  {
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word != "columns") throw FeatureError("missing columns header");
    while (ss >> word) m.columns.push_back(word);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    RowId id;
    if (!(ss >> id.plan_id >> id.alt_id)) {
      throw FeatureError("line " + std::to_string(line_no) + ": missing row ids");
    }
    std::vector<std::pair<std::size_t, double>> cells;
    std::string cell;
    while (ss >> cell) {
      const auto colon = cell.find(':');
      std::size_t c = 0;
      auto res = std::from_chars(cell.data(), cell.data() + colon, c);
      if (colon == std::string::npos || res.ec != std::errc() ||
          res.ptr != cell.data() + colon || c >= m.columns.size()) {
        throw FeatureError("line " + std::to_string(line_no) + ": bad cell '" + cell + "'");
      }
      cells.emplace_back(c, parse_value(std::string_view(cell).substr(colon + 1)));
    }
    std::sort(cells.begin(), cells.end());
    m.rows.push_back(std::move(id));
    m.cells.push_back(std::move(cells));
  }
  return m;
}

std::string_view to_string(FeatureSet s) {
  switch (s) {
    case FeatureSet::kAll: return "all";
    case FeatureSet::kNgram: return "ngram";
    case FeatureSet::kConcept: return "concept";
    case FeatureSet::kTree: return "tree";
  }
  return "all";
}

std::optional<FeatureSet> parse_feature_set(std::string_view s) {
  for (auto f : {FeatureSet::kAll, FeatureSet::kNgram, FeatureSet::kConcept, FeatureSet::kTree}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

bool in_feature_set(std::string_view column, FeatureSet s) {
  auto starts = [&](std::string_view p) { return column.substr(0, p.size()) == p; };
  const bool ngram = starts("NGRAM-") || starts("WORDS-PER-");
  const bool conc = starts("CONC-") || starts("CONCEPTS-PER-");
  switch (s) {
    case FeatureSet::kAll: return true;
    case FeatureSet::kNgram: return ngram;
    case FeatureSet::kConcept: return conc;
    case FeatureSet::kTree: return !ngram && !conc;
  }
  return false;
}

FeatureMatrix restrict_features(const FeatureMatrix& m, FeatureSet s) {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < m.num_columns(); ++c) {
    if (in_feature_set(m.columns[c], s)) keep.push_back(c);
  }
  return m.select_columns(keep);
}

}  // namespace sentplan
