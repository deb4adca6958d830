#pragma once

// Feature extraction for ranking. Three families: n-grams over the
// entity-tagged realization (NGRAM-), n-grams over the concept sequence
// (CONC-), and configurations in the sp-tree (R-) and d-tree (S-). Path
// elements inside a name are joined with '*'.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <optional>
#include <string_view>
#include <vector>

#include "sentplan/plan.h"
#include "sentplan/realizer.h"
#include "sentplan/sentence_plan.h"

namespace sentplan {

struct FeatureVector {
  std::map<std::string, double> values;

  double get(const std::string& name) const;
  void add(const std::string& name, double v = 1.0) { values[name] += v; }
  void merge(const FeatureVector& other);
};

// Names used by the entity tagger.
class EntityLexicon {
 public:
  void add_restaurant(std::string name);
  void add_cuisine(std::string label);
  void add_neighborhood(std::string name);
  // Items, cuisine labels (split on commas) and neighborhoods of `plan`.
  void add_plan(const ContentPlan& plan);

  // Lower-cased tokens with names replaced by RESTNAME, CUISINENAME or
  // NBHDNAME. Punctuation is dropped; a possessive "'s" is its own token.
  std::vector<std::string> tag(std::string_view text) const;

 private:
  std::vector<std::pair<std::string, std::string>> names_;  // surface, tag
};

FeatureVector extract_ngram(const Realization& r, const EntityLexicon& lexicon);
// Concepts in realization order.
FeatureVector extract_concept(const ContentPlan& plan, const Realization& r);
FeatureVector extract_tree(const SpgAlternative& alt);

std::string concept_name(Predicate p);  // e.g. CLAIM, FOOD-QUALITY

// All three families for one alternative.
FeatureVector extract_features(const ContentPlan& plan, const SpgAlternative& alt,
                               const EntityLexicon& lexicon);

struct RowId {
  std::string plan_id;
  std::string alt_id;
  bool operator==(const RowId&) const = default;
};

struct FeatureRow {
  RowId id;
  FeatureVector features;
};

class FeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FeatureMatrix {
  std::vector<std::string> columns;
  std::vector<RowId> rows;
  // Sparse rows: (column index, value), ascending column index.
  std::vector<std::vector<std::pair<std::size_t, double>>> cells;

  std::size_t num_rows() const { return rows.size(); }
  std::size_t num_columns() const { return columns.size(); }
  double at(std::size_t row, std::size_t col) const;
  std::vector<double> column(std::size_t col) const;
  // Column index, or num_columns() when absent.
  std::size_t find_column(std::string_view name) const;
  FeatureMatrix select_rows(const std::vector<std::size_t>& rows) const;
  FeatureMatrix select_columns(const std::vector<std::size_t>& cols) const;
};

enum class PruneBy {
  kRows,   // number of rows with a nonzero value
  kTotal,  // summed value over rows
};

// Keeps a column when its occurrence is at least min_count. Columns are
// sorted by name.
FeatureMatrix assemble_and_prune(const std::vector<FeatureRow>& rows,
                                 std::size_t min_count = 10,
                                 PruneBy by = PruneBy::kRows);

// The three families compared in evaluation. Word counts belong with the
// n-grams and concept counts with the concepts.
enum class FeatureSet { kAll, kNgram, kConcept, kTree };
std::string_view to_string(FeatureSet s);
std::optional<FeatureSet> parse_feature_set(std::string_view s);
bool in_feature_set(std::string_view column, FeatureSet s);
FeatureMatrix restrict_features(const FeatureMatrix& m, FeatureSet s);

// Sparse text form: a "columns" header line, then one line per row,
// "plan-id alt-id col:value ...", with column indices.
void write_matrix(std::ostream& out, const FeatureMatrix& m);
FeatureMatrix read_matrix(std::istream& in);

}  // namespace sentplan
