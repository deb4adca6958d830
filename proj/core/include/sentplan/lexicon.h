#pragma once

// Generation dictionary: maps each assertion predicate to a d-tree template
// whose leaves may be variable slots ($ENTITY, $CUISINE, $SCALAR, $PRICE,
// $NBHD). Instantiation fills the slots from an assertion.

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sentplan/dtree.h"
#include "sentplan/plan.h"

namespace sentplan {

class DictionaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingPredicateError : public DictionaryError {
 public:
  explicit MissingPredicateError(Predicate p);
  Predicate predicate() const { return predicate_; }

 private:
  Predicate predicate_;
};

class SlotTypeError : public DictionaryError {
 public:
  using DictionaryError::DictionaryError;
};

class DictionaryParseError : public DictionaryError {
 public:
  DictionaryParseError(int line, int column, const std::string& what);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class GenerationDictionary {
 public:
  // Replaces any existing templates for `p`.
  void set(Predicate p, std::vector<DNode> templates);
  void add_alternative(Predicate p, DNode tmpl);

  bool covers(Predicate p) const;
  const std::vector<DNode>& templates(Predicate p) const;
  std::vector<Predicate> uncovered() const;

 private:
  std::map<Predicate, std::vector<DNode>> entries_;
};

struct DictionaryLoad {
  GenerationDictionary dictionary;
  std::vector<std::string> coverage_warnings;  // predicate names
  std::vector<std::string> warnings;           // duplicates and the like
};

DictionaryLoad load_dictionary(std::string_view text);

std::string_view default_dictionary_text();
const GenerationDictionary& default_dictionary();

// Instantiates the first template for a.predicate.
DNode lookup_and_instantiate(const GenerationDictionary& dict,
                             const Assertion& a);

// Surface lexeme for a quality scalar, e.g. "very good".
std::string_view quality_word(Quality q);

}  // namespace sentplan
