#pragma once

// Surface realization. linearize() turns an instantiated d-tree into text
// for the closed restaurant lexicon; realize_template() is the hand-built
// baseline generator that orders and aggregates assertions directly.

#include <stdexcept>
#include <string>
#include <vector>

#include "sentplan/dtree.h"
#include "sentplan/plan.h"

namespace sentplan {

class RealizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Realization {
  std::string text;                // sentences joined by single spaces
  std::vector<std::string> sentences;
  // Assertion ids expressed in each sentence, in surface order.
  std::vector<std::vector<int>> sentence_assertions;

  std::vector<int> assertion_order() const;
};

Realization linearize(const DNode& d);

Realization realize_template(const ContentPlan& plan);

}  // namespace sentplan
