#pragma once

#include <string>
#include <vector>

#include "sentplan/features.h"

namespace sentplan::testing {

// Matrix from dense rows; row i of plan plan_of[i] gets alt id "a<i>".
inline FeatureMatrix dense_matrix(std::vector<std::string> columns,
                                  const std::vector<std::vector<double>>& values,
                                  const std::vector<std::string>& plan_of) {
  FeatureMatrix m;
  m.columns = std::move(columns);
  for (std::size_t r = 0; r < values.size(); ++r) {
    m.rows.push_back({plan_of[r], "a" + std::to_string(r)});
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t c = 0; c < values[r].size(); ++c) {
      if (values[r][c] != 0) row.emplace_back(c, values[r][c]);
    }
    m.cells.push_back(std::move(row));
  }
  return m;
}

}  // namespace sentplan::testing
