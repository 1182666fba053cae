#pragma once

#include <Eigen/Core>
#include <vector>

#include "projsel/projection.hpp"

namespace projsel {

struct SearchPath {
  std::vector<int> order;              // predictor indices in selection order
  Eigen::VectorXd discrepancy_trace;   // length order.size()+1; entry 0 = intercept-only
  bool truncated = false;              // remaining candidates were all rank deficient
};

// Greedy forward selection: at each step adds the candidate whose projection
// minimizes the discrepancy, ties broken by smallest index (within 1e-12).
SearchPath forward_search(const ProjectionContext& ctx, int max_vars);
SearchPath forward_search(const Dataset& ds, const DrawSet& dr, int max_vars);

// Exhaustive minimum over all size-k subsets; test oracle for the greedy
// search. Refuses when binomial(m, size) exceeds 1e5.
Submodel exhaustive_best(const ProjectionContext& ctx, int size);
Submodel exhaustive_best(const Dataset& ds, const DrawSet& dr, int size);

}  // namespace projsel
