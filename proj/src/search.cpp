#include "projsel/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "projsel/parallel.hpp"

namespace projsel {

namespace {

constexpr double kTieTolerance = 1e-12;

Submodel extend_sorted(const std::vector<int>& selected, int candidate) {
  Submodel sub;
  sub.indices = selected;
  sub.indices.push_back(candidate);
  std::sort(sub.indices.begin(), sub.indices.end());
  return sub;
}

}  // namespace

SearchPath forward_search(const ProjectionContext& ctx, int max_vars) {
  const int m = static_cast<int>(ctx.num_predictors());
  if (max_vars < 1 || max_vars > m) {
    throw std::invalid_argument("forward_search: max_vars must be in [1, m]");
  }

  SearchPath path;
  path.discrepancy_trace.resize(max_vars + 1);
  path.discrepancy_trace(0) = ctx.project(Submodel{}).discrepancy;

  std::vector<int> selected;  // kept sorted
  std::vector<char> in_model(static_cast<std::size_t>(m), 0);
  for (int step = 1; step <= max_vars; ++step) {
    std::vector<int> candidates;
    for (int j = 0; j < m; ++j) {
      if (!in_model[static_cast<std::size_t>(j)]) candidates.push_back(j);
    }
    std::vector<double> disc(candidates.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(candidates.size(), [&](std::size_t c) {
      const auto d = ctx.try_discrepancy(extend_sorted(selected, candidates[c]));
      if (d) disc[c] = *d;
    });

    double best = std::numeric_limits<double>::infinity();
    for (double d : disc) {
      if (!std::isnan(d)) best = std::min(best, d);
    }
    if (!std::isfinite(best)) {
      // every remaining candidate is rank deficient
      path.truncated = true;
      path.discrepancy_trace.conservativeResize(step);
      break;
    }
    int winner = -1;
    double winner_disc = 0.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (!std::isnan(disc[c]) && disc[c] <= best + kTieTolerance) {
        winner = candidates[c];
        winner_disc = disc[c];
        break;  // candidates are in increasing index order
      }
    }
    path.order.push_back(winner);
    path.discrepancy_trace(step) = winner_disc;
    in_model[static_cast<std::size_t>(winner)] = 1;
    selected.insert(std::upper_bound(selected.begin(), selected.end(), winner), winner);
  }
  return path;
}

SearchPath forward_search(const Dataset& ds, const DrawSet& dr, int max_vars) {
  return forward_search(ProjectionContext(ds, dr), max_vars);
}

Submodel exhaustive_best(const ProjectionContext& ctx, int size) {
  const int m = static_cast<int>(ctx.num_predictors());
  if (size < 0 || size > m) {
    throw std::invalid_argument("exhaustive_best: size must be in [0, m]");
  }
  double combos = 1.0;
  for (int j = 1; j <= size; ++j) combos *= double(m - j + 1) / double(j);
  if (combos > 1e5) {
    throw std::invalid_argument("exhaustive_best: binomial(m, size) exceeds the 1e5 budget");
  }

  // lexicographic enumeration; earlier subsets win ties
  std::vector<int> idx(static_cast<std::size_t>(size));
  for (int j = 0; j < size; ++j) idx[static_cast<std::size_t>(j)] = j;
  Submodel best_sub;
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (;;) {
    Submodel sub;
    sub.indices = idx;
    if (const auto d = ctx.try_discrepancy(sub)) {
      if (!any || *d < best - kTieTolerance) {
        best = *d;
        best_sub = sub;
        any = true;
      }
    }
    // advance the combination
    int j = size - 1;
    while (j >= 0 && idx[static_cast<std::size_t>(j)] == m - size + j) --j;
    if (j < 0) break;
    ++idx[static_cast<std::size_t>(j)];
    for (int l = j + 1; l < size; ++l) {
      idx[static_cast<std::size_t>(l)] = idx[static_cast<std::size_t>(l - 1)] + 1;
    }
  }
  if (!any) throw std::runtime_error("exhaustive_best: all size-" + std::to_string(size) +
                                     " subsets are rank deficient");
  return best_sub;
}

Submodel exhaustive_best(const Dataset& ds, const DrawSet& dr, int size) {
  return exhaustive_best(ProjectionContext(ds, dr), size);
}

}  // namespace projsel
