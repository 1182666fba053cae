#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "projsel/dataset.hpp"
#include "projsel/projection.hpp"
#include "projsel/sampler.hpp"
#include "projsel/search.hpp"

namespace projsel {

// Mean over held-out points of the log Monte-Carlo-averaged predictive
// density: (1/n) sum_i log[(1/S) sum_s N(y_i | mean_is, var_s)].
double mlpd(const Eigen::VectorXd& y, const PredictiveMoments& mom);

// Mean squared error of the posterior predictive mean.
double mse(const Eigen::VectorXd& y, const PredictiveMoments& mom);

// Submodel-minus-full metric differences along a search path, sizes 0..L.
struct PerformanceCurve {
  std::vector<int> sizes;
  Eigen::VectorXd delta_mlpd;
  Eigen::VectorXd delta_mse;
  Eigen::Index n_eval = 0;
  double full_mlpd = 0.0;  // reference levels the deltas are relative to
  double full_mse = 0.0;
};

PerformanceCurve curve(const Dataset& train, const Dataset& test, const DrawSet& dr,
                       const SearchPath& path);

struct CvReport {
  int k = 0;
  std::vector<PerformanceCurve> per_fold;
  std::vector<SearchPath> per_fold_paths;
  PerformanceCurve mean_curve;
  // pointwise normal-approximation 95% band across folds
  Eigen::VectorXd mlpd_lo, mlpd_hi;
  Eigen::VectorXd mse_lo, mse_hi;
};

// K-fold protocol: per fold, standardize the in-fold predictors, map the
// held-out fold with the same stats, fit the sampler, run the forward
// search, and score the path on the held-out fold. Fold seeds derive from
// the top-level seed and fold index.
CvReport cross_validate(const Dataset& ds, const PriorSpec& prior,
                        const SamplerConfig& cfg, int k, int max_vars,
                        std::uint64_t seed);

}  // namespace projsel
