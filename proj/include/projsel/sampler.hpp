#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "projsel/dataset.hpp"
#include "projsel/priors.hpp"

namespace projsel {

struct SamplerConfig {
  int chains = 4;
  int iterations_per_chain = 1000;
  int warmup = 500;  // discarded from the start of every chain
  int thin = 1;
  std::uint64_t seed = 0;

  void validate() const;
  // pooled draw count across chains
  Eigen::Index num_draws() const;
};

struct DrawMeta {
  int chains = 0;
  int warmup = 0;
  std::uint64_t seed = 0;
  PriorSpec prior;
  Eigen::VectorXd rhat;               // split-chain R-hat per weight (m+1)
  std::vector<std::string> warnings;  // diagnostics that did not abort the fit
  double seconds = 0.0;
};

// Pooled posterior draws of the full linear Gaussian model. Column 0 of
// weights is the intercept; scale matrices may be empty (e.g. imported
// draws, or eta for the non-plus prior).
struct DrawSet {
  Eigen::MatrixXd weights;  // S x (m+1)
  Eigen::VectorXd sigma2;   // S
  Eigen::MatrixXd lambda;   // S x m or empty
  Eigen::VectorXd tau;      // S or empty
  Eigen::MatrixXd eta;      // S x m or empty
  DrawMeta meta;

  Eigen::Index num_draws() const { return weights.rows(); }
  Eigen::Index num_predictors() const { return weights.cols() - 1; }
};

// Gibbs sampler for the model under the HS-t_nu / HS-t_nu+ prior, using the
// inverse-gamma scale-mixture representation of the half-Student-t. Chains
// run on independent seed streams and are pooled after warmup in chain order.
DrawSet fit(const Dataset& ds, const PriorSpec& prior, const SamplerConfig& cfg);

// Samples (lambda, tau, eta) from the prior alone through the sampler's own
// auxiliary-variable route and returns the implied shrinkage coefficients,
// one column per predictor. Validation harness against sample_kappa_prior.
Eigen::MatrixXd prior_predictive_check(const PriorSpec& prior, int m, int count,
                                       std::uint64_t seed);

// Draw interchange format: header `sigma2,w0,...,wm[,lambda1...,tau[,eta1...]]`,
// one row per draw, >= 15 significant digits.
void export_draws(const DrawSet& dr, const std::string& path);
DrawSet import_draws(const std::string& path, Eigen::Index m);

// --- test surface ---------------------------------------------------------

// Moments of the Gaussian full conditional of (w0, w): a draw is
// mean + noise_transform * z with z standard normal. Computed from one
// column-pivoted QR of the regularized design, never an explicit inverse.
struct WeightConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd noise_transform;
};
WeightConditional weight_conditional(const Eigen::MatrixXd& design,
                                     const Eigen::VectorXd& y, double sigma2,
                                     const Eigen::VectorXd& prior_sd);

// Diagnostic mode with all scale parameters held fixed; the weight draws are
// then iid from the analytic Gaussian conditional. Not part of the user API.
struct FixedScales {
  Eigen::VectorXd lambda;  // m local scales
  double tau = 1.0;
  Eigen::VectorXd eta;     // empty unless plus variant
  double sigma2 = 1.0;
};
DrawSet fit_fixed_scales(const Dataset& ds, const PriorSpec& prior,
                         const SamplerConfig& cfg, const FixedScales& fs);

// Split-chain potential scale reduction for one scalar quantity; draws are
// stored per chain in columns.
double split_rhat(const Eigen::MatrixXd& draws_by_chain);

}  // namespace projsel
