#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace projsel {

// Hierarchical shrinkage prior on the regression weights:
//   w_i | lambda_i, tau ~ N(0, lambda_i^2 tau^2),  lambda_i ~ half-t_nu(0,1),
// with tau ~ half-Cauchy(0,1) and a weakly informative N(0, intercept_sd^2)
// on the intercept. The plus variant adds a second level of local scales
// eta_i ~ half-t_nu(0,1) multiplying lambda_i. nu = 1 gives the horseshoe
// (horseshoe+ for the plus variant).
struct PriorSpec {
  double nu = 1.0;
  bool plus_variant = false;
  double intercept_sd = 5.0;

  void validate() const;
};

struct ShrinkageProfile {
  Eigen::VectorXd grid;     // kappa values in (0,1)
  Eigen::VectorXd density;  // prior density of kappa at the grid points
};

double half_student_t_pdf(double x, double nu);

// Density of the shrinkage coefficient kappa = 1/(1 + lambda^2) when
// lambda ~ half-t_nu(0,1), by change of variables lambda(kappa) =
// sqrt(1/kappa - 1). For nu = 1 this is the Beta(1/2,1/2) density.
double shrinkage_density(double kappa, double nu);

// Evaluates shrinkage_density on the open grid kappa_j = (j + 1/2)/grid_size.
// Endpoints are excluded because the nu = 1 density is unbounded there.
ShrinkageProfile shrinkage_profile(double nu, int grid_size);

// Forward samples of kappa from the prior; for the plus variant
// kappa = 1/(1 + lambda^2 eta^2) with both scales half-t_nu.
Eigen::VectorXd sample_kappa_prior(double nu, bool plus, int count, std::uint64_t seed);

}  // namespace projsel
