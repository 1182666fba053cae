#include "projsel/priors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "projsel/rng.hpp"

namespace projsel {

void PriorSpec::validate() const {
  if (!(nu >= 1.0)) throw std::invalid_argument("prior: nu must be >= 1");
  if (!(intercept_sd > 0.0)) throw std::invalid_argument("prior: intercept_sd must be > 0");
}

double half_student_t_pdf(double x, double nu) {
  if (x < 0.0) return 0.0;
  const double lognorm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                         0.5 * std::log(nu * std::numbers::pi);
  return 2.0 * std::exp(lognorm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

double shrinkage_density(double kappa, double nu) {
  if (!(nu >= 1.0)) throw std::invalid_argument("shrinkage_density: nu must be >= 1");
  if (!(kappa > 0.0 && kappa < 1.0)) {
    throw std::invalid_argument("shrinkage_density: kappa must lie in (0,1)");
  }
  const double lambda = std::sqrt(1.0 / kappa - 1.0);
  // |d lambda / d kappa| = 1 / (2 kappa^2 lambda)
  return half_student_t_pdf(lambda, nu) / (2.0 * kappa * kappa * lambda);
}

ShrinkageProfile shrinkage_profile(double nu, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("shrinkage_profile: grid_size must be >= 2");
  ShrinkageProfile pr;
  pr.grid.resize(grid_size);
  pr.density.resize(grid_size);
  for (int j = 0; j < grid_size; ++j) {
    const double kappa = (j + 0.5) / grid_size;
    pr.grid(j) = kappa;
    pr.density(j) = shrinkage_density(kappa, nu);
  }
  return pr;
}

Eigen::VectorXd sample_kappa_prior(double nu, bool plus, int count, std::uint64_t seed) {
  if (!(nu >= 1.0)) throw std::invalid_argument("sample_kappa_prior: nu must be >= 1");
  if (count < 1) throw std::invalid_argument("sample_kappa_prior: count must be >= 1");
  auto g = make_stream(seed, "kappa-prior");
  Eigen::VectorXd kappa(count);
  for (int s = 0; s < count; ++s) {
    const double lambda = draw_half_student_t(g, nu);
    double scale2 = lambda * lambda;
    if (plus) {
      const double eta = draw_half_student_t(g, nu);
      scale2 *= eta * eta;
    }
    kappa(s) = 1.0 / (1.0 + scale2);
  }
  return kappa;
}

}  // namespace projsel
