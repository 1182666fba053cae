#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "projsel/dataset.hpp"
#include "projsel/sampler.hpp"

namespace projsel {

// A predictor subset, as strictly increasing 0-based column indices into X.
// The intercept is part of every submodel and is never listed.
struct Submodel {
  std::vector<int> indices;

  void validate(Eigen::Index m) const;
  std::string label() const;
};

struct ProjectionResult {
  Submodel submodel;
  Eigen::MatrixXd w_perp;      // S x (k+1), intercept first
  Eigen::VectorXd sigma2_perp; // S
  Eigen::VectorXd kl;          // S, per-draw divergence
  double discrepancy = 0.0;    // mean of kl
};

struct ProjectedDraw {
  Eigen::VectorXd w_perp;
  double sigma2_perp = 0.0;
  double kl = 0.0;
};

// Projects one posterior draw onto a submodel: the least-squares fit of the
// submodel design to the full model's fitted values, plus the induced noise
// inflation. `design` is the full n x (m+1) matrix including the constant
// column.
ProjectedDraw project_draw(const Eigen::MatrixXd& design, const Eigen::VectorXd& w,
                           double sigma2, const Submodel& sub);

// Shares the full-model fitted values F = design * weights^T across all
// submodel projections of one (dataset, draws) pair. Each projection builds
// a single orthogonal factorization of the submodel design and solves all S
// right-hand sides against it.
class ProjectionContext {
 public:
  ProjectionContext(const Eigen::MatrixXd& X, const Eigen::MatrixXd& weights,
                    const Eigen::VectorXd& sigma2);
  ProjectionContext(const Dataset& ds, const DrawSet& dr);

  ProjectionResult project(const Submodel& sub) const;

  // discrepancy only; empty when the submodel design is rank deficient
  std::optional<double> try_discrepancy(const Submodel& sub) const;

  Eigen::Index num_predictors() const { return design_.cols() - 1; }
  Eigen::Index num_draws() const { return fit_.cols(); }

 private:
  std::optional<ProjectionResult> solve(const Submodel& sub) const;

  Eigen::MatrixXd design_;  // n x (m+1), constant column first
  Eigen::MatrixXd fit_;     // n x S
  Eigen::VectorXd sigma2_;  // S
};

ProjectionResult project_drawset(const Dataset& ds, const DrawSet& dr, const Submodel& sub);

// Per-draw Gaussian predictive moments on new predictor rows (full m columns;
// the projected overload gathers its submodel's columns internally).
struct PredictiveMoments {
  Eigen::MatrixXd mean;  // rows x S
  Eigen::VectorXd var;   // S, shared across rows for one draw
};
PredictiveMoments predictive_moments(const Eigen::Ref<const Eigen::MatrixXd>& X_new,
                                     const DrawSet& dr);
PredictiveMoments predictive_moments(const Eigen::Ref<const Eigen::MatrixXd>& X_new,
                                     const ProjectionResult& pr);

// Interchange-format text with a leading `# submodel: ...` line.
void export_projection(const ProjectionResult& pr, const std::string& path);

}  // namespace projsel
