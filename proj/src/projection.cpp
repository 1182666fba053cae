#include "projsel/projection.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace projsel {

namespace {

constexpr double kRankTolerance = 1e-10;

Eigen::MatrixXd with_constant_column(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd d(X.rows(), X.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(X.cols()) = X;
  return d;
}

// constant column plus the selected predictor columns of the full design
Eigen::MatrixXd gather(const Eigen::MatrixXd& design, const Submodel& sub) {
  Eigen::MatrixXd d(design.rows(), static_cast<Eigen::Index>(sub.indices.size()) + 1);
  d.col(0) = design.col(0);
  for (std::size_t j = 0; j < sub.indices.size(); ++j) {
    d.col(static_cast<Eigen::Index>(j) + 1) = design.col(sub.indices[j] + 1);
  }
  return d;
}

bool rank_ok(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr, Eigen::Index k) {
  const auto r = qr.matrixQR().diagonal().head(k).cwiseAbs();
  return r.minCoeff() > kRankTolerance * r.maxCoeff() && r.maxCoeff() > 0.0;
}

}  // namespace

void Submodel::validate(Eigen::Index m) const {
  int prev = -1;
  for (int idx : indices) {
    if (idx <= prev) {
      throw std::invalid_argument("submodel indices must be strictly increasing");
    }
    if (idx < 0 || idx >= m) {
      throw std::invalid_argument("submodel index " + std::to_string(idx) +
                                  " out of range for m = " + std::to_string(m));
    }
    prev = idx;
  }
}

std::string Submodel::label() const {
  std::string s = "{";
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (j) s += ", ";
    s += std::to_string(indices[j]);
  }
  return s + "}";
}

ProjectionContext::ProjectionContext(const Eigen::MatrixXd& X,
                                     const Eigen::MatrixXd& weights,
                                     const Eigen::VectorXd& sigma2)
    : design_(with_constant_column(X)) {
  if (weights.cols() != design_.cols()) {
    throw std::invalid_argument("projection: weights have " +
                                std::to_string(weights.cols()) +
                                " columns, expected " + std::to_string(design_.cols()));
  }
  if (sigma2.size() != weights.rows()) {
    throw std::invalid_argument("projection: sigma2 length does not match draw count");
  }
  if ((sigma2.array() <= 0.0).any()) {
    throw std::invalid_argument("projection: sigma2 must be strictly positive");
  }
  fit_ = design_ * weights.transpose();
  sigma2_ = sigma2;
}

ProjectionContext::ProjectionContext(const Dataset& ds, const DrawSet& dr)
    : ProjectionContext(ds.X, dr.weights, dr.sigma2) {}

std::optional<ProjectionResult> ProjectionContext::solve(const Submodel& sub) const {
  sub.validate(num_predictors());
  const Eigen::Index n = design_.rows();
  const Eigen::Index k1 = static_cast<Eigen::Index>(sub.indices.size()) + 1;

  const Eigen::MatrixXd d = gather(design_, sub);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d);
  if (!rank_ok(qr, k1)) return std::nullopt;

  ProjectionResult out;
  out.submodel = sub;
  Eigen::MatrixXd wp = qr.solve(fit_);              // (k+1) x S
  const Eigen::MatrixXd resid = fit_ - d * wp;      // n x S
  const Eigen::Index S = fit_.cols();
  out.w_perp = wp.transpose();
  out.sigma2_perp.resize(S);
  out.kl.resize(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    const double q = resid.col(s).squaredNorm() / static_cast<double>(n);
    out.sigma2_perp(s) = sigma2_(s) + q;
    out.kl(s) = 0.5 * std::log1p(q / sigma2_(s));
  }
  out.discrepancy = out.kl.mean();
  return out;
}

ProjectionResult ProjectionContext::project(const Submodel& sub) const {
  auto res = solve(sub);
  if (!res) {
    throw std::runtime_error("submodel design is rank deficient: " + sub.label());
  }
  return std::move(*res);
}

std::optional<double> ProjectionContext::try_discrepancy(const Submodel& sub) const {
  auto res = solve(sub);
  if (!res) return std::nullopt;
  return res->discrepancy;
}

ProjectedDraw project_draw(const Eigen::MatrixXd& design, const Eigen::VectorXd& w,
                           double sigma2, const Submodel& sub) {
  if (w.size() != design.cols()) {
    throw std::invalid_argument("project_draw: weight length does not match design");
  }
  if (!(sigma2 > 0.0)) throw std::invalid_argument("project_draw: sigma2 must be > 0");
  sub.validate(design.cols() - 1);

  const Eigen::Index n = design.rows();
  const Eigen::MatrixXd d = gather(design, sub);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d);
  if (!rank_ok(qr, d.cols())) {
    throw std::runtime_error("submodel design is rank deficient: " + sub.label());
  }
  const Eigen::VectorXd f = design * w;
  ProjectedDraw out;
  out.w_perp = qr.solve(f);
  const double q = (f - d * out.w_perp).squaredNorm() / static_cast<double>(n);
  out.sigma2_perp = sigma2 + q;
  out.kl = 0.5 * std::log1p(q / sigma2);
  return out;
}

ProjectionResult project_drawset(const Dataset& ds, const DrawSet& dr, const Submodel& sub) {
  return ProjectionContext(ds, dr).project(sub);
}

PredictiveMoments predictive_moments(const Eigen::Ref<const Eigen::MatrixXd>& X_new,
                                     const DrawSet& dr) {
  if (X_new.cols() != dr.num_predictors()) {
    throw std::invalid_argument("predictive_moments: predictor count mismatch");
  }
  PredictiveMoments mom;
  mom.mean = with_constant_column(X_new) * dr.weights.transpose();
  mom.var = dr.sigma2;
  return mom;
}

PredictiveMoments predictive_moments(const Eigen::Ref<const Eigen::MatrixXd>& X_new,
                                     const ProjectionResult& pr) {
  const Eigen::Index k = static_cast<Eigen::Index>(pr.submodel.indices.size());
  if (X_new.cols() <= (k == 0 ? -1 : pr.submodel.indices.back())) {
    throw std::invalid_argument("predictive_moments: predictor count mismatch");
  }
  Eigen::MatrixXd d(X_new.rows(), k + 1);
  d.col(0).setOnes();
  for (Eigen::Index j = 0; j < k; ++j) {
    d.col(j + 1) = X_new.col(pr.submodel.indices[static_cast<std::size_t>(j)]);
  }
  PredictiveMoments mom;
  mom.mean = d * pr.w_perp.transpose();
  mom.var = pr.sigma2_perp;
  return mom;
}

void export_projection(const ProjectionResult& pr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "# submodel:";
  for (int idx : pr.submodel.indices) out << ' ' << idx;
  out << "\n";
  const Eigen::Index S = pr.w_perp.rows();
  const Eigen::Index k1 = pr.w_perp.cols();
  out << "sigma2";
  for (Eigen::Index j = 0; j < k1; ++j) out << ",w" << j;
  out << "\n";
  char buf[32];
  for (Eigen::Index s = 0; s < S; ++s) {
    std::snprintf(buf, sizeof(buf), "%.17g", pr.sigma2_perp(s));
    out << buf;
    for (Eigen::Index j = 0; j < k1; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", pr.w_perp(s, j));
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace projsel
