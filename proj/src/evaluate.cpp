#include "projsel/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "projsel/rng.hpp"

namespace projsel {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

void check_moments(const PredictiveMoments& mom, Eigen::Index n) {
  if (mom.mean.rows() != n) {
    throw std::invalid_argument("metric: moment rows do not match held-out points");
  }
  if (mom.mean.cols() != mom.var.size() || mom.var.size() < 1) {
    throw std::invalid_argument("metric: need at least one draw");
  }
}

}  // namespace

double mlpd(const Eigen::VectorXd& y, const PredictiveMoments& mom) {
  const Eigen::Index n = y.size();
  const Eigen::Index S = mom.var.size();
  check_moments(mom, n);
  if ((mom.var.array() <= 0.0).any()) {
    throw std::invalid_argument("mlpd: zero or negative predictive variance draw");
  }

  Eigen::VectorXd half_log_var = 0.5 * mom.var.array().log();
  double total = 0.0;
  Eigen::VectorXd logp(S);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index s = 0; s < S; ++s) {
      const double r = y(i) - mom.mean(i, s);
      logp(s) = -0.5 * kLogTwoPi - half_log_var(s) - 0.5 * r * r / mom.var(s);
    }
    const double mx = logp.maxCoeff();
    total += mx + std::log((logp.array() - mx).exp().sum()) - std::log(double(S));
  }
  return total / double(n);
}

double mse(const Eigen::VectorXd& y, const PredictiveMoments& mom) {
  check_moments(mom, y.size());
  const Eigen::VectorXd point = mom.mean.rowwise().mean();
  return (y - point).squaredNorm() / double(y.size());
}

PerformanceCurve curve(const Dataset& train, const Dataset& test, const DrawSet& dr,
                       const SearchPath& path) {
  if (train.m() != test.m() || train.m() != dr.num_predictors()) {
    throw std::invalid_argument("curve: predictor counts disagree");
  }
  const PredictiveMoments full = predictive_moments(test.X, dr);
  const double mlpd_full = mlpd(test.y, full);
  const double mse_full = mse(test.y, full);

  const int L = static_cast<int>(path.order.size());
  PerformanceCurve pc;
  pc.n_eval = test.n();
  pc.full_mlpd = mlpd_full;
  pc.full_mse = mse_full;
  pc.delta_mlpd.resize(L + 1);
  pc.delta_mse.resize(L + 1);
  ProjectionContext ctx(train, dr);
  for (int j = 0; j <= L; ++j) {
    pc.sizes.push_back(j);
    Submodel sub;
    sub.indices.assign(path.order.begin(), path.order.begin() + j);
    std::sort(sub.indices.begin(), sub.indices.end());
    const ProjectionResult pr = ctx.project(sub);
    const PredictiveMoments mom = predictive_moments(test.X, pr);
    pc.delta_mlpd(j) = mlpd(test.y, mom) - mlpd_full;
    pc.delta_mse(j) = mse(test.y, mom) - mse_full;
  }
  return pc;
}

CvReport cross_validate(const Dataset& ds, const PriorSpec& prior,
                        const SamplerConfig& cfg, int k, int max_vars,
                        std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross_validate: K must be >= 2");
  const Eigen::Index n = ds.n();
  if (max_vars < 1 || max_vars > ds.m()) {
    throw std::invalid_argument("cross_validate: max_vars must be in [1, m]");
  }
  const FoldAssignment fa = assign_folds(n, k, derive_seed(seed, "folds", 0));

  CvReport rep;
  rep.k = k;
  rep.per_fold.resize(static_cast<std::size_t>(k));
  rep.per_fold_paths.resize(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    std::vector<Eigen::Index> train_rows, test_rows;
    for (Eigen::Index i = 0; i < n; ++i) {
      (fa.fold_of[static_cast<std::size_t>(i)] == f ? test_rows : train_rows).push_back(i);
    }
    if (train_rows.size() <= 2) {
      throw std::invalid_argument("cross_validate: fold " + std::to_string(f) +
                                  " leaves too few rows for sampling");
    }
    Dataset train = take_rows(ds, train_rows);
    Dataset test = take_rows(ds, test_rows);
    const Standardization st = column_stats(train);
    train = apply_standardization(train, st);
    test = apply_standardization(test, st);

    SamplerConfig fold_cfg = cfg;
    fold_cfg.seed = derive_seed(seed, "fold-fit", static_cast<std::uint64_t>(f));
    const DrawSet dr = fit(train, prior, fold_cfg);
    const SearchPath path = forward_search(train, dr, max_vars);
    if (static_cast<int>(path.order.size()) != max_vars) {
      throw std::runtime_error("cross_validate: search truncated in fold " +
                               std::to_string(f));
    }
    rep.per_fold[static_cast<std::size_t>(f)] = curve(train, test, dr, path);
    rep.per_fold_paths[static_cast<std::size_t>(f)] = path;
  }

  const int L = max_vars;
  rep.mean_curve.n_eval = n;
  rep.mean_curve.delta_mlpd = Eigen::VectorXd::Zero(L + 1);
  rep.mean_curve.delta_mse = Eigen::VectorXd::Zero(L + 1);
  for (int j = 0; j <= L; ++j) rep.mean_curve.sizes.push_back(j);
  for (const auto& pc : rep.per_fold) {
    rep.mean_curve.delta_mlpd += pc.delta_mlpd;
    rep.mean_curve.delta_mse += pc.delta_mse;
    rep.mean_curve.full_mlpd += pc.full_mlpd;
    rep.mean_curve.full_mse += pc.full_mse;
  }
  rep.mean_curve.delta_mlpd /= double(k);
  rep.mean_curve.delta_mse /= double(k);
  rep.mean_curve.full_mlpd /= double(k);
  rep.mean_curve.full_mse /= double(k);

  rep.mlpd_lo.resize(L + 1);
  rep.mlpd_hi.resize(L + 1);
  rep.mse_lo.resize(L + 1);
  rep.mse_hi.resize(L + 1);
  for (int j = 0; j <= L; ++j) {
    double s_mlpd = 0.0, s_mse = 0.0;
    for (const auto& pc : rep.per_fold) {
      s_mlpd += std::pow(pc.delta_mlpd(j) - rep.mean_curve.delta_mlpd(j), 2);
      s_mse += std::pow(pc.delta_mse(j) - rep.mean_curve.delta_mse(j), 2);
    }
    const double se_mlpd = std::sqrt(s_mlpd / double(k - 1) / double(k));
    const double se_mse = std::sqrt(s_mse / double(k - 1) / double(k));
    rep.mlpd_lo(j) = rep.mean_curve.delta_mlpd(j) - 1.96 * se_mlpd;
    rep.mlpd_hi(j) = rep.mean_curve.delta_mlpd(j) + 1.96 * se_mlpd;
    rep.mse_lo(j) = rep.mean_curve.delta_mse(j) - 1.96 * se_mse;
    rep.mse_hi(j) = rep.mean_curve.delta_mse(j) + 1.96 * se_mse;
  }
  return rep;
}

}  // namespace projsel
