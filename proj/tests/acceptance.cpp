// End-to-end acceptance suite. Each criterion prints one pass/fail line with
// the measured quantity; the process exits with the number of failures.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "projsel/dataset.hpp"
#include "projsel/evaluate.hpp"
#include "projsel/priors.hpp"
#include "projsel/projection.hpp"
#include "projsel/sampler.hpp"
#include "projsel/search.hpp"
#include "projsel/serialize.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace projsel;

namespace {

struct Outcome {
  bool pass = true;
  bool skipped = false;
  std::string detail;
};

struct Check {
  Outcome& out;
  void operator()(bool ok, const std::string& what) {
    if (!ok) {
      out.pass = false;
      out.detail += (out.detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Eigen::MatrixXd design_of(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd d(X.rows(), X.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(X.cols()) = X;
  return d;
}

// ---- criterion 1: closed-form projection vs numeric minimization ----------

Outcome projection_oracle_equivalence() {
  Outcome out;
  Check check{out};
  std::mt19937_64 g(101);
  std::normal_distribution<double> nd;
  double worst_w = 0.0, worst_s = 0.0, worst_kl = 0.0;
  int instances = 0;
  const auto t0 = std::chrono::steady_clock::now();
  while (instances < 100) {
    const Eigen::Index n = 8 + static_cast<Eigen::Index>(g() % 13);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(g() % 5);
    const Eigen::MatrixXd X = testsup::random_matrix(n, m, g());
    Submodel sub;
    for (int j = 0; j < m; ++j) {
      if (g() % 2 == 0) sub.indices.push_back(j);
    }
    const Eigen::MatrixXd d = design_of(X);
    Eigen::MatrixXd sub_design(n, static_cast<Eigen::Index>(sub.indices.size()) + 1);
    sub_design.col(0).setOnes();
    for (std::size_t j = 0; j < sub.indices.size(); ++j) {
      sub_design.col(static_cast<Eigen::Index>(j) + 1) = X.col(sub.indices[j]);
    }
    for (int rep = 0; rep < 2; ++rep) {
      Eigen::VectorXd w(m + 1);
      for (Eigen::Index j = 0; j <= m; ++j) w(j) = nd(g);
      const double sigma2 = 0.5 + 1.5 * std::uniform_real_distribution<double>()(g);
      const ProjectedDraw pd = project_draw(d, w, sigma2, sub);
      const auto ref = oracles::minimize_projection_objective(sub_design, d * w, sigma2);
      worst_w = std::max(worst_w, (pd.w_perp - ref.w).norm() / (ref.w.norm() + 1e-12));
      worst_s = std::max(worst_s, std::abs(pd.sigma2_perp - ref.sigma2) / ref.sigma2);
      worst_kl = std::max(worst_kl, std::abs(pd.kl - ref.kl) / std::max(ref.kl, 1e-9));
    }
    ++instances;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  check(worst_w < 1e-6, "w_perp rel err " + fmt(worst_w));
  check(worst_s < 1e-6, "sigma2_perp rel err " + fmt(worst_s));
  check(worst_kl < 1e-6, "kl rel err " + fmt(worst_kl));
  check(secs < 60.0, "runtime " + fmt(secs) + " s");
  out.detail = "max rel err w " + fmt(worst_w) + ", sigma2 " + fmt(worst_s) + ", kl " +
               fmt(worst_kl) + ", " + fmt(secs) + " s" +
               (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// ---- criterion 2: identity projection and nested monotonicity -------------

Outcome identity_and_monotonicity() {
  Outcome out;
  Check check{out};
  std::mt19937_64 g(202);
  double worst_identity = 0.0, worst_gap = -1.0;
  int pairs = 0;
  while (pairs < 1000) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(g() % 5);
    Dataset ds;
    ds.X = testsup::random_matrix(10 + static_cast<Eigen::Index>(g() % 8), m, g());
    ds.y = Eigen::VectorXd::Zero(ds.X.rows());
    const DrawSet dr = testsup::random_drawset(10, m, g());
    ProjectionContext ctx(ds, dr);

    Submodel full;
    for (int j = 0; j < m; ++j) full.indices.push_back(j);
    worst_identity = std::max(worst_identity, ctx.project(full).kl.maxCoeff());

    for (int rep = 0; rep < 20 && pairs < 1000; ++rep, ++pairs) {
      Submodel a, b;
      for (int j = 0; j < m; ++j) {
        const auto r = g() % 3;
        if (r == 0) {
          a.indices.push_back(j);
          b.indices.push_back(j);
        } else if (r == 1) {
          b.indices.push_back(j);
        }
      }
      const Eigen::VectorXd kl_a = ctx.project(a).kl;
      const Eigen::VectorXd kl_b = ctx.project(b).kl;
      worst_gap = std::max(worst_gap, (kl_b - kl_a).maxCoeff());
    }
  }
  check(worst_identity <= 1e-12, "full-set kl " + fmt(worst_identity));
  check(worst_gap <= 1e-12, "monotonicity gap " + fmt(worst_gap));
  out.detail = "full-set kl <= " + fmt(worst_identity) + ", worst nested gap " +
               fmt(worst_gap) + (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// ---- criterion 3: shrinkage density exactness ------------------------------

Outcome shrinkage_exactness() {
  Outcome out;
  Check check{out};
  double worst = 0.0;
  for (int j = 1; j <= 99; ++j) {
    const double k = j / 100.0;
    worst = std::max(worst,
                     std::abs(shrinkage_density(k, 1.0) - oracles::beta_half_half_pdf(k)));
  }
  check(worst < 1e-9, "nu=1 max abs err " + fmt(worst));
  double worst_int = 0.0;
  for (double nu : {1.0, 2.0, 3.0, 5.0}) {
    const double total =
        oracles::kappa_integral([&](double k) { return shrinkage_density(k, nu); });
    worst_int = std::max(worst_int, std::abs(total - 1.0));
  }
  check(worst_int < 1e-3, "integral err " + fmt(worst_int));
  out.detail = "nu=1 max abs err " + fmt(worst) + ", worst |integral-1| " +
               fmt(worst_int) + (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// ---- criterion 4: Gibbs conjugate subcase ----------------------------------

Outcome sampler_conjugate_check() {
  Outcome out;
  Check check{out};
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 g(404);
  double worst_z = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const Eigen::Index n = 20 + static_cast<Eigen::Index>(g() % 31);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(g() % 5);
    Eigen::VectorXd w_true = testsup::random_matrix(m, 1, g());
    Dataset ds = testsup::make_regression(n, m, w_true, 0.2, 0.8, g());

    FixedScales fs;
    fs.lambda = Eigen::VectorXd::Constant(m, 1.0) +
                testsup::random_matrix(m, 1, g()).cwiseAbs() * 0.5;
    fs.tau = 1.5;
    fs.sigma2 = 0.64;
    PriorSpec prior;
    SamplerConfig cfg;
    cfg.chains = 2;
    cfg.iterations_per_chain = 1100;
    cfg.warmup = 100;
    cfg.seed = 8000 + static_cast<std::uint64_t>(inst);
    const DrawSet dr = fit_fixed_scales(ds, prior, cfg, fs);

    Eigen::VectorXd prior_sd(m + 1);
    prior_sd(0) = prior.intercept_sd;
    for (Eigen::Index j = 0; j < m; ++j) prior_sd(j + 1) = fs.lambda(j) * fs.tau;
    const Eigen::MatrixXd d = design_of(ds.X);
    const Eigen::MatrixXd a =
        d.transpose() * d / fs.sigma2 +
        Eigen::MatrixXd(prior_sd.array().square().inverse().matrix().asDiagonal());
    const Eigen::MatrixXd cov = a.ldlt().solve(Eigen::MatrixXd::Identity(m + 1, m + 1));
    const Eigen::VectorXd mean_ref = a.ldlt().solve(d.transpose() * ds.y / fs.sigma2);

    const Eigen::VectorXd mean = dr.weights.colwise().mean();
    for (Eigen::Index j = 0; j <= m; ++j) {
      const double mcse = std::sqrt(cov(j, j) / double(dr.num_draws()));
      worst_z = std::max(worst_z, std::abs(mean(j) - mean_ref(j)) / mcse);
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  check(worst_z < 3.0, "worst |z| " + fmt(worst_z));
  check(secs < 120.0, "runtime " + fmt(secs) + " s");
  out.detail = "worst posterior-mean |z| " + fmt(worst_z) + " (2000 draws, 10 instances), " +
               fmt(secs) + " s" + (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// ---- criterion 5: sampler prior vs Beta(1/2,1/2) ---------------------------

Outcome sampler_prior_check() {
  Outcome out;
  Check check{out};
  PriorSpec prior;
  prior.nu = 1.0;
  const Eigen::MatrixXd kappa = prior_predictive_check(prior, 1, 100000, 505);
  std::vector<double> xs(kappa.data(), kappa.data() + kappa.size());
  const double d = oracles::ks_statistic(xs, oracles::beta_half_half_cdf);
  // one-sample KS critical value at significance 0.01 for n = 1e5
  const double crit = 1.62762 / std::sqrt(100000.0);
  check(d < crit, "KS " + fmt(d) + " >= " + fmt(crit));
  out.detail = "KS distance " + fmt(d) + " < " + fmt(crit) +
               (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// ---- criterion 6: greedy first step vs exhaustive --------------------------

Outcome greedy_correctness() {
  Outcome out;
  Check check{out};
  std::mt19937_64 g(606);
  int mismatches = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(g() % 9);
    Dataset ds;
    ds.X = testsup::random_matrix(12 + static_cast<Eigen::Index>(g() % 10), m, g());
    ds.y = Eigen::VectorXd::Zero(ds.X.rows());
    const DrawSet dr = testsup::random_drawset(8, m, g());
    ProjectionContext ctx(ds, dr);
    if (forward_search(ctx, 1).order[0] != exhaustive_best(ctx, 1).indices[0]) {
      ++mismatches;
    }
  }
  check(mismatches == 0, std::to_string(mismatches) + " first-step mismatches");

  Dataset ds = testsup::sparse_benchmark(60, 12, 4, 3.0, 607);
  ds = standardize(ds);
  SamplerConfig cfg;
  cfg.chains = 2;
  cfg.iterations_per_chain = 300;
  cfg.warmup = 100;
  cfg.seed = 11;
  const DrawSet dr = fit(ds, PriorSpec{3.0}, cfg);
  const SearchPath p1 = forward_search(ds, dr, 12);
  const SearchPath p2 = forward_search(ds, dr, 12);
  check(p1.order == p2.order, "path not deterministic");
  check((p1.discrepancy_trace - p2.discrepancy_trace).cwiseAbs().maxCoeff() == 0.0,
        "trace not deterministic");
  out.detail = "50/50 first steps match exhaustive minimum; full path deterministic" +
               (out.detail.empty() ? std::string{} : " | " + out.detail);
  return out;
}

// ---- criterion 7: synthetic cross-validated selection ----------------------

Outcome synthetic_cv_benchmark() {
  Outcome out;
  Check check{out};
  const auto t0 = std::chrono::steady_clock::now();

  Dataset ds = testsup::sparse_benchmark(300, 50, 10, 3.0, 777);
  ds = standardize(ds);
  PriorSpec prior;
  prior.nu = 3.0;
  SamplerConfig cfg;  // 4 chains x 1000, half warmup
  const int max_vars = 20;
  const CvReport rep = cross_validate(ds, prior, cfg, 10, max_vars, 20240501);

  // first size at which the mean curve comes within 0.01 of zero
  int reached = -1;
  for (int j = 0; j <= 15; ++j) {
    if (std::abs(rep.mean_curve.delta_mlpd(j)) < 0.01) {
      reached = j;
      break;
    }
  }
  check(reached >= 0, "mean dMLPD never within 0.01 of 0 by 15 variables");

  const double mse_full = rep.mean_curve.full_mse;
  const double mse_at = reached >= 0 ? std::abs(rep.mean_curve.delta_mse(reached))
                                     : std::abs(rep.mean_curve.delta_mse(15));
  check(mse_at < 0.05 * mse_full,
        "|mean dMSE| " + fmt(mse_at) + " vs 5% of full " + fmt(0.05 * mse_full));

  int good_folds = 0;
  for (const auto& path : rep.per_fold_paths) {
    int relevant_early = 0;
    for (int pos = 0; pos < 12; ++pos) {
      if (path.order[static_cast<std::size_t>(pos)] < 10) ++relevant_early;
    }
    if (relevant_early >= 8) ++good_folds;
  }
  check(good_folds >= 8, "only " + std::to_string(good_folds) +
                             "/10 folds rank the relevant block early");

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  check(secs < 900.0, "runtime " + fmt(secs) + " s");
  out.detail = "dMLPD within 0.01 at size " + std::to_string(reached) + " (" +
               fmt(reached >= 0 ? rep.mean_curve.delta_mlpd(reached) : 0.0) +
               "), |dMSE|/full there " + fmt(mse_at / mse_full) +
               ", early-relevant folds " + std::to_string(good_folds) + "/10, " +
               fmt(secs) + " s" + (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// ---- criterion 8: optional Crime-dataset shape check ------------------------

Outcome crime_dataset_check() {
  Outcome out;
  const std::string raw_path = std::string(PROJSEL_DATA_DIR) + "/communities.data";
  if (!std::filesystem::exists(raw_path)) {
    out.skipped = true;
    out.detail = "UCI Crime data not present at " + raw_path;
    return out;
  }
  Check check{out};

  // headerless UCI format: 5 non-predictive columns, then 122 predictors and
  // the target; drop incomplete columns, then incomplete rows
  std::ifstream in(raw_path);
  std::vector<std::vector<std::string>> cells;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(tok);
    cells.push_back(std::move(row));
  }
  const std::size_t ncol = cells.front().size();
  std::vector<bool> keep(ncol, true);
  for (std::size_t j = 0; j < 5; ++j) keep[j] = false;  // state..fold
  for (const auto& row : cells) {
    for (std::size_t j = 5; j < ncol; ++j) {
      if (row[j] == "?") keep[j] = false;
    }
  }
  keep[ncol - 1] = true;  // target stays regardless

  const std::filesystem::path tmp =
      std::filesystem::temp_directory_path() / "projsel_crime.csv";
  {
    std::ofstream outf(tmp);
    bool first = true;
    for (std::size_t j = 0; j < ncol; ++j) {
      if (!keep[j]) continue;
      outf << (first ? "" : ",") << (j == ncol - 1 ? "target" : "c" + std::to_string(j));
      first = false;
    }
    outf << "\n";
    for (const auto& row : cells) {
      first = true;
      for (std::size_t j = 0; j < ncol; ++j) {
        if (!keep[j]) continue;
        outf << (first ? "" : ",") << row[j];
        first = false;
      }
      outf << "\n";
    }
  }

  Dataset ds = load_csv(tmp.string(), "target");
  std::filesystem::remove(tmp);
  const bool positive = (ds.y.array() > 0.0).all();
  if (positive) ds = log_transform_response(ds);

  const Split sp = random_split(ds, 1000, 4040);
  Dataset train = take_rows(ds, sp.train);
  Dataset test = take_rows(ds, sp.test);
  const Standardization st = column_stats(train);
  train = apply_standardization(train, st);
  test = apply_standardization(test, st);

  PriorSpec prior;
  prior.nu = 3.0;
  SamplerConfig cfg;
  cfg.seed = 4041;
  const DrawSet dr = fit(train, prior, cfg);
  const SearchPath path = forward_search(train, dr, 20);
  const PerformanceCurve pc = curve(train, test, dr, path);
  const double d20 = std::abs(pc.delta_mlpd(20));
  check(d20 < 0.05, "|dMLPD(20)| " + fmt(d20));
  out.detail = "n=" + std::to_string(ds.n()) + ", m=" + std::to_string(ds.m()) +
               ", |dMLPD(20)| " + fmt(d20) + (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// ---- criterion 9: metric reference equivalence ------------------------------

Outcome metric_reference_equivalence() {
  Outcome out;
  Check check{out};
  std::mt19937_64 g(909);
  std::uniform_real_distribution<double> ud(0.2, 3.0);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(g() % 6);
    const Eigen::Index s = 1 + static_cast<Eigen::Index>(g() % 8);
    PredictiveMoments mom;
    mom.mean = testsup::random_matrix(n, s, g());
    mom.var.resize(s);
    for (Eigen::Index j = 0; j < s; ++j) mom.var(j) = ud(g);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = nd(g);

    double ref_mlpd = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double avg = 0.0;
      for (Eigen::Index t = 0; t < s; ++t) {
        const double r = y(i) - mom.mean(i, t);
        avg += std::exp(-0.5 * r * r / mom.var(t)) /
               std::sqrt(2.0 * oracles::kPi * mom.var(t));
      }
      ref_mlpd += std::log(avg / double(s));
    }
    ref_mlpd /= double(n);
    double ref_mse = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double point = 0.0;
      for (Eigen::Index t = 0; t < s; ++t) point += mom.mean(i, t);
      point /= double(s);
      ref_mse += (y(i) - point) * (y(i) - point);
    }
    ref_mse /= double(n);

    worst = std::max(worst, std::abs(mlpd(y, mom) - ref_mlpd));
    worst = std::max(worst, std::abs(mse(y, mom) - ref_mse));
  }
  check(worst < 1e-12, "max abs err " + fmt(worst));
  out.detail = "max abs deviation " + fmt(worst) +
               (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

// ---- criterion 10: interchange round-trip -----------------------------------

Outcome interchange_round_trip() {
  Outcome out;
  Check check{out};
  testsup::TempDir tmp("acc_draws");
  Dataset ds = testsup::sparse_benchmark(50, 6, 2, 3.0, 1010);
  ds = standardize(ds);
  PriorSpec prior;
  prior.nu = 1.0;
  prior.plus_variant = true;
  SamplerConfig cfg;
  cfg.chains = 2;
  cfg.iterations_per_chain = 200;
  cfg.warmup = 100;
  cfg.seed = 3;
  const DrawSet dr = fit(ds, prior, cfg);
  export_draws(dr, tmp.path("d.csv").string());
  const DrawSet back = import_draws(tmp.path("d.csv").string(), ds.m());

  double worst = 0.0;
  for (Eigen::Index s = 0; s < dr.num_draws(); ++s) {
    worst = std::max(worst,
                     std::abs(back.sigma2(s) - dr.sigma2(s)) / std::abs(dr.sigma2(s)));
    for (Eigen::Index j = 0; j < dr.weights.cols(); ++j) {
      if (dr.weights(s, j) != 0.0) {
        worst = std::max(worst, std::abs(back.weights(s, j) - dr.weights(s, j)) /
                                    std::abs(dr.weights(s, j)));
      }
    }
  }
  check(worst <= 1e-15, "round-trip rel err " + fmt(worst));

  Submodel sub;
  sub.indices = {0, 3};
  const ProjectionResult pa = project_drawset(ds, dr, sub);
  const ProjectionResult pb = project_drawset(ds, back, sub);
  const bool identical = pa.discrepancy == pb.discrepancy &&
                         (pa.kl - pb.kl).cwiseAbs().maxCoeff() == 0.0 &&
                         (pa.w_perp - pb.w_perp).cwiseAbs().maxCoeff() == 0.0;
  check(identical, "projection from imported draws differs");
  out.detail = "round-trip rel err " + fmt(worst) + ", projections identical" +
               (out.detail.empty() ? "" : " | " + out.detail);
  return out;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> entries = {
      {1, "projection oracle equivalence", projection_oracle_equivalence},
      {2, "identity and monotonicity", identity_and_monotonicity},
      {3, "shrinkage density exactness", shrinkage_exactness},
      {4, "sampler conjugate check", sampler_conjugate_check},
      {5, "prior implementation check", sampler_prior_check},
      {6, "greedy correctness", greedy_correctness},
      {7, "synthetic cross-validated benchmark", synthetic_cv_benchmark},
      {8, "Crime dataset shape check (optional)", crime_dataset_check},
      {9, "MLPD/MSE reference equivalence", metric_reference_equivalence},
      {10, "interchange round-trip", interchange_round_trip},
  };

  int failures = 0;
  for (const auto& e : entries) {
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out.pass = false;
      out.detail = std::string("exception: ") + ex.what();
    }
    const char* tag = out.skipped ? "SKIP" : (out.pass ? "PASS" : "FAIL");
    if (!out.pass && !out.skipped) ++failures;
    std::printf("[%s] %2d %s: %s\n", tag, e.id, e.name, out.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
