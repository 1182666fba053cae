#include "projsel/sampler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "projsel/parallel.hpp"
#include "projsel/rng.hpp"

namespace projsel {

namespace {

// keeps variance draws away from 0/inf without touching realistic values
double clamp_var(double v) { return std::clamp(v, 1e-24, 1e24); }

Eigen::MatrixXd build_design(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd d(X.rows(), X.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(X.cols()) = X;
  return d;
}

struct ChainState {
  Eigen::VectorXd w;        // m+1, intercept first
  double sigma2 = 1.0;
  Eigen::VectorXd lambda2;  // m
  Eigen::VectorXd psi;      // m auxiliaries for lambda
  Eigen::VectorXd eta2;     // m (plus variant)
  Eigen::VectorXd phi;      // m auxiliaries for eta
  double tau2 = 1.0;
  double xi = 1.0;
};

ChainState init_state(Eigen::Index m, const Eigen::VectorXd& y) {
  ChainState st;
  st.w = Eigen::VectorXd::Zero(m + 1);
  st.lambda2 = Eigen::VectorXd::Ones(m);
  st.psi = Eigen::VectorXd::Ones(m);
  st.eta2 = Eigen::VectorXd::Ones(m);
  st.phi = Eigen::VectorXd::Ones(m);
  st.tau2 = 1.0;
  st.xi = 1.0;
  const double vy =
      (y.array() - y.mean()).square().sum() / std::max<double>(1.0, double(y.size() - 1));
  st.sigma2 = vy > 0.0 ? vy : 1.0;
  return st;
}

void draw_weights(ChainState& st, const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                  const PriorSpec& prior, std::mt19937_64& g) {
  const Eigen::Index p = design.cols();
  const Eigen::Index m = p - 1;
  Eigen::VectorXd prior_sd(p);
  prior_sd(0) = prior.intercept_sd;
  for (Eigen::Index i = 0; i < m; ++i) {
    double v = st.lambda2(i) * st.tau2;
    if (prior.plus_variant) v *= st.eta2(i);
    prior_sd(i + 1) = std::sqrt(clamp_var(v));
  }
  const WeightConditional wc = weight_conditional(design, y, st.sigma2, prior_sd);
  Eigen::VectorXd z(p);
  for (Eigen::Index j = 0; j < p; ++j) z(j) = draw_normal(g);
  st.w = wc.mean + wc.noise_transform * z;
}

void sweep(ChainState& st, const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
           const PriorSpec& prior, std::mt19937_64& g) {
  const Eigen::Index n = design.rows();
  const Eigen::Index m = design.cols() - 1;
  const double nu = prior.nu;

  draw_weights(st, design, y, prior, g);

  // flat prior on sigma^2 gives an inverse-gamma conditional; proper for n > 2
  const double rss = (y - design * st.w).squaredNorm();
  st.sigma2 = clamp_var(draw_inv_gamma(g, 0.5 * double(n) - 1.0, 0.5 * rss));

  for (Eigen::Index i = 0; i < m; ++i) {
    const double wi2 = st.w(i + 1) * st.w(i + 1);
    const double e2 = prior.plus_variant ? st.eta2(i) : 1.0;
    st.lambda2(i) = clamp_var(
        draw_inv_gamma(g, 0.5 * (nu + 1.0), nu / st.psi(i) + wi2 / (2.0 * st.tau2 * e2)));
    st.psi(i) = clamp_var(draw_inv_gamma(g, 0.5 * (nu + 1.0), 1.0 + nu / st.lambda2(i)));
  }
  if (prior.plus_variant) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double wi2 = st.w(i + 1) * st.w(i + 1);
      st.eta2(i) = clamp_var(draw_inv_gamma(
          g, 0.5 * (nu + 1.0), nu / st.phi(i) + wi2 / (2.0 * st.tau2 * st.lambda2(i))));
      st.phi(i) = clamp_var(draw_inv_gamma(g, 0.5 * (nu + 1.0), 1.0 + nu / st.eta2(i)));
    }
  }

  // tau ~ half-Cauchy(0,1), i.e. the nu = 1 mixture
  double ssum = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double e2 = prior.plus_variant ? st.eta2(i) : 1.0;
    ssum += st.w(i + 1) * st.w(i + 1) / (st.lambda2(i) * e2);
  }
  st.tau2 = clamp_var(
      draw_inv_gamma(g, 0.5 * (double(m) + 1.0), 1.0 / st.xi + 0.5 * ssum));
  st.xi = clamp_var(draw_inv_gamma(g, 1.0, 1.0 + 1.0 / st.tau2));
}

struct ChainOutput {
  Eigen::MatrixXd weights;  // kept x (m+1)
  Eigen::VectorXd sigma2;
  Eigen::MatrixXd lambda;
  Eigen::VectorXd tau;
  Eigen::MatrixXd eta;
};

void check_inputs(const Dataset& ds) {
  if (ds.n() <= 2) throw std::invalid_argument("fit: need more than 2 rows");
  if (ds.m() < 1) throw std::invalid_argument("fit: need at least one predictor");
  const double vy = (ds.y.array() - ds.y.mean()).square().sum();
  if (!(vy > 0.0)) throw std::invalid_argument("fit: zero-variance response");
}

void warn_if_not_standardized(const Dataset& ds, std::vector<std::string>& warnings) {
  if (ds.n() < 2) return;
  const Standardization st = column_stats(ds);
  const double max_mean = st.mean.cwiseAbs().maxCoeff();
  const double max_sd_err = (st.sd.array() - 1.0).abs().maxCoeff();
  if (max_mean > 1e-6 || max_sd_err > 1e-3) {
    warnings.push_back("predictors do not look standardized (max |mean| = " +
                       std::to_string(max_mean) + ", max |sd-1| = " +
                       std::to_string(max_sd_err) + ")");
  }
}

DrawSet pool_chains(const std::vector<ChainOutput>& chains, Eigen::Index m,
                    const PriorSpec& prior, const SamplerConfig& cfg, bool with_scales) {
  const Eigen::Index kept = chains.front().weights.rows();
  const Eigen::Index S = kept * static_cast<Eigen::Index>(chains.size());
  DrawSet dr;
  dr.weights.resize(S, m + 1);
  dr.sigma2.resize(S);
  if (with_scales) {
    dr.lambda.resize(S, m);
    dr.tau.resize(S);
    if (prior.plus_variant) dr.eta.resize(S, m);
  }
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const Eigen::Index off = static_cast<Eigen::Index>(c) * kept;
    dr.weights.middleRows(off, kept) = chains[c].weights;
    dr.sigma2.segment(off, kept) = chains[c].sigma2;
    if (with_scales) {
      dr.lambda.middleRows(off, kept) = chains[c].lambda;
      dr.tau.segment(off, kept) = chains[c].tau;
      if (prior.plus_variant) dr.eta.middleRows(off, kept) = chains[c].eta;
    }
  }
  dr.meta.chains = cfg.chains;
  dr.meta.warmup = cfg.warmup;
  dr.meta.seed = cfg.seed;
  dr.meta.prior = prior;

  dr.meta.rhat.resize(m + 1);
  Eigen::MatrixXd by_chain(kept, static_cast<Eigen::Index>(chains.size()));
  for (Eigen::Index j = 0; j <= m; ++j) {
    for (std::size_t c = 0; c < chains.size(); ++c) {
      by_chain.col(static_cast<Eigen::Index>(c)) = chains[c].weights.col(j);
    }
    dr.meta.rhat(j) = split_rhat(by_chain);
  }
  for (Eigen::Index j = 0; j <= m; ++j) {
    if (!(dr.meta.rhat(j) < 1.05)) {
      dr.meta.warnings.push_back("split R-hat for weight " + std::to_string(j) + " is " +
                                 std::to_string(dr.meta.rhat(j)) + " (>= 1.05)");
    }
  }
  return dr;
}

std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void SamplerConfig::validate() const {
  if (chains < 1) throw std::invalid_argument("sampler: chains must be >= 1");
  if (thin < 1) throw std::invalid_argument("sampler: thin must be >= 1");
  if (warmup < 0 || warmup >= iterations_per_chain) {
    throw std::invalid_argument("sampler: warmup must satisfy 0 <= warmup < iterations");
  }
}

Eigen::Index SamplerConfig::num_draws() const {
  const int post = iterations_per_chain - warmup;
  return static_cast<Eigen::Index>(chains) * ((post + thin - 1) / thin);
}

WeightConditional weight_conditional(const Eigen::MatrixXd& design,
                                     const Eigen::VectorXd& y, double sigma2,
                                     const Eigen::VectorXd& prior_sd) {
  const Eigen::Index n = design.rows();
  const Eigen::Index p = design.cols();
  if (y.size() != n) throw std::invalid_argument("weight_conditional: size mismatch");
  if (prior_sd.size() != p || (prior_sd.array() <= 0.0).any()) {
    throw std::invalid_argument("weight_conditional: prior_sd must be positive, length p");
  }
  if (!(sigma2 > 0.0)) throw std::invalid_argument("weight_conditional: sigma2 must be > 0");

  const double sigma = std::sqrt(sigma2);
  Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(n + p, p);
  stacked.topRows(n) = design / sigma;
  stacked.bottomRows(p).diagonal() = prior_sd.cwiseInverse();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + p);
  rhs.head(n) = y / sigma;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(stacked);
  WeightConditional wc;
  wc.mean = qr.solve(rhs);
  // covariance factor: with stacked*P = Q*R, cov = P R^-1 R^-T P^T
  Eigen::MatrixXd rinv = qr.matrixQR()
                             .topLeftCorner(p, p)
                             .triangularView<Eigen::Upper>()
                             .solve(Eigen::MatrixXd::Identity(p, p));
  wc.noise_transform = qr.colsPermutation() * rinv;
  return wc;
}

double split_rhat(const Eigen::MatrixXd& draws_by_chain) {
  const Eigen::Index t = draws_by_chain.rows();
  const Eigen::Index c = draws_by_chain.cols();
  const Eigen::Index half = t / 2;
  if (half < 2) return std::numeric_limits<double>::quiet_NaN();

  const Eigen::Index segments = 2 * c;
  Eigen::VectorXd means(segments), vars(segments);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (int h = 0; h < 2; ++h) {
      const auto seg = draws_by_chain.col(j).segment(h == 0 ? 0 : t - half, half);
      const double mu = seg.mean();
      means(2 * j + h) = mu;
      vars(2 * j + h) = (seg.array() - mu).square().sum() / double(half - 1);
    }
  }
  const double w = vars.mean();
  if (!(w > 0.0)) return 1.0;
  const double grand = means.mean();
  const double b_over_n =
      (means.array() - grand).square().sum() / double(segments - 1);
  const double var_plus = (double(half - 1) / double(half)) * w + b_over_n;
  return std::sqrt(var_plus / w);
}

DrawSet fit(const Dataset& ds, const PriorSpec& prior, const SamplerConfig& cfg) {
  prior.validate();
  cfg.validate();
  check_inputs(ds);

  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index m = ds.m();
  const Eigen::MatrixXd design = build_design(ds.X);
  const int post = cfg.iterations_per_chain - cfg.warmup;
  const Eigen::Index kept = (post + cfg.thin - 1) / cfg.thin;

  std::vector<ChainOutput> chains(static_cast<std::size_t>(cfg.chains));
  parallel_for(chains.size(), [&](std::size_t c) {
    auto g = make_stream(cfg.seed, "chain", c);
    ChainState st = init_state(m, ds.y);
    ChainOutput& out = chains[c];
    out.weights.resize(kept, m + 1);
    out.sigma2.resize(kept);
    out.lambda.resize(kept, m);
    out.tau.resize(kept);
    if (prior.plus_variant) out.eta.resize(kept, m);
    Eigen::Index rec = 0;
    for (int it = 0; it < cfg.iterations_per_chain; ++it) {
      sweep(st, design, ds.y, prior, g);
      if (it >= cfg.warmup && (it - cfg.warmup) % cfg.thin == 0) {
        out.weights.row(rec) = st.w;
        out.sigma2(rec) = st.sigma2;
        out.lambda.row(rec) = st.lambda2.cwiseSqrt();
        out.tau(rec) = std::sqrt(st.tau2);
        if (prior.plus_variant) out.eta.row(rec) = st.eta2.cwiseSqrt();
        ++rec;
      }
    }
  });

  DrawSet dr = pool_chains(chains, m, prior, cfg, /*with_scales=*/true);
  warn_if_not_standardized(ds, dr.meta.warnings);
  dr.meta.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return dr;
}

DrawSet fit_fixed_scales(const Dataset& ds, const PriorSpec& prior,
                         const SamplerConfig& cfg, const FixedScales& fs) {
  prior.validate();
  cfg.validate();
  check_inputs(ds);
  const Eigen::Index m = ds.m();
  if (fs.lambda.size() != m || (fs.lambda.array() <= 0.0).any()) {
    throw std::invalid_argument("fit_fixed_scales: lambda must be positive, length m");
  }
  if (prior.plus_variant && (fs.eta.size() != m || (fs.eta.array() <= 0.0).any())) {
    throw std::invalid_argument("fit_fixed_scales: eta must be positive, length m");
  }
  if (!(fs.tau > 0.0) || !(fs.sigma2 > 0.0)) {
    throw std::invalid_argument("fit_fixed_scales: tau and sigma2 must be > 0");
  }

  const Eigen::MatrixXd design = build_design(ds.X);
  const int post = cfg.iterations_per_chain - cfg.warmup;
  const Eigen::Index kept = (post + cfg.thin - 1) / cfg.thin;

  std::vector<ChainOutput> chains(static_cast<std::size_t>(cfg.chains));
  parallel_for(chains.size(), [&](std::size_t c) {
    auto g = make_stream(cfg.seed, "chain", c);
    ChainState st = init_state(m, ds.y);
    st.lambda2 = fs.lambda.array().square();
    st.tau2 = fs.tau * fs.tau;
    if (prior.plus_variant) st.eta2 = fs.eta.array().square();
    st.sigma2 = fs.sigma2;
    ChainOutput& out = chains[c];
    out.weights.resize(kept, m + 1);
    out.sigma2.resize(kept);
    out.lambda.resize(kept, m);
    out.tau.resize(kept);
    if (prior.plus_variant) out.eta.resize(kept, m);
    Eigen::Index rec = 0;
    for (int it = 0; it < cfg.iterations_per_chain; ++it) {
      draw_weights(st, design, ds.y, prior, g);
      if (it >= cfg.warmup && (it - cfg.warmup) % cfg.thin == 0) {
        out.weights.row(rec) = st.w;
        out.sigma2(rec) = st.sigma2;
        out.lambda.row(rec) = st.lambda2.cwiseSqrt();
        out.tau(rec) = std::sqrt(st.tau2);
        if (prior.plus_variant) out.eta.row(rec) = st.eta2.cwiseSqrt();
        ++rec;
      }
    }
  });
  return pool_chains(chains, m, prior, cfg, /*with_scales=*/true);
}

Eigen::MatrixXd prior_predictive_check(const PriorSpec& prior, int m, int count,
                                       std::uint64_t seed) {
  prior.validate();
  if (m < 1) throw std::invalid_argument("prior_predictive_check: m must be >= 1");
  if (count < 1) throw std::invalid_argument("prior_predictive_check: count must be >= 1");
  auto g = make_stream(seed, "prior-predictive");
  const double nu = prior.nu;
  Eigen::MatrixXd kappa(count, m);
  for (int s = 0; s < count; ++s) {
    for (int i = 0; i < m; ++i) {
      // same auxiliary route the Gibbs sampler relies on
      const double psi = draw_inv_gamma(g, 0.5, 1.0);
      double scale2 = draw_inv_gamma(g, 0.5 * nu, nu / psi);
      if (prior.plus_variant) {
        const double phi = draw_inv_gamma(g, 0.5, 1.0);
        scale2 *= draw_inv_gamma(g, 0.5 * nu, nu / phi);
      }
      kappa(s, i) = 1.0 / (1.0 + scale2);
    }
  }
  return kappa;
}

void export_draws(const DrawSet& dr, const std::string& path) {
  const Eigen::Index S = dr.num_draws();
  const Eigen::Index m = dr.num_predictors();
  const bool scales = dr.lambda.rows() == S && dr.lambda.cols() == m && dr.tau.size() == S;
  const bool with_eta = scales && dr.eta.rows() == S && dr.eta.cols() == m;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "sigma2";
  for (Eigen::Index j = 0; j <= m; ++j) out << ",w" << j;
  if (scales) {
    for (Eigen::Index j = 1; j <= m; ++j) out << ",lambda" << j;
    out << ",tau";
    if (with_eta) {
      for (Eigen::Index j = 1; j <= m; ++j) out << ",eta" << j;
    }
  }
  out << "\n";
  for (Eigen::Index s = 0; s < S; ++s) {
    out << format_g17(dr.sigma2(s));
    for (Eigen::Index j = 0; j <= m; ++j) out << ',' << format_g17(dr.weights(s, j));
    if (scales) {
      for (Eigen::Index j = 0; j < m; ++j) out << ',' << format_g17(dr.lambda(s, j));
      out << ',' << format_g17(dr.tau(s));
      if (with_eta) {
        for (Eigen::Index j = 0; j < m; ++j) out << ',' << format_g17(dr.eta(s, j));
      }
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char ch : line) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == '\r') {
      if (!cur.empty()) toks.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) toks.push_back(cur);
  return toks;
}

double parse_num(const std::string& tok, Eigen::Index row) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size()) {
    throw std::runtime_error("draw file: bad number '" + tok + "' at row " +
                             std::to_string(row));
  }
  return v;
}

}  // namespace

DrawSet import_draws(const std::string& path, Eigen::Index m) {
  if (m < 1) throw std::invalid_argument("import_draws: m must be >= 1");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty draw file: " + path);
  const std::vector<std::string> header = tokenize(line);

  const std::size_t base = static_cast<std::size_t>(m) + 2;  // sigma2, w0..wm
  std::vector<std::string> expect;
  expect.push_back("sigma2");
  for (Eigen::Index j = 0; j <= m; ++j) expect.push_back("w" + std::to_string(j));
  bool scales = false, with_eta = false;
  if (header.size() == base) {
    // weights only
  } else if (header.size() == base + static_cast<std::size_t>(m) + 1) {
    scales = true;
  } else if (header.size() == base + 2 * static_cast<std::size_t>(m) + 1) {
    scales = with_eta = true;
  } else {
    throw std::runtime_error("draw file schema mismatch: " + std::to_string(header.size()) +
                             " columns is inconsistent with m = " + std::to_string(m));
  }
  if (scales) {
    for (Eigen::Index j = 1; j <= m; ++j) expect.push_back("lambda" + std::to_string(j));
    expect.push_back("tau");
    if (with_eta) {
      for (Eigen::Index j = 1; j <= m; ++j) expect.push_back("eta" + std::to_string(j));
    }
  }
  for (std::size_t j = 0; j < expect.size(); ++j) {
    if (header[j] != expect[j]) {
      throw std::runtime_error("draw file schema mismatch: expected column '" + expect[j] +
                               "', found '" + header[j] + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  Eigen::Index lineno = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++lineno;
    const std::vector<std::string> toks = tokenize(line);
    if (toks.size() != header.size()) {
      throw std::runtime_error("draw file: row " + std::to_string(lineno) + " has " +
                               std::to_string(toks.size()) + " columns, expected " +
                               std::to_string(header.size()));
    }
    std::vector<double> vals(toks.size());
    for (std::size_t j = 0; j < toks.size(); ++j) vals[j] = parse_num(toks[j], lineno);
    if (!(vals[0] > 0.0)) {
      throw std::runtime_error("draw file: nonpositive sigma2 at row " +
                               std::to_string(lineno));
    }
    for (std::size_t j = base; j < vals.size(); ++j) {
      if (!(vals[j] > 0.0)) {
        throw std::runtime_error("draw file: nonpositive scale at row " +
                                 std::to_string(lineno));
      }
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::runtime_error("draw file has no draws: " + path);

  const Eigen::Index S = static_cast<Eigen::Index>(rows.size());
  DrawSet dr;
  dr.weights.resize(S, m + 1);
  dr.sigma2.resize(S);
  if (scales) {
    dr.lambda.resize(S, m);
    dr.tau.resize(S);
    if (with_eta) dr.eta.resize(S, m);
  }
  for (Eigen::Index s = 0; s < S; ++s) {
    const auto& r = rows[static_cast<std::size_t>(s)];
    dr.sigma2(s) = r[0];
    for (Eigen::Index j = 0; j <= m; ++j) dr.weights(s, j) = r[static_cast<std::size_t>(j) + 1];
    if (scales) {
      for (Eigen::Index j = 0; j < m; ++j) {
        dr.lambda(s, j) = r[base + static_cast<std::size_t>(j)];
      }
      dr.tau(s) = r[base + static_cast<std::size_t>(m)];
      if (with_eta) {
        for (Eigen::Index j = 0; j < m; ++j) {
          dr.eta(s, j) = r[base + static_cast<std::size_t>(m) + 1 + static_cast<std::size_t>(j)];
        }
      }
    }
  }
  return dr;
}

}  // namespace projsel
