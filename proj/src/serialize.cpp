#include "projsel/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace projsel {

namespace {

using nlohmann::json;

std::vector<double> to_vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace

std::string format_sig(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

nlohmann::json search_path_json(const SearchPath& path,
                                const std::vector<std::string>& names) {
  json j;
  j["order"] = path.order;
  std::vector<std::string> sel;
  for (int idx : path.order) {
    sel.push_back(idx >= 0 && static_cast<std::size_t>(idx) < names.size()
                      ? names[static_cast<std::size_t>(idx)]
                      : "x" + std::to_string(idx));
  }
  j["names"] = sel;
  j["discrepancy_trace"] = to_vec(path.discrepancy_trace);
  j["truncated"] = path.truncated;
  return j;
}

nlohmann::json cv_report_json(const CvReport& rep, const std::vector<std::string>& names) {
  json j;
  j["K"] = rep.k;
  j["sizes"] = rep.mean_curve.sizes;
  json folds = json::array();
  for (std::size_t f = 0; f < rep.per_fold.size(); ++f) {
    json jf;
    jf["fold"] = f;
    jf["n_eval"] = rep.per_fold[f].n_eval;
    jf["full_mlpd"] = rep.per_fold[f].full_mlpd;
    jf["full_mse"] = rep.per_fold[f].full_mse;
    jf["delta_mlpd"] = to_vec(rep.per_fold[f].delta_mlpd);
    jf["delta_mse"] = to_vec(rep.per_fold[f].delta_mse);
    if (f < rep.per_fold_paths.size()) {
      jf["search"] = search_path_json(rep.per_fold_paths[f], names);
    }
    folds.push_back(std::move(jf));
  }
  j["folds"] = std::move(folds);
  j["mean"] = {{"delta_mlpd", to_vec(rep.mean_curve.delta_mlpd)},
               {"delta_mse", to_vec(rep.mean_curve.delta_mse)}};
  // normal approximation on fold means, labeled as such
  j["interval95"] = {{"kind", "normal approximation across folds"},
                     {"delta_mlpd_lo", to_vec(rep.mlpd_lo)},
                     {"delta_mlpd_hi", to_vec(rep.mlpd_hi)},
                     {"delta_mse_lo", to_vec(rep.mse_lo)},
                     {"delta_mse_hi", to_vec(rep.mse_hi)}};
  return j;
}

nlohmann::json diagnostics_json(const DrawSet& dr) {
  json j;
  j["draws"] = dr.num_draws();
  j["predictors"] = dr.num_predictors();
  j["chains"] = dr.meta.chains;
  j["warmup"] = dr.meta.warmup;
  j["seed"] = dr.meta.seed;
  j["prior"] = {{"nu", dr.meta.prior.nu},
                {"plus_variant", dr.meta.prior.plus_variant},
                {"intercept_sd", dr.meta.prior.intercept_sd}};
  j["rhat"] = to_vec(dr.meta.rhat);
  j["max_rhat"] = dr.meta.rhat.size() ? dr.meta.rhat.maxCoeff() : 0.0;
  j["warnings"] = dr.meta.warnings;
  j["seconds"] = dr.meta.seconds;
  return j;
}

void write_json(const nlohmann::json& j, const std::string& path) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_curve_csv(const PerformanceCurve& pc, const std::string& path) {
  auto out = open_out(path);
  out << "size,delta_mlpd,delta_mse\n";
  for (std::size_t j = 0; j < pc.sizes.size(); ++j) {
    out << pc.sizes[j] << ',' << format_sig(pc.delta_mlpd(static_cast<Eigen::Index>(j)))
        << ',' << format_sig(pc.delta_mse(static_cast<Eigen::Index>(j))) << "\n";
  }
}

void write_cv_curves_csv(const CvReport& rep, const std::string& path) {
  auto out = open_out(path);
  out << "fold,size,delta_mlpd,delta_mse\n";
  for (std::size_t f = 0; f < rep.per_fold.size(); ++f) {
    const auto& pc = rep.per_fold[f];
    for (std::size_t j = 0; j < pc.sizes.size(); ++j) {
      out << f << ',' << pc.sizes[j] << ','
          << format_sig(pc.delta_mlpd(static_cast<Eigen::Index>(j))) << ','
          << format_sig(pc.delta_mse(static_cast<Eigen::Index>(j))) << "\n";
    }
  }
}

void write_profile_csv(const Eigen::VectorXd& grid, const Eigen::VectorXd& density,
                       const std::string& path) {
  auto out = open_out(path);
  out << "kappa,density\n";
  for (Eigen::Index j = 0; j < grid.size(); ++j) {
    out << format_sig(grid(j)) << ',' << format_sig(density(j)) << "\n";
  }
}

void save_dataset(const Dataset& ds, const std::string& stem) {
  json j;
  j["n"] = ds.n();
  j["m"] = ds.m();
  j["names"] = ds.names;
  j["dropped_rows"] = ds.dropped_rows;
  if (ds.standardization) {
    j["standardization"] = {{"mean", to_vec(ds.standardization->mean)},
                            {"sd", to_vec(ds.standardization->sd)}};
  }
  j["matrix_file"] = stem + ".txt";
  write_json(j, stem + ".json");

  auto out = open_out(stem + ".txt");
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    for (Eigen::Index c = 0; c < ds.m(); ++c) {
      out << format_sig(ds.X(i, c)) << ' ';
    }
    out << format_sig(ds.y(i)) << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + stem + ".txt");
}

Dataset load_dataset(const std::string& stem) {
  std::ifstream jin(stem + ".json");
  if (!jin) throw std::runtime_error("cannot read file: " + stem + ".json");
  json j = json::parse(jin);
  Dataset ds;
  ds.names = j.at("names").get<std::vector<std::string>>();
  ds.dropped_rows = j.value("dropped_rows", std::size_t{0});
  const Eigen::Index n = j.at("n").get<Eigen::Index>();
  const Eigen::Index m = j.at("m").get<Eigen::Index>();
  if (j.contains("standardization")) {
    Standardization st;
    auto mean = j["standardization"].at("mean").get<std::vector<double>>();
    auto sd = j["standardization"].at("sd").get<std::vector<double>>();
    st.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    st.sd = Eigen::Map<Eigen::VectorXd>(sd.data(), static_cast<Eigen::Index>(sd.size()));
    ds.standardization = std::move(st);
  }

  std::ifstream min(stem + ".txt");
  if (!min) throw std::runtime_error("cannot read file: " + stem + ".txt");
  ds.X.resize(n, m);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < m; ++c) {
      if (!(min >> ds.X(i, c))) throw std::runtime_error("matrix file truncated: " + stem);
    }
    if (!(min >> ds.y(i))) throw std::runtime_error("matrix file truncated: " + stem);
  }
  return ds;
}

}  // namespace projsel
