// Command-line front end: preprocess -> fit -> select -> evaluate, plus
// shrinkage-profile export. Every command is deterministic under --seed and
// writes a manifest beside its outputs.

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <Eigen/Core>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "projsel/dataset.hpp"
#include "projsel/evaluate.hpp"
#include "projsel/priors.hpp"
#include "projsel/projection.hpp"
#include "projsel/rng.hpp"
#include "projsel/sampler.hpp"
#include "projsel/search.hpp"
#include "projsel/serialize.hpp"
#include "projsel/version.hpp"

namespace {

using nlohmann::json;

struct DataOptions {
  std::string path;
  std::string target;
  int target_index = -1;
  bool standardize = false;
  bool log_response = false;
};

struct RunOptions {
  DataOptions data;
  projsel::PriorSpec prior;
  projsel::SamplerConfig sampler;
  std::string draws_path;
  long n_train = 0;  // 0 = no train/test split
  int folds = 0;
  int max_vars = 0;  // 0 = min(m, 50)
  std::uint64_t seed = 0;
  std::string outdir;
  std::string config_path;
  std::vector<double> nus;
  int grid = 999;
  int samples = 100000;
};

// Flat key=value config support. Keys are long option names without the
// leading dashes; values already given on the command line win. The expanded
// arguments are spliced in right after the subcommand token.
std::vector<std::string> expand_config_args(const std::vector<std::string>& args) {
  std::string config_file;
  std::size_t subcmd_pos = std::string::npos;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (subcmd_pos == std::string::npos && !args[i].empty() && args[i][0] != '-') {
      subcmd_pos = i;
    }
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_file = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_file = args[i].substr(9);
    }
  }
  if (config_file.empty() || subcmd_pos == std::string::npos) return args;

  std::ifstream in(config_file);
  if (!in) throw std::runtime_error("cannot read config file: " + config_file);
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    const std::string flag = "--" + key;
    const bool on_cli = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (on_cli) continue;
    injected.push_back(flag + "=" + value);
  }
  std::vector<std::string> out(args.begin(), args.begin() + subcmd_pos + 1);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + subcmd_pos + 1, args.end());
  return out;
}

std::filesystem::path resolve_outdir(const std::string& flag) {
  std::string dir = flag;
  if (dir.empty()) {
    if (const char* env = std::getenv("PROJSEL_OUTDIR")) dir = env;
  }
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
         "." + std::to_string(EIGEN_MINOR_VERSION);
}

void write_manifest(const CLI::App& cmd, const RunOptions& opt,
                    const std::filesystem::path& outdir, const std::string& name) {
  json j;
  j["command"] = cmd.get_name();
  j["projsel_version"] = projsel::kVersion;
  j["eigen_version"] = eigen_version();
  j["seed"] = opt.seed;
  json cfg;
  for (const CLI::Option* o : cmd.get_options()) {
    if (o->get_lnames().empty()) continue;
    const std::string key = o->get_lnames().front();
    if (key == "help") continue;
    cfg[key] = o->count() ? json(o->results()) : json(o->get_default_str());
  }
  j["options"] = std::move(cfg);
  projsel::write_json(j, (outdir / name).string());
}

projsel::Dataset load_data(const DataOptions& d) {
  if (d.target_index < 0 && d.target.empty()) {
    throw std::invalid_argument("need --target or --target-index");
  }
  projsel::Dataset ds = d.target_index >= 0
                            ? projsel::load_csv(d.path, Eigen::Index(d.target_index))
                            : projsel::load_csv(d.path, d.target);
  if (ds.dropped_rows > 0) {
    std::cerr << "note: dropped " << ds.dropped_rows << " incomplete rows\n";
  }
  if (d.log_response) ds = projsel::log_transform_response(ds);
  return ds;
}

struct PreparedData {
  projsel::Dataset train;
  std::optional<projsel::Dataset> test;
};

// Applies the optional train/test split; when standardizing, test predictors
// are mapped with the training-set statistics.
PreparedData prepare(const RunOptions& opt) {
  projsel::Dataset ds = load_data(opt.data);
  PreparedData out;
  if (opt.n_train > 0) {
    const projsel::Split sp = projsel::random_split(
        ds, Eigen::Index(opt.n_train), projsel::derive_seed(opt.seed, "split", 0));
    out.train = projsel::take_rows(ds, sp.train);
    out.test = projsel::take_rows(ds, sp.test);
  } else {
    out.train = std::move(ds);
  }
  if (opt.data.standardize) {
    const projsel::Standardization st = projsel::column_stats(out.train);
    out.train = projsel::apply_standardization(out.train, st);
    if (out.test) out.test = projsel::apply_standardization(*out.test, st);
  }
  return out;
}

int resolve_max_vars(int requested, Eigen::Index m) {
  if (requested <= 0) return static_cast<int>(std::min<Eigen::Index>(m, 50));
  if (requested > m) {
    std::cerr << "warning: max-vars " << requested << " clamped to m = " << m << "\n";
    return static_cast<int>(m);
  }
  return requested;
}

void print_warnings(const projsel::DrawSet& dr) {
  for (const auto& w : dr.meta.warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_fit(const CLI::App& cmd, RunOptions& opt) {
  const auto outdir = resolve_outdir(opt.outdir);
  const PreparedData pd = prepare(opt);
  opt.sampler.seed = projsel::derive_seed(opt.seed, "sampler", 0);
  const projsel::DrawSet dr = projsel::fit(pd.train, opt.prior, opt.sampler);
  print_warnings(dr);
  projsel::export_draws(dr, (outdir / "draws.csv").string());
  projsel::write_json(projsel::diagnostics_json(dr), (outdir / "diagnostics.json").string());
  projsel::save_dataset(pd.train, (outdir / "train_data").string());
  write_manifest(cmd, opt, outdir, "fit_manifest.json");
  std::cout << "wrote " << (outdir / "draws.csv").string() << " (" << dr.num_draws()
            << " draws)\n";
  return 0;
}

int cmd_select(const CLI::App& cmd, RunOptions& opt) {
  const auto outdir = resolve_outdir(opt.outdir);
  const PreparedData pd = prepare(opt);
  const projsel::DrawSet dr = projsel::import_draws(opt.draws_path, pd.train.m());
  const int max_vars = resolve_max_vars(opt.max_vars, pd.train.m());
  const projsel::SearchPath path = projsel::forward_search(pd.train, dr, max_vars);
  if (path.truncated) {
    std::cerr << "warning: search truncated, remaining candidates rank deficient\n";
  }
  projsel::write_json(projsel::search_path_json(path, pd.train.names),
                      (outdir / "search_path.json").string());
  if (pd.test) {
    const projsel::PerformanceCurve pc = projsel::curve(pd.train, *pd.test, dr, path);
    projsel::write_curve_csv(pc, (outdir / "curve.csv").string());
  }
  write_manifest(cmd, opt, outdir, "select_manifest.json");
  std::cout << "selected";
  for (int idx : path.order) std::cout << ' ' << idx;
  std::cout << "\n";
  return 0;
}

int cmd_cv(const CLI::App& cmd, RunOptions& opt) {
  const auto outdir = resolve_outdir(opt.outdir);
  projsel::Dataset ds = load_data(opt.data);
  if (opt.data.standardize) ds = projsel::standardize(ds);
  const int max_vars = resolve_max_vars(opt.max_vars, ds.m());
  const projsel::CvReport rep = projsel::cross_validate(ds, opt.prior, opt.sampler,
                                                        opt.folds, max_vars, opt.seed);
  projsel::write_json(projsel::cv_report_json(rep, ds.names),
                      (outdir / "cv_report.json").string());
  projsel::write_cv_curves_csv(rep, (outdir / "cv_curves.csv").string());
  write_manifest(cmd, opt, outdir, "cv_manifest.json");
  std::cout << "wrote " << (outdir / "cv_report.json").string() << "\n";
  return 0;
}

int cmd_shrinkage(const CLI::App& cmd, RunOptions& opt) {
  const auto outdir = resolve_outdir(opt.outdir);
  for (double nu : opt.nus) {
    if (!(nu >= 1.0)) throw std::invalid_argument("nu must be >= 1");
    char tag[32];
    std::snprintf(tag, sizeof(tag), "%g", nu);
    const std::string file = std::string("shrinkage_nu") + tag +
                             (opt.prior.plus_variant ? "plus" : "") + ".csv";
    if (!opt.prior.plus_variant) {
      const projsel::ShrinkageProfile pr = projsel::shrinkage_profile(nu, opt.grid);
      projsel::write_profile_csv(pr.grid, pr.density, (outdir / file).string());
    } else {
      // no closed form for the plus variant; histogram of prior samples
      const Eigen::VectorXd kappa = projsel::sample_kappa_prior(
          nu, true, opt.samples, projsel::derive_seed(opt.seed, "shrinkage", 0));
      Eigen::VectorXd grid(opt.grid), density = Eigen::VectorXd::Zero(opt.grid);
      for (int b = 0; b < opt.grid; ++b) grid(b) = (b + 0.5) / opt.grid;
      for (Eigen::Index s = 0; s < kappa.size(); ++s) {
        int b = static_cast<int>(kappa(s) * opt.grid);
        b = std::min(std::max(b, 0), opt.grid - 1);
        density(b) += 1.0;
      }
      density *= double(opt.grid) / double(kappa.size());
      projsel::write_profile_csv(grid, density, (outdir / file).string());
    }
    std::cout << "wrote " << (outdir / file).string() << "\n";
  }
  write_manifest(cmd, opt, outdir, "shrinkage_manifest.json");
  return 0;
}

void add_data_options(CLI::App* cmd, RunOptions& opt, bool required) {
  auto* d = cmd->add_option("--data", opt.data.path, "input table (CSV or whitespace)");
  if (required) d->required();
  cmd->add_option("--target", opt.data.target, "target column name");
  cmd->add_option("--target-index", opt.data.target_index, "target column index (0-based)");
  cmd->add_flag("--standardize", opt.data.standardize,
                "center and scale predictors (training stats applied to test data)");
  cmd->add_flag("--log-response", opt.data.log_response, "replace y by log(y)");
}

void add_prior_options(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--nu", opt.prior.nu, "degrees of freedom of the local-scale prior")
      ->check(CLI::Range(1.0, 1e6));
  cmd->add_flag("--plus", opt.prior.plus_variant, "second level of local scales");
  cmd->add_option("--intercept-sd", opt.prior.intercept_sd, "intercept prior sd")
      ->check(CLI::PositiveNumber);
}

void add_sampler_options(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--chains", opt.sampler.chains, "MCMC chains")->check(CLI::PositiveNumber);
  cmd->add_option("--iters", opt.sampler.iterations_per_chain, "iterations per chain")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--warmup", opt.sampler.warmup, "warmup iterations discarded per chain");
  cmd->add_option("--thin", opt.sampler.thin, "keep every thin-th draw")
      ->check(CLI::PositiveNumber);
}

void add_common(CLI::App* cmd, RunOptions& opt) {
  cmd->add_option("--seed", opt.seed, "master seed; all streams derive from it");
  cmd->add_option("--outdir", opt.outdir,
                  "output directory (default: $PROJSEL_OUTDIR or .)");
  cmd->add_option("--config", opt.config_path, "flat key=value config file; flags win");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projection predictive variable selection for linear Gaussian regression"};
  app.require_subcommand(1);
  RunOptions opt;

  CLI::App* fit = app.add_subcommand("fit", "sample the full model posterior");
  add_data_options(fit, opt, true);
  add_prior_options(fit, opt);
  add_sampler_options(fit, opt);
  fit->add_option("--n-train", opt.n_train, "fit on a random training subset of this size");
  add_common(fit, opt);

  CLI::App* sel = app.add_subcommand("select", "forward search over posterior draws");
  add_data_options(sel, opt, true);
  sel->add_option("--draws", opt.draws_path, "draw interchange file")->required();
  sel->add_option("--max-vars", opt.max_vars, "search depth (default min(m, 50))");
  sel->add_option("--n-train", opt.n_train,
                  "recreate the fit's train/test split and score the path on the test part");
  add_common(sel, opt);

  CLI::App* cv = app.add_subcommand("cv", "cross-validated fit + search + evaluation");
  add_data_options(cv, opt, true);
  add_prior_options(cv, opt);
  add_sampler_options(cv, opt);
  cv->add_option("--folds", opt.folds, "number of folds K")->required()
      ->check(CLI::Range(2, 1 << 20));
  cv->add_option("--max-vars", opt.max_vars, "search depth (default min(m, 50))");
  add_common(cv, opt);

  CLI::App* shr = app.add_subcommand("shrinkage", "shrinkage-coefficient prior profiles");
  shr->add_option("--nu", opt.nus, "one or more degrees of freedom")->required();
  shr->add_option("--grid", opt.grid, "grid points in (0,1)")->check(CLI::Range(2, 100000000));
  shr->add_flag("--plus", opt.prior.plus_variant, "plus variant (Monte-Carlo histogram)");
  shr->add_option("--samples", opt.samples, "Monte-Carlo sample count for the plus variant")
      ->check(CLI::PositiveNumber);
  add_common(shr, opt);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config_args(args);
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (fit->parsed()) return cmd_fit(*fit, opt);
    if (sel->parsed()) return cmd_select(*sel, opt);
    if (cv->parsed()) return cmd_cv(*cv, opt);
    if (shr->parsed()) return cmd_shrinkage(*shr, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
