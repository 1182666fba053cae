#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "projsel/dataset.hpp"
#include "projsel/evaluate.hpp"
#include "projsel/priors.hpp"
#include "projsel/sampler.hpp"
#include "projsel/search.hpp"

namespace projsel {

// decimal text with 17 significant digits (lossless double round-trip)
std::string format_sig(double v);

nlohmann::json search_path_json(const SearchPath& path,
                                const std::vector<std::string>& names);
nlohmann::json cv_report_json(const CvReport& rep, const std::vector<std::string>& names);
nlohmann::json diagnostics_json(const DrawSet& dr);

void write_json(const nlohmann::json& j, const std::string& path);

// tidy CSV, columns: size, delta_mlpd, delta_mse
void write_curve_csv(const PerformanceCurve& pc, const std::string& path);
// tidy CSV, columns: fold, size, delta_mlpd, delta_mse
void write_cv_curves_csv(const CvReport& rep, const std::string& path);
// two-column CSV: kappa, density
void write_profile_csv(const Eigen::VectorXd& grid, const Eigen::VectorXd& density,
                       const std::string& path);

// JSON sidecar (names, standardization, drop count) plus a numeric matrix
// file with X and y (last column), for reproducible reruns.
void save_dataset(const Dataset& ds, const std::string& stem);
Dataset load_dataset(const std::string& stem);

}  // namespace projsel
