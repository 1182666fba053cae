#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace projsel {

// Per-column location/scale used to map raw predictors to standardized ones:
// standardized = (raw - mean) / sd.
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

struct Dataset {
  Eigen::MatrixXd X;               // n x m predictors, no constant column
  Eigen::VectorXd y;               // n responses
  std::vector<std::string> names;  // m predictor labels
  std::optional<Standardization> standardization;  // raw -> current X transform
  std::size_t dropped_rows = 0;    // incomplete rows removed while loading

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index m() const { return X.cols(); }
};

struct Split {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
  std::uint64_t seed = 0;
};

struct FoldAssignment {
  int k = 0;
  std::vector<int> fold_of;  // length n, values in 0..k-1
  std::uint64_t seed = 0;
};

// Reads a delimited numeric table (comma or whitespace, header row required).
// Empty cells and `?` are missing-value markers; rows containing any missing
// value are dropped and counted in Dataset::dropped_rows.
Dataset load_csv(const std::string& path, const std::string& target_name);
Dataset load_csv(const std::string& path, Eigen::Index target_index);

// Column means and sample standard deviations (n-1 denominator) of ds.X.
Standardization column_stats(const Dataset& ds);

// Centers and scales every predictor column; throws if a column is constant.
// Standardization metadata composes, so the stored stats always map the raw
// predictors to the current ones.
Dataset standardize(const Dataset& ds);

// Applies a fixed transform (e.g. training-set stats to a test set).
Dataset apply_standardization(const Dataset& ds, const Standardization& st);

// Replaces y by log(y); throws (naming the row) on a nonpositive response.
Dataset log_transform_response(const Dataset& ds);

Split random_split(const Dataset& ds, Eigen::Index n_train, std::uint64_t seed);

FoldAssignment assign_folds(Eigen::Index n, int k, std::uint64_t seed);

Dataset take_rows(const Dataset& ds, const std::vector<Eigen::Index>& rows);

}  // namespace projsel
