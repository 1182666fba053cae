#include "projsel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "projsel/rng.hpp"

namespace projsel {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line, bool comma) {
  std::vector<std::string> out;
  if (comma) {
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
    if (!line.empty() && line.back() == ',') out.emplace_back();
  } else {
    std::stringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
  }
  return out;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || p != cell.data() + cell.size()) {
    throw std::runtime_error("non-numeric cell '" + cell + "' at data row " +
                             std::to_string(row) + ", column " + std::to_string(col));
  }
  return v;
}

Dataset load_table(const std::string& path, Eigen::Index target,
                   const std::string& target_label) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);

  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty file: " + path);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const bool comma = header.find(',') != std::string::npos;
  std::vector<std::string> cols = split_fields(header, comma);
  const Eigen::Index ncol = static_cast<Eigen::Index>(cols.size());
  if (ncol < 2) throw std::runtime_error("need at least two columns in " + path);
  if (target < 0 || target >= ncol) {
    throw std::runtime_error("target column " + target_label + " not found in " + path);
  }

  std::vector<std::vector<double>> rows;
  std::size_t dropped = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++lineno;
    std::vector<std::string> cells = split_fields(line, comma);
    if (static_cast<Eigen::Index>(cells.size()) != ncol) {
      throw std::runtime_error("row " + std::to_string(lineno) + " has " +
                               std::to_string(cells.size()) + " fields, expected " +
                               std::to_string(ncol));
    }
    if (std::any_of(cells.begin(), cells.end(),
                    [](const std::string& c) { return is_missing(c); })) {
      ++dropped;
      continue;
    }
    std::vector<double> vals(ncol);
    for (Eigen::Index j = 0; j < ncol; ++j) {
      vals[j] = parse_cell(cells[j], lineno, static_cast<std::size_t>(j));
    }
    rows.push_back(std::move(vals));
  }

  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  if (n < 2) throw std::runtime_error("fewer than 2 complete rows in " + path);

  Dataset ds;
  ds.X.resize(n, ncol - 1);
  ds.y.resize(n);
  ds.dropped_rows = dropped;
  for (Eigen::Index j = 0, jx = 0; j < ncol; ++j) {
    if (j == target) continue;
    ds.names.push_back(cols[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < n; ++i) ds.X(i, jx) = rows[i][j];
    ++jx;
  }
  for (Eigen::Index i = 0; i < n; ++i) ds.y(i) = rows[i][target];
  return ds;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("empty file: " + path);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const bool comma = header.find(',') != std::string::npos;
  std::vector<std::string> cols = split_fields(header, comma);
  auto it = std::find(cols.begin(), cols.end(), target_name);
  if (it == cols.end()) {
    throw std::runtime_error("target column '" + target_name + "' not found in " + path);
  }
  return load_table(path, static_cast<Eigen::Index>(it - cols.begin()),
                    "'" + target_name + "'");
}

Dataset load_csv(const std::string& path, Eigen::Index target_index) {
  return load_table(path, target_index, std::to_string(target_index));
}

Standardization column_stats(const Dataset& ds) {
  const Eigen::Index n = ds.n();
  Standardization st;
  st.mean = ds.X.colwise().mean();
  Eigen::MatrixXd centered = ds.X.rowwise() - st.mean.transpose();
  st.sd = (centered.colwise().squaredNorm() / static_cast<double>(n - 1))
              .cwiseSqrt()
              .transpose();
  return st;
}

Dataset apply_standardization(const Dataset& ds, const Standardization& st) {
  if (st.mean.size() != ds.m() || st.sd.size() != ds.m()) {
    throw std::invalid_argument("standardization stats do not match predictor count");
  }
  for (Eigen::Index j = 0; j < ds.m(); ++j) {
    if (!(st.sd(j) > 0.0)) {
      throw std::invalid_argument("constant column '" + ds.names[static_cast<std::size_t>(j)] +
                                  "': standard deviation is zero");
    }
  }
  Dataset out = ds;
  out.X = (ds.X.rowwise() - st.mean.transpose()).array().rowwise() /
          st.sd.transpose().array();
  if (ds.standardization) {
    // compose so the stored stats still map raw -> current
    Standardization total;
    total.mean = ds.standardization->mean +
                 (ds.standardization->sd.array() * st.mean.array()).matrix();
    total.sd = (ds.standardization->sd.array() * st.sd.array()).matrix();
    out.standardization = std::move(total);
  } else {
    out.standardization = st;
  }
  return out;
}

Dataset standardize(const Dataset& ds) {
  if (ds.n() < 2) throw std::invalid_argument("standardize needs at least 2 rows");
  return apply_standardization(ds, column_stats(ds));
}

Dataset log_transform_response(const Dataset& ds) {
  Dataset out = ds;
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    if (!(ds.y(i) > 0.0)) {
      throw std::invalid_argument("nonpositive response at row " + std::to_string(i) +
                                  ": cannot take log");
    }
    out.y(i) = std::log(ds.y(i));
  }
  return out;
}

Split random_split(const Dataset& ds, Eigen::Index n_train, std::uint64_t seed) {
  const Eigen::Index n = ds.n();
  if (n_train < 1 || n_train >= n) {
    throw std::invalid_argument("n_train must be in [1, n); got " +
                                std::to_string(n_train) + " with n = " + std::to_string(n));
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  auto g = make_stream(seed, "random-split");
  std::shuffle(perm.begin(), perm.end(), g);
  Split sp;
  sp.seed = seed;
  sp.train.assign(perm.begin(), perm.begin() + n_train);
  sp.test.assign(perm.begin() + n_train, perm.end());
  return sp;
}

FoldAssignment assign_folds(Eigen::Index n, int k, std::uint64_t seed) {
  if (k < 2 || static_cast<Eigen::Index>(k) > n) {
    throw std::invalid_argument("fold count must be in [2, n]; got " + std::to_string(k));
  }
  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  fa.fold_of.resize(static_cast<std::size_t>(n));
  // balanced labels, then a seeded shuffle
  for (Eigen::Index i = 0; i < n; ++i) {
    fa.fold_of[static_cast<std::size_t>(i)] = static_cast<int>(i % k);
  }
  auto g = make_stream(seed, "assign-folds");
  std::shuffle(fa.fold_of.begin(), fa.fold_of.end(), g);
  return fa;
}

Dataset take_rows(const Dataset& ds, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.names = ds.names;
  out.standardization = ds.standardization;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), ds.m());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = ds.X.row(rows[i]);
    out.y(static_cast<Eigen::Index>(i)) = ds.y(rows[i]);
  }
  return out;
}

}  // namespace projsel
