#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "watt/error.hpp"

namespace watt {

// Dense row-major matrix of doubles. Covariates only; no linear algebra here.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_)
        throw Error(errc::length_mismatch, "ragged rows in covariate matrix");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_.data() + i * cols_, cols_);
  }

  const double* data() const noexcept { return data_.data(); }
  double* data() noexcept { return data_.data(); }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// Observed sample: binary treatment, real outcome, covariate matrix.
// Construct through validate(); all downstream code assumes the invariants.
struct Dataset {
  std::vector<int> z;               // 0/1 treatment indicators
  std::vector<double> y;            // outcomes
  Matrix X;                         // n x p covariates
  std::vector<std::string> names;   // p covariate labels

  std::size_t n() const noexcept { return z.size(); }
  std::size_t p() const noexcept { return X.cols(); }

  std::size_t n_treated() const {
    std::size_t k = 0;
    for (int zi : z) k += static_cast<std::size_t>(zi);
    return k;
  }

  bool operator==(const Dataset&) const = default;
};

inline Dataset validate(std::vector<int> z, std::vector<double> y, Matrix X,
                        std::vector<std::string> names = {}) {
  const std::size_t n = z.size();
  if (y.size() != n || X.rows() != n)
    throw Error(errc::length_mismatch, "z, y, X must have the same number of rows");
  if (n < 2) throw Error(errc::empty_group, "need at least 2 units");

  std::size_t treated = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (z[i] != 0 && z[i] != 1)
      throw Error(errc::invalid_argument, "treatment must be coded 0/1");
    treated += static_cast<std::size_t>(z[i]);
    if (!std::isfinite(y[i])) throw Error(errc::non_finite, "non-finite outcome");
  }
  if (treated == 0) throw Error(errc::empty_group, "no treated units");
  if (treated == n) throw Error(errc::empty_group, "no control units");

  for (std::size_t i = 0; i < X.rows(); ++i)
    for (std::size_t j = 0; j < X.cols(); ++j)
      if (!std::isfinite(X(i, j))) throw Error(errc::non_finite, "non-finite covariate");

  if (names.empty()) {
    names.reserve(X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  }
  if (names.size() != X.cols())
    throw Error(errc::length_mismatch, "names length must equal covariate count");
  std::unordered_set<std::string> seen;
  for (const auto& nm : names)
    if (!seen.insert(nm).second)
      throw Error(errc::invalid_argument, "duplicate covariate label: " + nm);

  return Dataset{std::move(z), std::move(y), std::move(X), std::move(names)};
}

// Simulation sample with known potential outcomes and true propensity.
struct PotentialDataset {
  Dataset data;
  std::vector<double> y0, y1;
  std::vector<double> e_true;       // in (0,1)
  std::optional<Matrix> X_alt;      // misspecified-model covariates
  std::vector<std::string> alt_names;
};

enum class Family { att, owatt, trim, smooth_trim, truncate };

// Which WATT member: the tilting family plus its parameters.
class EstimandSpec {
 public:
  static EstimandSpec att() { return EstimandSpec(Family::att, 0.0, 0.0, false); }
  static EstimandSpec owatt() { return EstimandSpec(Family::owatt, 0.0, 0.0, false); }
  static EstimandSpec trim(double alpha, bool reestimate = false) {
    check_alpha(alpha);
    return EstimandSpec(Family::trim, alpha, 0.0, reestimate);
  }
  static EstimandSpec smooth_trim(double alpha, double epsilon) {
    check_alpha(alpha);
    if (!(epsilon > 0.0)) throw Error(errc::invalid_argument, "epsilon must be > 0");
    return EstimandSpec(Family::smooth_trim, alpha, epsilon, false);
  }
  static EstimandSpec truncate(double alpha) {
    check_alpha(alpha);
    return EstimandSpec(Family::truncate, alpha, 0.0, false);
  }

  Family family() const noexcept { return family_; }
  double alpha() const noexcept { return alpha_; }
  double epsilon() const noexcept { return epsilon_; }
  bool reestimate() const noexcept { return reestimate_; }

  bool is_trim_family() const noexcept { return family_ == Family::trim; }

  std::string label() const {
    auto num = [](double v) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", v);
      return std::string(buf);
    };
    switch (family_) {
      case Family::att: return "att";
      case Family::owatt: return "owatt";
      case Family::trim:
        return (reestimate_ ? "trim-reest(" : "trim(") + num(alpha_) + ")";
      case Family::smooth_trim:
        return "smooth-trim(" + num(alpha_) + "," + num(epsilon_) + ")";
      case Family::truncate: return "truncate(" + num(alpha_) + ")";
    }
    return "?";
  }

  bool operator==(const EstimandSpec&) const = default;

 private:
  EstimandSpec(Family f, double a, double e, bool r)
      : family_(f), alpha_(a), epsilon_(e), reestimate_(r) {}

  static void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5))
      throw Error(errc::invalid_argument, "alpha must lie in (0, 0.5)");
  }

  Family family_;
  double alpha_, epsilon_;
  bool reestimate_;
};

struct EstimateResult {
  double point = 0.0;
  std::optional<double> se, ci_lower, ci_upper, p_value;
  std::size_t n_treated = 0;
  std::size_t n_control_effective = 0;   // controls with strictly positive weight
  EstimandSpec spec = EstimandSpec::att();
};

}  // namespace watt
