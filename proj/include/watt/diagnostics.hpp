#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "watt/error.hpp"
#include "watt/estimands.hpp"
#include "watt/types.hpp"

// Weighted covariate balance: absolute standardized mean differences with
// W_1i = Z_i and W_0i = (1-Z_i) * omega_0h(X_i). Trimmed controls carry
// weight 0 and therefore drop out of the weighted sums, matching the sample
// the estimator actually uses.

namespace watt {

struct BalanceRow {
  std::string name;
  double asd_unweighted = 0.0;
  double asd_weighted = 0.0;
  bool undefined_unweighted = false;   // zero variance in both arms
  bool undefined_weighted = false;
};

struct BalanceReport {
  std::vector<BalanceRow> rows;
  EstimandSpec spec = EstimandSpec::att();
};

namespace detail {

// d_j = |xbar0 - xbar1| / sqrt((s1^2 + s0^2)/2) with the weighted variance
// s^2 = [SW / ((SW)^2 - SW2)] * sum W (x - xbar)^2.
struct GroupStats {
  double mean = 0.0;
  double var = 0.0;
  bool var_defined = true;
};

inline GroupStats weighted_group_stats(const Dataset& data, const std::vector<double>& w,
                                       int arm, std::size_t j) {
  double sw = 0.0, sw2 = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.z[i] != arm) continue;
    sw += w[i];
    sw2 += w[i] * w[i];
    sx += w[i] * data.X(i, j);
  }
  GroupStats g;
  if (sw <= 0.0) throw Error(errc::zero_weight_group, "group weight sum is zero");
  g.mean = sx / sw;
  const double denom = sw * sw - sw2;
  if (denom <= 0.0) {
    g.var_defined = false;
    return g;
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.z[i] != arm) continue;
    const double d = data.X(i, j) - g.mean;
    ss += w[i] * d * d;
  }
  g.var = sw / denom * ss;
  return g;
}

inline void asd_for(const Dataset& data, const std::vector<double>& w1,
                    const std::vector<double>& w0, std::size_t j, double& asd,
                    bool& undefined) {
  const GroupStats g1 = weighted_group_stats(data, w1, 1, j);
  const GroupStats g0 = weighted_group_stats(data, w0, 0, j);
  if (!g1.var_defined || !g0.var_defined) {
    asd = std::numeric_limits<double>::quiet_NaN();
    undefined = true;
    return;
  }
  const double pooled = (g1.var + g0.var) / 2.0;
  if (pooled <= 0.0) {
    asd = std::numeric_limits<double>::quiet_NaN();
    undefined = true;
    return;
  }
  asd = std::fabs(g0.mean - g1.mean) / std::sqrt(pooled);
  undefined = false;
}

}  // namespace detail

inline BalanceReport weighted_asd(const Dataset& data, const WeightVector& wv,
                                  const EstimandSpec& spec = EstimandSpec::att()) {
  if (wv.w.size() != data.n())
    throw Error(errc::length_mismatch, "weight vector length != n");

  std::vector<double> ones(data.n(), 1.0);
  std::vector<double> w_treated(data.n(), 0.0);
  for (std::size_t i = 0; i < data.n(); ++i)
    if (data.z[i] == 1) w_treated[i] = 1.0;

  BalanceReport report;
  report.spec = spec;
  report.rows.resize(data.p());
  for (std::size_t j = 0; j < data.p(); ++j) {
    BalanceRow& row = report.rows[j];
    row.name = data.names[j];
    detail::asd_for(data, ones, ones, j, row.asd_unweighted, row.undefined_unweighted);
    detail::asd_for(data, w_treated, wv.w, j, row.asd_weighted, row.undefined_weighted);
  }
  return report;
}

}  // namespace watt
