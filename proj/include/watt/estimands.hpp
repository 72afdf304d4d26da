#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "watt/error.hpp"
#include "watt/propensity.hpp"
#include "watt/rng.hpp"
#include "watt/types.hpp"

// Tilting functions h(e), control weights w0(e)*h(e), and the Hajek ratio
// estimator of the weighted average treatment effect on the treated. Treated
// units always carry weight 1; tilting applies to controls only.

namespace watt {

// Conventional control weight e/(1-e).
inline double att_weight(double e) { return e / (1.0 - e); }

// Tilting function h(e) for the given estimand.
//   att          h = 1
//   owatt        h = e(1-e)
//   trim         h = 1{e <= 1-alpha}
//   smooth_trim  h = Phi((1-e-alpha)/eps), normal CDF with sd eps
//   truncate     h = 1{e < 1-alpha} + (1-alpha)/alpha * 1/w0(e) * 1{e >= 1-alpha}
inline double tilt(const EstimandSpec& spec, double e) {
  switch (spec.family()) {
    case Family::att: return 1.0;
    case Family::owatt: return e * (1.0 - e);
    case Family::trim: return (e <= 1.0 - spec.alpha()) ? 1.0 : 0.0;
    case Family::smooth_trim:
      return normal_cdf((1.0 - e - spec.alpha()) / spec.epsilon());
    case Family::truncate:
      if (e < 1.0 - spec.alpha()) return 1.0;
      return (1.0 - spec.alpha()) / spec.alpha() / att_weight(e);
  }
  return 0.0;
}

// Control weight omega_0h(e) = w0(e) * h(e), using the algebraic special
// cases: owatt reduces to e^2 exactly; truncation caps at (1-alpha)/alpha.
inline double control_weight(const EstimandSpec& spec, double e) {
  switch (spec.family()) {
    case Family::att: return att_weight(e);
    case Family::owatt: return e * e;
    case Family::trim: return (e <= 1.0 - spec.alpha()) ? att_weight(e) : 0.0;
    case Family::smooth_trim: return att_weight(e) * tilt(spec, e);
    case Family::truncate:
      if (e < 1.0 - spec.alpha()) return att_weight(e);
      return (1.0 - spec.alpha()) / spec.alpha();
  }
  return 0.0;
}

// Unit weights for the whole sample. Treated units get 1; controls get
// omega_0h; trimmed controls get kept=false and weight exactly 0.
struct WeightVector {
  std::vector<double> w;
  std::vector<char> kept;
};

inline WeightVector build_weights(const Dataset& data, const std::vector<double>& e,
                                  const EstimandSpec& spec) {
  const std::size_t n = data.n();
  if (e.size() != n) throw Error(errc::length_mismatch, "propensity vector length != n");
  WeightVector wv;
  wv.w.assign(n, 0.0);
  wv.kept.assign(n, 1);
  bool any_control_kept = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.z[i] == 1) {
      wv.w[i] = 1.0;
      continue;
    }
    if (spec.is_trim_family() && e[i] > 1.0 - spec.alpha()) {
      wv.w[i] = 0.0;
      wv.kept[i] = 0;
      continue;
    }
    wv.w[i] = control_weight(spec, e[i]);
    if (wv.w[i] > 0.0) any_control_kept = true;
  }
  if (!any_control_kept)
    throw Error(errc::all_controls_trimmed, "no control unit kept a positive weight");
  return wv;
}

// Hajek ratio: treated mean minus weighted control mean.
inline double hajek_watt(const Dataset& data, const WeightVector& wv) {
  double ty = 0.0, tn = 0.0, cy = 0.0, cw = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (data.z[i] == 1) {
      ty += data.y[i];
      tn += 1.0;
    } else {
      cy += wv.w[i] * data.y[i];
      cw += wv.w[i];
    }
  }
  if (cw <= 0.0) throw Error(errc::zero_control_mass, "control weights sum to zero");
  return ty / tn - cy / cw;
}

// Point estimate of the WATT defined by spec. For trimming, controls with
// fitted e above 1-alpha are dropped; with reestimate the propensity model is
// refit on the kept sample and the refit probabilities feed the weights.
// If no fit is supplied the propensity model is fit here with `opts`.
inline EstimateResult estimate_watt(const Dataset& data, const EstimandSpec& spec,
                                    const PropensityFit* fit = nullptr,
                                    FitOptions opts = {}) {
  PropensityFit local;
  if (fit == nullptr) {
    local = fit_logistic(data, opts);
    fit = &local;
  }
  if (fit->fitted.size() != data.n())
    throw Error(errc::length_mismatch, "fit size does not match data");

  EstimateResult res;
  res.spec = spec;
  res.n_treated = data.n_treated();

  if (spec.is_trim_family()) {
    const double cut = 1.0 - spec.alpha();
    std::vector<std::size_t> keep;
    keep.reserve(data.n());
    for (std::size_t i = 0; i < data.n(); ++i)
      if (data.z[i] == 1 || fit->fitted[i] <= cut) keep.push_back(i);

    bool any_control = false;
    for (std::size_t i : keep) any_control |= (data.z[i] == 0);
    if (!any_control)
      throw Error(errc::all_controls_trimmed, "trimming removed every control unit");

    Dataset sub;
    sub.z.reserve(keep.size());
    sub.y.reserve(keep.size());
    sub.X = Matrix(keep.size(), data.p());
    sub.names = data.names;
    std::vector<double> e_sub;
    e_sub.reserve(keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const std::size_t i = keep[k];
      sub.z.push_back(data.z[i]);
      sub.y.push_back(data.y[i]);
      for (std::size_t j = 0; j < data.p(); ++j) sub.X(k, j) = data.X(i, j);
      e_sub.push_back(fit->fitted[i]);
    }

    if (spec.reestimate()) {
      const PropensityFit refit = fit_logistic(sub, opts);
      e_sub = refit.fitted;
    }

    WeightVector wv;
    wv.w.assign(sub.n(), 0.0);
    wv.kept.assign(sub.n(), 1);
    std::size_t eff = 0;
    for (std::size_t i = 0; i < sub.n(); ++i) {
      if (sub.z[i] == 1) {
        wv.w[i] = 1.0;
      } else {
        wv.w[i] = att_weight(e_sub[i]);
        if (wv.w[i] > 0.0) ++eff;
      }
    }
    res.point = hajek_watt(sub, wv);
    res.n_control_effective = eff;
    return res;
  }

  const WeightVector wv = build_weights(data, fit->fitted, spec);
  std::size_t eff = 0;
  for (std::size_t i = 0; i < data.n(); ++i)
    if (data.z[i] == 0 && wv.w[i] > 0.0) ++eff;
  res.point = hajek_watt(data, wv);
  res.n_control_effective = eff;
  return res;
}

}  // namespace watt
