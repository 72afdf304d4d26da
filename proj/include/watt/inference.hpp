#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "watt/error.hpp"
#include "watt/estimands.hpp"
#include "watt/parallel.hpp"
#include "watt/rng.hpp"
#include "watt/simulation.hpp"
#include "watt/types.hpp"

// Nonparametric pairs bootstrap: whole rows (z, y, x) are resampled with
// replacement and the full estimation pipeline is rerun per replicate. SE is
// the sample SD of replicate points; CI and p-value use the normal reference.

namespace watt {

struct BootstrapConfig {
  int replicates = 200;
  std::uint64_t seed = 0;
  double ci_level = 0.95;
  int max_redraws = 100;
};

namespace detail {

inline Dataset resample_rows(const Dataset& data, CounterRng& rng) {
  const std::size_t n = data.n();
  Dataset out;
  out.z.resize(n);
  out.y.resize(n);
  out.X = Matrix(n, data.p());
  out.names = data.names;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(rng.next_below(n));
    out.z[i] = data.z[k];
    out.y[i] = data.y[k];
    for (std::size_t j = 0; j < data.p(); ++j) out.X(i, j) = data.X(k, j);
  }
  return out;
}

inline bool both_arms_present(const Dataset& d) {
  bool t = false, c = false;
  for (int zi : d.z) (zi == 1 ? t : c) = true;
  return t && c;
}

inline bool degenerate_replicate_error(const Error& e) {
  switch (e.code()) {
    case errc::empty_group:
    case errc::all_controls_trimmed:
    case errc::zero_control_mass:
    case errc::rank_deficient:
      return true;
    default:
      return false;
  }
}

}  // namespace detail

inline EstimateResult bootstrap_estimate(const Dataset& data, const EstimandSpec& spec,
                                         const BootstrapConfig& cfg, FitOptions opts = {},
                                         int threads = 1) {
  if (cfg.replicates < 2)
    throw Error(errc::invalid_argument, "bootstrap needs at least 2 replicates");
  if (!(cfg.ci_level > 0.0 && cfg.ci_level < 1.0))
    throw Error(errc::invalid_argument, "ci_level must lie in (0,1)");
  if (cfg.max_redraws < 0)
    throw Error(errc::invalid_argument, "max_redraws must be nonnegative");

  EstimateResult res = estimate_watt(data, spec, nullptr, opts);

  const std::size_t R = static_cast<std::size_t>(cfg.replicates);
  std::vector<double> points(R);
  std::vector<char> failed(R, 0);
  const CounterRng root(cfg.seed);

  parallel_for(R, threads, [&](std::size_t r) {
    CounterRng stream = root.split(r);
    bool done = false;
    for (int attempt = 0; attempt <= cfg.max_redraws && !done; ++attempt) {
      const Dataset boot = detail::resample_rows(data, stream);
      if (!detail::both_arms_present(boot)) continue;
      try {
        points[r] = estimate_watt(boot, spec, nullptr, opts).point;
        done = true;
      } catch (const Error& e) {
        if (!detail::degenerate_replicate_error(e)) throw;
      }
    }
    if (!done) failed[r] = 1;
  });

  for (std::size_t r = 0; r < R; ++r)
    if (failed[r])
      throw Error(errc::degenerate_bootstrap,
                  "replicate " + std::to_string(r) + " degenerate after " +
                      std::to_string(cfg.max_redraws) + " redraws");

  double mean = 0.0;
  for (double v : points) mean += v;
  mean /= static_cast<double>(R);
  double ss = 0.0;
  for (double v : points) ss += (v - mean) * (v - mean);
  const double se = std::sqrt(ss / static_cast<double>(R - 1));

  res.se = se;
  if (se == 0.0) {
    res.ci_lower = res.point;
    res.ci_upper = res.point;
    res.p_value = (res.point == 0.0) ? 1.0 : 0.0;
  } else {
    const double zq = normal_quantile(0.5 * (1.0 + cfg.ci_level));
    res.ci_lower = res.point - zq * se;
    res.ci_upper = res.point + zq * se;
    res.p_value = 2.0 * normal_sf(std::fabs(res.point) / se);
  }
  return res;
}

// Monte Carlo evaluation of the asymptotic bias under a (possibly)
// misspecified propensity model:
//   E{w(e) (1-e) m0} / E{w(e) (1-e)}  -  E{w(e~) (1-e) m0} / E{w(e~) (1-e)}
// where e~ is the limit of the misspecified fit, proxied by fitting the
// misspecified logistic model once on mc_size units. With misspec=false the
// two terms coincide and the result is exactly zero.
inline double asymptotic_bias_mc(const EstimandSpec& spec, const DGPSpec& dgp,
                                 bool misspec, std::size_t mc_size, std::uint64_t seed,
                                 FitOptions opts = {}) {
  if (mc_size < 100) throw Error(errc::invalid_argument, "mc_size too small");
  EstimandSpec tilt_spec = spec;
  if (spec.family() == Family::trim && spec.reestimate())
    tilt_spec = EstimandSpec::trim(spec.alpha(), false);

  const CounterRng root(seed);

  PropensityFit miss_fit;
  if (misspec) {
    CounterRng fit_rng = root.split(0);
    const PotentialDataset pop = generate(dgp, mc_size, fit_rng);
    Dataset d;
    d.z = pop.data.z;
    d.y = pop.data.y;
    d.X = *pop.X_alt;
    d.names = pop.alt_names;
    miss_fit = fit_logistic(d, opts);
  }

  CounterRng eval_rng = root.split(1);
  const PotentialDataset pop = generate(dgp, mc_size, eval_rng);
  const std::vector<double> m0 = true_m0(dgp, pop.data.X);
  std::vector<double> e_tilde;
  if (misspec)
    e_tilde = predict(miss_fit, *pop.X_alt);
  else
    e_tilde = pop.e_true;

  double an = 0.0, ad = 0.0, bn = 0.0, bd = 0.0;
  for (std::size_t i = 0; i < mc_size; ++i) {
    const double e = pop.e_true[i];
    const double one_m_e = 1.0 - e;
    const double w_true = control_weight(tilt_spec, e) * one_m_e;
    const double w_miss = control_weight(tilt_spec, e_tilde[i]) * one_m_e;
    an += w_true * m0[i];
    ad += w_true;
    bn += w_miss * m0[i];
    bd += w_miss;
  }
  return an / ad - bn / bd;
}

}  // namespace watt
