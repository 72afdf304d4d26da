#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "watt/error.hpp"
#include "watt/inference.hpp"
#include "watt/parallel.hpp"
#include "watt/simulation.hpp"

// Monte Carlo performance harness: simulate M data sets, run the bootstrap
// estimator for each estimand, and aggregate ARBias%, RRMSE, RMSE, RE and CP%
// against the Monte Carlo truths. All randomness flows from streams split off
// (seed, purpose, replicate), so reports are identical across thread counts.

namespace watt {

struct MCConfig {
  DGPSpec dgp;
  std::size_t n = 1000;
  int m = 1000;                       // outer replicates
  std::vector<EstimandSpec> specs;
  bool ps_correct = true;
  BootstrapConfig bootstrap;
  std::uint64_t seed = 0;
  std::size_t truth_superpop = 100000;
  std::size_t truth_batches = 10;
  std::vector<TruthResult> truth_override;  // aligned with specs when nonempty
  FitOptions fit;
  int threads = 1;
};

struct MetricsRow {
  EstimandSpec spec = EstimandSpec::att();
  double truth = 0.0;
  double truth_mc_se = 0.0;
  bool truth_approx = false;
  double arbias_pct = 0.0;
  double rrmse = 0.0;
  double rmse = 0.0;
  double re = 0.0;
  double cp_pct = 0.0;
  int m = 0;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
  bool ps_correct = true;
};

namespace detail {

inline constexpr std::uint64_t kStreamTruth = 0;
inline constexpr std::uint64_t kStreamData = 1;
inline constexpr std::uint64_t kStreamBoot = 2;

inline Dataset select_model_data(const PotentialDataset& pop, bool ps_correct) {
  Dataset d;
  d.z = pop.data.z;
  d.y = pop.data.y;
  if (ps_correct) {
    d.X = pop.data.X;
    d.names = pop.data.names;
  } else {
    if (!pop.X_alt)
      throw Error(errc::invalid_argument, "dgp provides no misspecified covariates");
    d.X = *pop.X_alt;
    d.names = pop.alt_names;
  }
  return d;
}

}  // namespace detail

// Harness with a pluggable per-replicate estimator; the default pipeline is
// bootstrap_estimate. The estimator receives the replicate dataset and a
// BootstrapConfig whose seed is already derived from (seed, replicate, spec).
template <class Estimator>
MetricsReport monte_carlo_with(const MCConfig& cfg, Estimator&& estimator) {
  if (cfg.m < 1) throw Error(errc::invalid_argument, "m must be >= 1");
  if (cfg.n < 20) throw Error(errc::invalid_argument, "n must be >= 20");
  if (cfg.specs.empty()) throw Error(errc::invalid_argument, "no estimands given");
  if (!cfg.truth_override.empty() && cfg.truth_override.size() != cfg.specs.size())
    throw Error(errc::invalid_argument, "truth_override size != specs size");

  const CounterRng root(cfg.seed);
  const std::size_t S = cfg.specs.size();
  const std::size_t M = static_cast<std::size_t>(cfg.m);

  std::vector<TruthResult> truths(S);
  if (!cfg.truth_override.empty()) {
    truths = cfg.truth_override;
  } else {
    CounterRng truth_rng = root.split(detail::kStreamTruth);
    for (std::size_t s = 0; s < S; ++s) {
      CounterRng stream = truth_rng.split(s);
      truths[s] = true_watt(cfg.specs[s], cfg.dgp, cfg.truth_superpop,
                            cfg.truth_batches, stream);
    }
  }

  std::vector<double> points(M * S);
  std::vector<double> boot_var(M * S);
  std::vector<char> covered(M * S, 0);

  parallel_for(M, cfg.threads, [&](std::size_t mi) {
    try {
      CounterRng data_rng = root.split(detail::kStreamData).split(mi);
      const PotentialDataset pop = generate(cfg.dgp, cfg.n, data_rng);
      const Dataset d = detail::select_model_data(pop, cfg.ps_correct);
      for (std::size_t s = 0; s < S; ++s) {
        BootstrapConfig bcfg = cfg.bootstrap;
        bcfg.seed = root.split(detail::kStreamBoot).split(mi).split(s).key();
        const EstimateResult r = estimator(d, cfg.specs[s], bcfg);
        points[mi * S + s] = r.point;
        boot_var[mi * S + s] = r.se ? (*r.se) * (*r.se)
                                    : std::numeric_limits<double>::quiet_NaN();
        covered[mi * S + s] =
            (r.ci_lower && r.ci_upper && *r.ci_lower <= truths[s].value &&
             truths[s].value <= *r.ci_upper)
                ? 1
                : 0;
      }
    } catch (const Error& e) {
      throw Error(e.code(), "replicate " + std::to_string(mi) + ": " + e.what());
    }
  });

  MetricsReport report;
  report.ps_correct = cfg.ps_correct;
  report.rows.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    MetricsRow& row = report.rows[s];
    row.spec = cfg.specs[s];
    row.truth = truths[s].value;
    row.truth_mc_se = truths[s].mc_se;
    row.truth_approx = truths[s].approx;
    row.m = cfg.m;

    const double tau = truths[s].value;
    double mean_rel = 0.0, mean_sq = 0.0, mean_rel_sq = 0.0, mean_pt = 0.0;
    double cover = 0.0;
    for (std::size_t mi = 0; mi < M; ++mi) {
      const double pt = points[mi * S + s];
      const double err = pt - tau;
      mean_rel += err / tau;
      mean_sq += err * err;
      mean_rel_sq += (err / tau) * (err / tau);
      mean_pt += pt;
      cover += covered[mi * S + s];
    }
    const double dm = static_cast<double>(M);
    mean_rel /= dm;
    mean_sq /= dm;
    mean_rel_sq /= dm;
    mean_pt /= dm;
    row.arbias_pct = 100.0 * std::fabs(mean_rel);
    row.rmse = std::sqrt(mean_sq);
    row.rrmse = std::sqrt(mean_rel_sq);
    row.cp_pct = 100.0 * cover / dm;

    double emp_var = 0.0;
    if (M >= 2) {
      for (std::size_t mi = 0; mi < M; ++mi) {
        const double d = points[mi * S + s] - mean_pt;
        emp_var += d * d;
      }
      emp_var /= (dm - 1.0);
    }
    double re = 0.0;
    for (std::size_t mi = 0; mi < M; ++mi) re += emp_var / boot_var[mi * S + s];
    row.re = re / dm;
  }
  return report;
}

inline MetricsReport monte_carlo(const MCConfig& cfg) {
  return monte_carlo_with(cfg, [&](const Dataset& d, const EstimandSpec& spec,
                                   const BootstrapConfig& bcfg) {
    return bootstrap_estimate(d, spec, bcfg, cfg.fit, /*threads=*/1);
  });
}

}  // namespace watt
