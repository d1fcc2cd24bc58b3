#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "parachain/chain.hpp"
#include "parachain/diagnostics.hpp"
#include "parachain/estimators.hpp"
#include "parachain/harness/chain_io.hpp"
#include "parachain/harness/config.hpp"
#include "parachain/harness/parallel.hpp"
#include "parachain/rng.hpp"
#include "parachain/samplers.hpp"

namespace parachain::harness {

// Replication engine. Replication j (counting from cfg.replication_offset)
// runs chain k on stream chain_stream(base_seed, j, k), so any subset of
// replications can be recomputed independently and results do not depend on
// the worker count. Chains are simulated once at max(n_grid) and every grid
// point is evaluated on a prefix.

inline double default_init_spread(TargetKind t) { return t == TargetKind::gibbs ? 10.0 : 5.0; }

inline ChainSet simulate_chains(const ExperimentConfig& cfg, std::size_t replication,
                                std::size_t n) {
  const double spread = cfg.init_spread.value_or(default_init_spread(cfg.target));
  std::vector<ChainMatrix> chains;
  chains.reserve(cfg.m);
  switch (cfg.target) {
    case TargetKind::gibbs: {
      const auto inits = gibbs_dispersed_inits(cfg.gibbs, cfg.m, spread);
      for (std::size_t k = 0; k < cfg.m; ++k)
        chains.push_back(
            gibbs_run(cfg.gibbs, n, inits[k], chain_stream(cfg.base_seed, replication, k)));
      break;
    }
    case TargetKind::rosenbrock: {
      const auto inits = rosenbrock_dispersed_inits(cfg.m, spread);
      for (std::size_t k = 0; k < cfg.m; ++k) {
        const RwmParams prm{rosenbrock_logpdf, cfg.proposal_sd, inits[k]};
        chains.push_back(rwm_run(prm, n, chain_stream(cfg.base_seed, replication, k)).chain);
      }
      break;
    }
    case TargetKind::external:
      throw ConfigError("external chains are read, not simulated");
  }
  return ChainSet(std::move(chains));
}

inline ChainSet load_or_simulate(const ExperimentConfig& cfg, std::size_t replication) {
  const std::size_t n_max = cfg.n_grid.back();
  if (cfg.target != TargetKind::external) return simulate_chains(cfg, replication, n_max);
  ChainSet cs = io::read_chains(cfg.input);
  if (cs.n() < n_max) throw ConfigError("input chains are shorter than max(n_grid)");
  if (cs.m() != cfg.m) throw ConfigError("input chain count does not match m");
  return cs;
}

inline std::optional<Vector> known_mean(const ExperimentConfig& cfg) {
  switch (cfg.target) {
    case TargetKind::gibbs: return Vector{cfg.gibbs.mu1, cfg.gibbs.mu2};
    case TargetKind::rosenbrock: return rosenbrock_true_mean();
    case TargetKind::external: return cfg.true_mean;
  }
  return std::nullopt;
}

// The estimate of Sigma used by estimator `e` on `cs`, together with the chain
// geometry (m, n) and the mean that the region is centred on. `bm` analyses the
// first chain alone.
struct Evaluated {
  Matrix sigma;
  Vector mu_hat;
  std::size_t m = 1;
  std::size_t n = 1;
};

inline Evaluated evaluate(const ExperimentConfig& cfg, const ChainSet& cs, EstimatorKind e) {
  const std::size_t n = cs.n();
  switch (e) {
    case EstimatorKind::bm:
      return {bm(cs[0], cfg.batch.spec(n)).matrix, sample_mean(cs[0]), 1, n};
    case EstimatorKind::abm: return {abm(cs, cfg.batch.spec(n)).matrix, pooled_mean(cs), cs.m(), n};
    case EstimatorKind::rbm: return {rbm(cs, cfg.batch.spec(n)).matrix, pooled_mean(cs), cs.m(), n};
    case EstimatorKind::naive: return {naive(cs).matrix, pooled_mean(cs), cs.m(), n};
    case EstimatorKind::truth: return {gibbs_true_sigma(cfg.gibbs), pooled_mean(cs), cs.m(), n};
  }
  throw ConfigError("unknown estimator");
}

struct CoverageRow {
  std::size_t n = 0;
  std::string estimator;
  double coverage = 0.0;
  double mc_se = 0.0;
  std::size_t excluded = 0;
  std::size_t replications = 0;
  std::size_t covered = 0;
};

// Rebuilds coverage and its Monte Carlo standard error from the counts.
// Excluded replications leave the denominator.
inline void finalize(CoverageRow& row) {
  const std::size_t valid = row.replications - row.excluded;
  row.coverage = valid ? static_cast<double>(row.covered) / static_cast<double>(valid) : 0.0;
  row.mc_se = valid ? std::sqrt(row.coverage * (1.0 - row.coverage) / static_cast<double>(valid))
                    : 0.0;
}

// Merges rows of the same (n, estimator) from disjoint replication ranges.
inline std::vector<CoverageRow> merge_coverage(const std::vector<CoverageRow>& a,
                                               const std::vector<CoverageRow>& b) {
  if (a.size() != b.size()) throw ConfigError("merge_coverage: tables differ in shape");
  std::vector<CoverageRow> out = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (a[i].n != b[i].n || a[i].estimator != b[i].estimator)
      throw ConfigError("merge_coverage: rows out of alignment");
    out[i].replications += b[i].replications;
    out[i].covered += b[i].covered;
    out[i].excluded += b[i].excluded;
    finalize(out[i]);
  }
  return out;
}

namespace detail {

enum class Outcome : unsigned char { miss, hit, excluded };

}  // namespace detail

inline std::vector<CoverageRow> run_coverage(const ExperimentConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  const auto mu0 = known_mean(cfg);
  if (!mu0) throw ConfigError("coverage needs a known true mean");
  const std::size_t n_points = cfg.n_grid.size();
  const std::size_t n_est = cfg.estimators.size();
  const std::size_t cells = n_points * n_est;
  std::vector<detail::Outcome> outcomes(cfg.replications * cells);

  parallel_for(cfg.replications, threads, [&](std::size_t i) {
    const ChainSet full = load_or_simulate(cfg, cfg.replication_offset + i);
    if (full.p() != mu0->size()) throw ConfigError("true mean has the wrong dimension");
    for (std::size_t g = 0; g < n_points; ++g) {
      const ChainSet cs = full.prefix(cfg.n_grid[g]);
      for (std::size_t e = 0; e < n_est; ++e) {
        auto& slot = outcomes[i * cells + g * n_est + e];
        try {
          const Evaluated ev = evaluate(cfg, cs, cfg.estimators[e]);
          const RegionTest t =
              confidence_region_test(ev.mu_hat, ev.sigma, *mu0, cfg.level, ev.m, ev.n);
          slot = t.contains ? detail::Outcome::hit : detail::Outcome::miss;
        } catch (const NotPositiveDefinite&) {
          slot = detail::Outcome::excluded;
        }
      }
    }
  });

  std::vector<CoverageRow> rows;
  rows.reserve(cells);
  for (std::size_t g = 0; g < n_points; ++g)
    for (std::size_t e = 0; e < n_est; ++e) {
      CoverageRow row;
      row.n = cfg.n_grid[g];
      row.estimator = to_string(cfg.estimators[e]);
      row.replications = cfg.replications;
      for (std::size_t i = 0; i < cfg.replications; ++i) {
        const auto o = outcomes[i * cells + g * n_est + e];
        if (o == detail::Outcome::hit) ++row.covered;
        if (o == detail::Outcome::excluded) ++row.excluded;
      }
      finalize(row);
      rows.push_back(std::move(row));
    }
  return rows;
}

enum class RunningStat { frobenius, ess_per_sample };

inline std::string to_string(RunningStat s) {
  return s == RunningStat::frobenius ? "frobenius" : "ess_per_sample";
}

struct RunningRow {
  std::size_t n = 0;
  std::string estimator;  // an estimator name, or "oracle" for the closed-form value
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
  std::size_t excluded = 0;
};

// Statistic per replication, grid point and estimator; summarised as mean and
// standard error (sample sd / sqrt(count), zero for a single replication). For
// the Gibbs target an extra "oracle" row per grid point carries the value
// implied by the closed-form Sigma and target covariance.
inline std::vector<RunningRow> run_running_stat(const ExperimentConfig& cfg, RunningStat stat,
                                                unsigned threads = 1) {
  cfg.validate();
  const std::size_t n_points = cfg.n_grid.size();
  const std::size_t n_est = cfg.estimators.size();
  const std::size_t cells = n_points * n_est;
  std::vector<double> values(cfg.replications * cells, 0.0);
  std::vector<unsigned char> ok(cfg.replications * cells, 0);

  parallel_for(cfg.replications, threads, [&](std::size_t i) {
    const ChainSet full = load_or_simulate(cfg, cfg.replication_offset + i);
    for (std::size_t g = 0; g < n_points; ++g) {
      const ChainSet cs = full.prefix(cfg.n_grid[g]);
      for (std::size_t e = 0; e < n_est; ++e) {
        const std::size_t slot = i * cells + g * n_est + e;
        try {
          const Evaluated ev = evaluate(cfg, cs, cfg.estimators[e]);
          if (stat == RunningStat::frobenius) {
            values[slot] = frobenius_norm(ev.sigma);
          } else {
            const ChainSet& basis = ev.m == 1 ? ChainSet({cs[0]}) : cs;
            const CovarianceEstimate est{ev.sigma, Method::rbm, 0, 1, 0.0, ev.n, ev.m};
            values[slot] = ess(basis, est, cfg.centering).per_sample;
          }
          ok[slot] = 1;
        } catch (const NotPositiveDefinite&) {
          ok[slot] = 0;
        }
      }
    }
  });

  std::vector<RunningRow> rows;
  for (std::size_t g = 0; g < n_points; ++g) {
    for (std::size_t e = 0; e < n_est; ++e) {
      RunningRow row;
      row.n = cfg.n_grid[g];
      row.estimator = to_string(cfg.estimators[e]);
      double sum = 0.0;
      for (std::size_t i = 0; i < cfg.replications; ++i) {
        const std::size_t slot = i * cells + g * n_est + e;
        if (ok[slot]) {
          sum += values[slot];
          ++row.count;
        } else {
          ++row.excluded;
        }
      }
      if (row.count > 0) row.mean = sum / static_cast<double>(row.count);
      if (row.count > 1) {
        double ss = 0.0;
        for (std::size_t i = 0; i < cfg.replications; ++i) {
          const std::size_t slot = i * cells + g * n_est + e;
          if (ok[slot]) ss += (values[slot] - row.mean) * (values[slot] - row.mean);
        }
        row.se = std::sqrt(ss / static_cast<double>(row.count - 1)) /
                 std::sqrt(static_cast<double>(row.count));
      }
      rows.push_back(std::move(row));
    }
    if (cfg.target == TargetKind::gibbs) {
      const Matrix sigma = gibbs_true_sigma(cfg.gibbs);
      RunningRow oracle;
      oracle.n = cfg.n_grid[g];
      oracle.estimator = "oracle";
      oracle.count = 1;
      if (stat == RunningStat::frobenius) {
        oracle.mean = frobenius_norm(sigma);
      } else {
        oracle.mean = ess_from(gibbs_target_covariance(cfg.gibbs),
                               CovarianceEstimate{sigma, Method::rbm, 0, 1, 0.0, 1, 1}, 1, 1)
                          .per_sample;
      }
      rows.push_back(std::move(oracle));
    }
  }
  return rows;
}

inline void write_coverage_csv(const std::vector<CoverageRow>& rows, std::ostream& out) {
  out << "n,estimator,coverage,mc_se,excluded,replications,covered\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.estimator << ',' << io::format_double(r.coverage) << ','
        << io::format_double(r.mc_se) << ',' << r.excluded << ',' << r.replications << ','
        << r.covered << '\n';
}

inline void write_running_csv(const std::vector<RunningRow>& rows, RunningStat stat,
                              std::ostream& out) {
  out << "n,estimator,stat,mean,se,count,excluded\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.estimator << ',' << to_string(stat) << ','
        << io::format_double(r.mean) << ',' << io::format_double(r.se) << ',' << r.count << ','
        << r.excluded << '\n';
}

}  // namespace parachain::harness
