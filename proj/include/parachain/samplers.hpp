#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "parachain/chain.hpp"
#include "parachain/errors.hpp"
#include "parachain/matrix.hpp"
#include "parachain/rng.hpp"

namespace parachain {

// Bivariate normal target N((mu1, mu2), [[omega1, rho], [rho, omega2]]).
struct GibbsParams {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double omega1 = 1.0;
  double omega2 = 1.0;
  double rho = 0.0;

  // rho^2 / (omega1 omega2): the AR(1) coefficient of each coordinate.
  double phi() const { return rho * rho / (omega1 * omega2); }

  void validate() const {
    if (!(omega1 > 0.0 && omega2 > 0.0))
      throw DomainError("GibbsParams: omega1 and omega2 must be positive");
    if (!(rho * rho < omega1 * omega2))
      throw DomainError("GibbsParams: need rho^2 < omega1 * omega2");
    if (!std::isfinite(mu1) || !std::isfinite(mu2))
      throw DomainError("GibbsParams: means must be finite");
  }
};

// Deterministic-scan Gibbs sampler. Each sweep draws
//   X1 | X2 ~ N(mu1 + rho/omega2 (X2 - mu2), omega1 - rho^2/omega2)
// and then X2 given the new X1, and records (X1, X2) after the sweep. The
// starting X1 is never used: the first sweep conditions on init[1].
inline ChainMatrix gibbs_run(const GibbsParams& prm, std::size_t n, std::span<const double> init,
                             Rng& rng) {
  prm.validate();
  if (n < 1) throw DomainError("gibbs_run: need n >= 1");
  if (init.size() != 2) throw DomainError("gibbs_run: init must have 2 components");
  const double sd1 = std::sqrt(prm.omega1 - prm.rho * prm.rho / prm.omega2);
  const double sd2 = std::sqrt(prm.omega2 - prm.rho * prm.rho / prm.omega1);
  const double k1 = prm.rho / prm.omega2;
  const double k2 = prm.rho / prm.omega1;
  double x1 = init[0];
  double x2 = init[1];
  std::vector<double> out(2 * n);
  for (std::size_t t = 0; t < n; ++t) {
    x1 = prm.mu1 + k1 * (x2 - prm.mu2) + sd1 * rng.standard_normal();
    x2 = prm.mu2 + k2 * (x1 - prm.mu1) + sd2 * rng.standard_normal();
    out[2 * t] = x1;
    out[2 * t + 1] = x2;
  }
  return ChainMatrix(n, 2, std::move(out));
}

inline ChainMatrix gibbs_run(const GibbsParams& prm, std::size_t n, std::span<const double> init,
                             RngState st) {
  Rng rng(st);
  return gibbs_run(prm, n, init, rng);
}

// Asymptotic covariance of the sample mean of the Gibbs chain:
//   Sigma_ii = omega_i (w + rho^2) / (w - rho^2),  Sigma_12 = 2 w rho / (w - rho^2),
// with w = omega1 omega2.
inline Matrix gibbs_true_sigma(const GibbsParams& prm) {
  prm.validate();
  const double w = prm.omega1 * prm.omega2;
  const double r2 = prm.rho * prm.rho;
  const double ratio = (w + r2) / (w - r2);
  const double off = 2.0 * w * prm.rho / (w - r2);
  return Matrix{{prm.omega1 * ratio, off}, {off, prm.omega2 * ratio}};
}

// Gamma = -sum_{s>=1} s [C(s) + C(s)^T], with C(s) = Cov(Y_1, Y_{1+s}).
// For the Gibbs chain C(s) = [[omega1 phi^s, rho phi^s], [rho phi^(s-1), omega2 phi^s]],
// whose weighted geometric sums give the closed form below.
inline Matrix gibbs_true_gamma(const GibbsParams& prm) {
  prm.validate();
  const double phi = prm.phi();
  const double denom = (1.0 - phi) * (1.0 - phi);
  const double off = -prm.rho * (1.0 + phi) / denom;
  return Matrix{{-2.0 * prm.omega1 * phi / denom, off}, {off, -2.0 * prm.omega2 * phi / denom}};
}

// Stationary covariance of the Gibbs chain (the target covariance).
inline Matrix gibbs_target_covariance(const GibbsParams& prm) {
  return Matrix{{prm.omega1, prm.rho}, {prm.rho, prm.omega2}};
}

// m starting points equally spaced on a circle of radius
// spread * max(sqrt(omega1), sqrt(omega2)) about (mu1, mu2); point k sits at
// angle 2 pi k / m.
inline std::vector<Vector> gibbs_dispersed_inits(const GibbsParams& prm, std::size_t m,
                                                 double spread = 10.0) {
  const double radius = spread * std::sqrt(std::max(prm.omega1, prm.omega2));
  std::vector<Vector> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    out.push_back({prm.mu1 + radius * std::cos(theta), prm.mu2 + radius * std::sin(theta)});
  }
  return out;
}

// Unnormalized log density of the 2-d Rosenbrock target,
//   -(x1 - 1)^2 / 20 - 5 (x2 - x1^2)^2.
// It factorizes as x1 ~ N(1, 10), x2 | x1 ~ N(x1^2, 1/10).
inline double rosenbrock_logpdf(std::span<const double> x) {
  const double a = x[0] - 1.0;
  const double b = x[1] - x[0] * x[0];
  return -a * a / 20.0 - 5.0 * b * b;
}

// E[x1] = 1, E[x2] = E[x1^2] = Var(x1) + 1 = 11.
inline Vector rosenbrock_true_mean() { return {1.0, 11.0}; }

// Proposal scale for random-walk Metropolis on the Rosenbrock target. Fixed by
// a pilot run (m = 5 chains of 1e5 iterations) to give acceptance near 0.25.
inline constexpr double kRosenbrockProposalSd = 0.3;

// m starting points with x1 equally spaced on [1 - spread, 1 + spread]
// (endpoints included) and x2 = x1^2, i.e. on the ridge of the density.
inline std::vector<Vector> rosenbrock_dispersed_inits(std::size_t m, double spread = 5.0) {
  std::vector<Vector> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double x1 = m == 1 ? 1.0
                             : 1.0 - spread + 2.0 * spread * static_cast<double>(k) /
                                                  static_cast<double>(m - 1);
    out.push_back({x1, x1 * x1});
  }
  return out;
}

using LogDensity = std::function<double(std::span<const double>)>;

struct RwmParams {
  LogDensity log_density;
  double proposal_sd = 1.0;
  Vector init;
};

struct RwmResult {
  ChainMatrix chain;
  double acceptance_rate = 0.0;
};

// Random-walk Metropolis with isotropic Gaussian proposal
// x' = x + proposal_sd * z. A proposal with log pi(x') >= log pi(x) is accepted
// without consuming a uniform; otherwise it is accepted when
// log(u) < log pi(x') - log pi(x). The current state is recorded every iteration.
inline RwmResult rwm_run(const RwmParams& prm, std::size_t n, Rng& rng) {
  if (!(prm.proposal_sd > 0.0)) throw DomainError("rwm_run: proposal_sd must be > 0");
  if (n < 1) throw DomainError("rwm_run: need n >= 1");
  if (prm.init.empty()) throw DomainError("rwm_run: empty init");
  if (!prm.log_density) throw DomainError("rwm_run: no log density");
  const std::size_t p = prm.init.size();
  Vector x = prm.init;
  double lp = prm.log_density(x);
  if (!std::isfinite(lp)) throw DomainError("rwm_run: log density not finite at init");
  Vector y(p);
  std::vector<double> out(n * p);
  std::size_t accepted = 0;
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < p; ++j) y[j] = x[j] + prm.proposal_sd * rng.standard_normal();
    const double lq = prm.log_density(y);
    const double diff = lq - lp;
    if (diff >= 0.0 || std::log(rng.uniform()) < diff) {
      x.swap(y);
      lp = lq;
      ++accepted;
    }
    std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(t * p));
  }
  return {ChainMatrix(n, p, std::move(out)),
          static_cast<double>(accepted) / static_cast<double>(n)};
}

inline RwmResult rwm_run(const RwmParams& prm, std::size_t n, RngState st) {
  Rng rng(st);
  return rwm_run(prm, n, rng);
}

}  // namespace parachain
