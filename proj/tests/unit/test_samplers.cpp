#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "parachain/estimators.hpp"
#include "parachain/samplers.hpp"
#include "test_support.hpp"

using namespace parachain;

namespace {

double lag1_correlation(const ChainMatrix& c, std::size_t col) {
  const std::size_t n = c.n();
  double mean = 0.0;
  for (std::size_t t = 0; t < n; ++t) mean += c(t, col);
  mean /= static_cast<double>(n);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double d = c(t, col) - mean;
    den += d * d;
    if (t + 1 < n) num += d * (c(t + 1, col) - mean);
  }
  return num / den;
}

// Oracle: Gamma = -sum_{s=1}^{S} s (C(s) + C(s)^T) from the lag covariances.
Matrix truncated_gamma(const GibbsParams& prm, int terms) {
  const double phi = prm.phi();
  Matrix g(2, 2);
  for (int s = 1; s <= terms; ++s) {
    const double ps = std::pow(phi, s), ps1 = std::pow(phi, s - 1);
    const Matrix c{{prm.omega1 * ps, prm.rho * ps}, {prm.rho * ps1, prm.omega2 * ps}};
    g -= (c + c.transpose()) * static_cast<double>(s);
  }
  return g;
}

// Oracle: Sigma = C(0) + sum_{s=1}^{S} (C(s) + C(s)^T).
Matrix truncated_sigma(const GibbsParams& prm, int terms) {
  const double phi = prm.phi();
  Matrix sig = gibbs_target_covariance(prm);
  for (int s = 1; s <= terms; ++s) {
    const double ps = std::pow(phi, s), ps1 = std::pow(phi, s - 1);
    const Matrix c{{prm.omega1 * ps, prm.rho * ps}, {prm.rho * ps1, prm.omega2 * ps}};
    sig += c + c.transpose();
  }
  return sig;
}

GibbsParams with_rho(double rho) {
  GibbsParams p;
  p.rho = rho;
  return p;
}

}  // namespace

TEST(Gibbs, ConditionalMeanOfFirstSweep) {
  const GibbsParams prm = with_rho(0.5);
  const std::vector<double> init{100.0, 2.0};
  double s = 0.0;
  const int reps = 20000;
  for (int j = 0; j < reps; ++j) s += gibbs_run(prm, 1, init, RngState{3, static_cast<std::uint64_t>(j)})(0, 0);
  // X1 | X2 = 2 has mean 1 and sd sqrt(0.75); init[0] plays no role.
  EXPECT_NEAR(s / reps, 1.0, 4.0 * std::sqrt(0.75 / reps));
}

TEST(Gibbs, Lag1AutocorrelationIsPhi) {
  for (double rho : {0.0, 0.5, 0.9}) {
    const GibbsParams prm = with_rho(rho);
    Rng rng({21, 0});
    const Vector init = parachain::testing::stationary_gibbs_init(prm, rng);
    const ChainMatrix c = gibbs_run(prm, 100000, init, rng);
    for (std::size_t col : {0U, 1U})
      EXPECT_NEAR(lag1_correlation(c, col), rho * rho, 0.01) << "rho " << rho << " col " << col;
  }
}

TEST(Gibbs, AutocorrelationAtHigherLagsIsPhiPower) {
  const GibbsParams prm = with_rho(0.9);
  Rng rng({22, 0});
  const Vector init = parachain::testing::stationary_gibbs_init(prm, rng);
  const ChainMatrix c = gibbs_run(prm, 200000, init, rng);
  const double c0 = autocovariance(c, 0)(0, 0);
  for (std::size_t k = 1; k <= 5; ++k)
    EXPECT_NEAR(autocovariance(c, k)(0, 0) / c0, std::pow(0.81, k), 0.02) << "lag " << k;
}

TEST(Gibbs, StationaryMomentsMatchTarget) {
  GibbsParams prm;
  prm.mu1 = 2.0;
  prm.mu2 = -1.0;
  prm.omega1 = 2.0;
  prm.omega2 = 0.5;
  prm.rho = 0.6;
  Rng rng({23, 0});
  const ChainMatrix c = gibbs_run(prm, 400000, parachain::testing::stationary_gibbs_init(prm, rng), rng);
  const Vector mu = sample_mean(c);
  EXPECT_NEAR(mu[0], 2.0, 0.03);
  EXPECT_NEAR(mu[1], -1.0, 0.015);
  const Matrix s = sample_covariance(c);
  EXPECT_NEAR(s(0, 0), 2.0, 0.04);
  EXPECT_NEAR(s(1, 1), 0.5, 0.01);
  EXPECT_NEAR(s(0, 1), 0.6, 0.02);
}

TEST(Gibbs, Reproducible) {
  const GibbsParams prm = with_rho(0.5);
  const std::vector<double> init{1.0, -1.0};
  EXPECT_EQ(gibbs_run(prm, 500, init, RngState{5, 9}), gibbs_run(prm, 500, init, RngState{5, 9}));
  EXPECT_FALSE(gibbs_run(prm, 500, init, RngState{5, 9}) == gibbs_run(prm, 500, init, RngState{5, 10}));
}

TEST(Gibbs, InvalidParams) {
  const std::vector<double> init{0.0, 0.0};
  EXPECT_THROW(gibbs_run(with_rho(1.0), 10, init, RngState{1, 1}), DomainError);
  GibbsParams bad;
  bad.omega1 = 0.0;
  EXPECT_THROW(gibbs_true_sigma(bad), DomainError);
  EXPECT_THROW(gibbs_run(with_rho(0.5), 10, std::vector<double>{0.0}, RngState{1, 1}), DomainError);
}

TEST(GibbsOracle, SigmaExamples) {
  const Matrix s = gibbs_true_sigma(with_rho(0.5));
  EXPECT_NEAR(s(0, 0), 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(s(0, 1), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(s(1, 0), 4.0 / 3.0, 1e-14);
  EXPECT_NEAR(s(1, 1), 5.0 / 3.0, 1e-14);
  EXPECT_EQ(gibbs_true_sigma(with_rho(0.0)), Matrix::identity(2));
  const Matrix hi = gibbs_true_sigma(with_rho(0.999));
  EXPECT_NEAR(hi(0, 0), 999.5002501, 1e-4);
  EXPECT_NEAR(hi(0, 1), 999.4997499, 1e-4);
}

TEST(GibbsOracle, GammaExamples) {
  const Matrix g = gibbs_true_gamma(with_rho(0.5));
  // phi = 1/4: Gamma_11 = -2 (1/4) / (9/16) = -8/9, Gamma_12 = -(1/2)(5/4)/(9/16) = -10/9
  EXPECT_NEAR(g(0, 0), -8.0 / 9.0, 1e-14);
  EXPECT_NEAR(g(0, 1), -10.0 / 9.0, 1e-14);
  EXPECT_EQ(gibbs_true_gamma(with_rho(0.0)), Matrix(2, 2));
}

TEST(GibbsOracle, ClosedFormsMatchTruncatedSeries) {
  for (double rho : {-0.7, 0.0, 0.3, 0.5, 0.8}) {
    for (auto [w1, w2] : {std::pair{1.0, 1.0}, std::pair{2.0, 0.5}, std::pair{3.0, 4.0}}) {
      GibbsParams prm;
      prm.omega1 = w1;
      prm.omega2 = w2;
      prm.rho = rho * std::sqrt(w1 * w2);
      EXPECT_TRUE(parachain::testing::near_rel(gibbs_true_gamma(prm), truncated_gamma(prm, 1000), 1e-10));
      EXPECT_TRUE(parachain::testing::near_rel(gibbs_true_sigma(prm), truncated_sigma(prm, 1000), 1e-10));
    }
  }
}

TEST(GibbsOracle, SigmaDominatesTargetVariance) {
  for (double rho = -0.99; rho < 0.995; rho += 0.01) {
    const Matrix s = gibbs_true_sigma(with_rho(rho));
    EXPECT_GE(s(0, 0), 1.0);
    EXPECT_TRUE(s.is_symmetric());
    EXPECT_NO_THROW(cholesky(s));
  }
}

TEST(GibbsInits, CircleLayout) {
  GibbsParams prm;
  prm.mu1 = 1.0;
  prm.omega2 = 4.0;
  const auto inits = gibbs_dispersed_inits(prm, 4, 10.0);
  ASSERT_EQ(inits.size(), 4U);
  EXPECT_NEAR(inits[0][0], 21.0, 1e-12);
  EXPECT_NEAR(inits[0][1], 0.0, 1e-12);
  EXPECT_NEAR(inits[1][0], 1.0, 1e-12);
  EXPECT_NEAR(inits[1][1], 20.0, 1e-12);
  EXPECT_NEAR(inits[2][0], -19.0, 1e-12);
}

TEST(Rosenbrock, LogPdfExamples) {
  EXPECT_EQ(rosenbrock_logpdf(std::vector<double>{1.0, 1.0}), 0.0);
  EXPECT_DOUBLE_EQ(rosenbrock_logpdf(std::vector<double>{0.0, 0.0}), -0.05);
  EXPECT_DOUBLE_EQ(rosenbrock_logpdf(std::vector<double>{1.0, 0.0}), -5.0);
  EXPECT_DOUBLE_EQ(rosenbrock_logpdf(std::vector<double>{1.0, 2.0}), -5.0);
  EXPECT_DOUBLE_EQ(rosenbrock_logpdf(std::vector<double>{3.0, 9.0}), -0.2);
}

TEST(Rosenbrock, InitsLieOnRidge) {
  const auto inits = rosenbrock_dispersed_inits(5, 5.0);
  ASSERT_EQ(inits.size(), 5U);
  EXPECT_EQ(inits.front()[0], -4.0);
  EXPECT_EQ(inits.back()[0], 6.0);
  for (const auto& x : inits) EXPECT_EQ(rosenbrock_logpdf(x), -(x[0] - 1) * (x[0] - 1) / 20.0);
}

TEST(Rwm, UphillProposalsAlwaysAccepted) {
  // Log density increasing in x: every rightward step is uphill. Replay the
  // draws from a copy of the generator.
  RwmParams prm{[](std::span<const double> x) { return x[0]; }, 1.0, {0.0}};
  Rng rng({31, 0});
  Rng replay = rng;
  const auto res = rwm_run(prm, 20000, rng);
  double x = 0.0;
  std::size_t uphill = 0;
  for (std::size_t t = 0; t < res.chain.n(); ++t) {
    const double z = replay.standard_normal();
    if (z >= 0.0) {
      ++uphill;
      x += z;
    } else if (std::log(replay.uniform()) < z) {
      x += z;
    }
    ASSERT_EQ(res.chain(t, 0), x) << "t " << t;
  }
  EXPECT_GT(uphill, 9000U);
  EXPECT_GT(res.acceptance_rate, static_cast<double>(uphill) / 20000.0);
}

TEST(Rwm, FlatDensityAcceptsEverything) {
  RwmParams prm{[](std::span<const double>) { return 0.0; }, 3.0, {0.0, 0.0}};
  EXPECT_EQ(rwm_run(prm, 1000, RngState{1, 2}).acceptance_rate, 1.0);
}

TEST(Rwm, StandardNormalAcceptanceAndHistogram) {
  RwmParams prm{[](std::span<const double> x) { return -0.5 * x[0] * x[0]; }, 2.4, {0.0}};
  Rng rng({32, 0});
  const std::size_t n = 1000000;
  const auto res = rwm_run(prm, n, rng);
  EXPECT_GT(res.acceptance_rate, 0.35);
  EXPECT_LT(res.acceptance_rate, 0.55);
  // Bin probabilities against the normal CDF.
  const std::vector<double> edges{-1e300, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 1e300};
  std::vector<double> counts(edges.size() - 1, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const double x = res.chain(t, 0);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
      if (x >= edges[k] && x < edges[k + 1]) counts[k] += 1.0;
  }
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); };
  for (std::size_t k = 0; k + 1 < edges.size(); ++k)
    EXPECT_NEAR(counts[k] / n, phi(edges[k + 1]) - phi(edges[k]), 0.02) << "bin " << k;
}

TEST(Rwm, AcceptanceTendsToOneAsStepShrinks) {
  RwmParams prm{[](std::span<const double> x) { return -0.5 * x[0] * x[0]; }, 1.0, {0.3}};
  double prev = 0.0;
  for (double sd : {2.0, 0.5, 0.1, 0.01}) {
    prm.proposal_sd = sd;
    const double acc = rwm_run(prm, 20000, RngState{33, 0}).acceptance_rate;
    EXPECT_GT(acc, prev) << "sd " << sd;
    prev = acc;
  }
  EXPECT_GT(prev, 0.99);
}

TEST(Rwm, Errors) {
  RwmParams prm{rosenbrock_logpdf, 0.0, {0.0, 0.0}};
  EXPECT_THROW(rwm_run(prm, 10, RngState{1, 1}), DomainError);
  prm.proposal_sd = 0.3;
  prm.init.clear();
  EXPECT_THROW(rwm_run(prm, 10, RngState{1, 1}), DomainError);
}

TEST(Rwm, RosenbrockAcceptanceNearTuningTarget) {
  double acc = 0.0;
  const auto inits = rosenbrock_dispersed_inits(5);
  for (std::size_t k = 0; k < 5; ++k) {
    RwmParams prm{rosenbrock_logpdf, kRosenbrockProposalSd, inits[k]};
    acc += rwm_run(prm, 100000, chain_stream(1, 0, k)).acceptance_rate / 5.0;
  }
  EXPECT_NEAR(acc, 0.25, 0.06);
}

TEST(Rwm, Reproducible) {
  RwmParams prm{rosenbrock_logpdf, 0.3, {1.0, 1.0}};
  const auto a = rwm_run(prm, 2000, RngState{8, 1});
  const auto b = rwm_run(prm, 2000, RngState{8, 1});
  EXPECT_EQ(a.chain, b.chain);
  EXPECT_EQ(a.acceptance_rate, b.acceptance_rate);
}
