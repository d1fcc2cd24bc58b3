// Runs m Gibbs chains on a correlated bivariate normal from dispersed starts and
// compares ABM, RBM and the naive estimator against the closed-form Sigma.
//
//   gibbs_oracle_demo [rho] [n] [m] [seed]

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "parachain/parachain.hpp"

using namespace parachain;

static void print_matrix(const char* name, const Matrix& s) {
  std::printf("%-6s [[%10.4f, %10.4f], [%10.4f, %10.4f]]  |.|_F = %.4f\n", name, s(0, 0), s(0, 1),
              s(1, 0), s(1, 1), frobenius_norm(s));
}

int main(int argc, char** argv) {
  GibbsParams prm;
  prm.rho = argc > 1 ? std::atof(argv[1]) : 0.5;
  const std::size_t n = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 10000;
  const std::size_t m = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 5;
  const std::uint64_t seed = argc > 4 ? std::strtoull(argv[4], nullptr, 10) : 1;

  const auto inits = gibbs_dispersed_inits(prm, m);
  std::vector<ChainMatrix> chains;
  for (std::size_t k = 0; k < m; ++k)
    chains.push_back(gibbs_run(prm, n, inits[k], chain_stream(seed, 0, k)));
  const ChainSet cs(std::move(chains));

  const BatchSpec spec{default_batch_size(n, BatchMode::sqrt), 3, 0.5};
  std::printf("rho = %g, n = %zu, m = %zu, b = %zu, lugsail r = 3, c = 0.5\n", prm.rho, n, m,
              spec.b);
  print_matrix("true", gibbs_true_sigma(prm));
  const auto a = abm(cs, spec);
  const auto r = rbm(cs, spec);
  print_matrix("abm", a.matrix);
  print_matrix("rbm", r.matrix);
  if (m >= 2) print_matrix("naive", naive(cs).matrix);

  try {
    std::printf("ESS/mn: abm %.4f, rbm %.4f\n", ess(cs, a).per_sample, ess(cs, r).per_sample);
  } catch (const NotPositiveDefinite& e) {
    std::printf("ESS unavailable: %s\n", e.what());
  }
  return 0;
}
