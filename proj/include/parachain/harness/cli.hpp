#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "parachain/diagnostics.hpp"
#include "parachain/errors.hpp"
#include "parachain/estimators.hpp"
#include "parachain/harness/chain_io.hpp"
#include "parachain/harness/config.hpp"
#include "parachain/harness/experiments.hpp"
#include "parachain/harness/parallel.hpp"
#include "parachain/samplers.hpp"

namespace parachain::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kNumeric = 2;

// --b value: auto-sqrt | auto-cube:MULT | INT
inline std::size_t resolve_batch_size(const std::string& spec, std::size_t n) {
  if (spec == "auto-sqrt") return default_batch_size(n, BatchMode::sqrt);
  const std::string cube = "auto-cube:";
  if (spec.rfind(cube, 0) == 0) {
    const std::string mult = spec.substr(cube.size());
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(mult, &used);
    } catch (const std::exception&) {
      throw ConfigError("bad --b multiplier '" + mult + "'");
    }
    if (used != mult.size()) throw ConfigError("bad --b multiplier '" + mult + "'");
    return default_batch_size(n, BatchMode::cube_root, v);
  }
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(spec, &used);
  } catch (const std::exception&) {
    throw ConfigError("bad --b value '" + spec + "' (want auto-sqrt, auto-cube:MULT or an integer)");
  }
  if (used != spec.size() || v < 1) throw ConfigError("bad --b value '" + spec + "'");
  return static_cast<std::size_t>(v);
}

// Estimate JSON with stable key order: method, b, r, c, m, n, p, matrix[, ess].
inline nlohmann::ordered_json estimate_json(const CovarianceEstimate& est, std::size_t p) {
  nlohmann::ordered_json j;
  j["method"] = std::string(to_string(est.method));
  if (est.method == Method::naive) j["b"] = nullptr;
  else j["b"] = est.b;
  j["r"] = est.r;
  j["c"] = est.c;
  j["m"] = est.m;
  j["n"] = est.n;
  j["p"] = p;
  j["matrix"] = est.matrix.values();
  return j;
}

namespace detail {

class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw InputError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }
  void finish() {
    stream().flush();
    if (!stream()) throw InputError("write failed");
  }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

struct EstimateArgs {
  std::string method;
  std::string b = "auto-sqrt";
  unsigned r = 1;
  double c = 0.0;
  std::string input;
  std::string out;
  std::size_t chain = 0;
  bool truncate = false;
  std::string centering = "per_chain";
  std::optional<double> ess_threshold;
};

inline void add_estimate_options(CLI::App* cmd, EstimateArgs& a) {
  cmd->add_option("--method", a.method, "bm | abm | rbm | naive")
      ->required()
      ->check(CLI::IsMember({"bm", "abm", "rbm", "naive"}));
  cmd->add_option("--b", a.b, "batch size: auto-sqrt, auto-cube:MULT or an integer");
  cmd->add_option("--r", a.r, "lugsail ratio (integer >= 1)");
  cmd->add_option("--c", a.c, "lugsail weight in [0, 1)");
  cmd->add_option("--input", a.input, "chain CSV")->required();
  cmd->add_option("--out", a.out, "output file (default: standard output)");
  cmd->add_option("--chain", a.chain, "chain analysed by --method bm");
  cmd->add_flag("--truncate-to-min", a.truncate, "cut ragged chains to the shortest");
}

inline CovarianceEstimate compute_estimate(const EstimateArgs& a, const ChainSet& cs) {
  const Method method = *parse_method(a.method);
  if (method == Method::naive) return naive(cs);
  const BatchSpec spec{resolve_batch_size(a.b, cs.n()), a.r, a.c};
  switch (method) {
    case Method::bm:
      if (a.chain >= cs.m()) throw ConfigError("--chain out of range");
      return bm(cs[a.chain], spec);
    case Method::abm: return abm(cs, spec);
    case Method::rbm: return rbm(cs, spec);
    case Method::naive: break;
  }
  return naive(cs);
}

}  // namespace detail

// Entry point shared by the executable and the tests. argv[0] is the program name.
inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err) {
  CLI::App app{"Covariance estimation for parallel MCMC chains"};
  app.require_subcommand(1);

  // sample
  auto* sample = app.add_subcommand("sample", "simulate benchmark chains to CSV");
  sample->require_subcommand(1);
  GibbsParams gp{};
  gp.rho = 0.5;
  std::size_t n = 1000, m = 5;
  std::uint64_t seed = 0;
  std::string out_path;
  std::optional<double> init_spread;
  auto* gibbs = sample->add_subcommand("gibbs", "bivariate normal deterministic-scan Gibbs");
  gibbs->add_option("--rho", gp.rho);
  gibbs->add_option("--omega1", gp.omega1);
  gibbs->add_option("--omega2", gp.omega2);
  gibbs->add_option("--mu1", gp.mu1);
  gibbs->add_option("--mu2", gp.mu2);
  gibbs->add_option("--init-spread", init_spread, "init circle radius in stationary sd units");
  double proposal_sd = kRosenbrockProposalSd;
  auto* rosen = sample->add_subcommand("rosenbrock", "random-walk Metropolis on Rosenbrock");
  rosen->add_option("--proposal-sd", proposal_sd);
  rosen->add_option("--init-spread", init_spread, "x1 starts span 1 +/- spread");
  for (auto* cmd : {gibbs, rosen}) {
    cmd->add_option("--n", n, "iterations per chain");
    cmd->add_option("--m", m, "number of chains");
    cmd->add_option("--seed", seed, "base seed");
    cmd->add_option("--out", out_path, "output CSV (default: standard output)");
  }

  // estimate / ess
  detail::EstimateArgs est_args, ess_args;
  auto* estimate = app.add_subcommand("estimate", "estimate Sigma from a chain CSV");
  detail::add_estimate_options(estimate, est_args);
  auto* ess_cmd = app.add_subcommand("ess", "estimate Sigma and the multivariate ESS");
  detail::add_estimate_options(ess_cmd, ess_args);
  ess_cmd->add_option("--centering", ess_args.centering, "per_chain | global")
      ->check(CLI::IsMember({"per_chain", "global"}));
  ess_cmd->add_option("--ess-threshold", ess_args.ess_threshold,
                      "report whether ESS exceeds this value");

  // coverage / running
  std::string config_path;
  std::optional<unsigned> threads;
  std::string stat_name = "frobenius";
  auto* coverage = app.add_subcommand("coverage", "confidence-region coverage experiment");
  auto* running = app.add_subcommand("running", "running Frobenius norm or ESS/mn experiment");
  for (auto* cmd : {coverage, running}) {
    cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", out_path, "output CSV (default: standard output)");
    cmd->add_option("--threads", threads, "worker threads (fallback: PARACHAIN_THREADS)");
  }
  running->add_option("--stat", stat_name, "frobenius | ess_per_sample")
      ->check(CLI::IsMember({"frobenius", "ess_per_sample"}));

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gibbs->parsed() || rosen->parsed()) {
      if (m < 1 || n < 1) throw ConfigError("--n and --m must be >= 1");
      harness::ExperimentConfig cfg;
      cfg.target = gibbs->parsed() ? harness::TargetKind::gibbs : harness::TargetKind::rosenbrock;
      cfg.gibbs = gp;
      cfg.proposal_sd = proposal_sd;
      cfg.init_spread = init_spread;
      cfg.m = m;
      cfg.base_seed = seed;
      if (cfg.target == harness::TargetKind::gibbs) {
        try {
          gp.validate();
        } catch (const DomainError& e) {
          throw ConfigError(e.what());
        }
      }
      if (cfg.target == harness::TargetKind::rosenbrock && !(proposal_sd > 0.0))
        throw ConfigError("--proposal-sd must be > 0");
      const ChainSet cs = harness::simulate_chains(cfg, 0, n);
      detail::OutputSink sink(out_path, out);
      io::write_chains(cs, sink.stream());
      sink.finish();
      return kOk;
    }
    if (estimate->parsed() || ess_cmd->parsed()) {
      const auto& a = estimate->parsed() ? est_args : ess_args;
      const ChainSet cs = io::read_chains(a.input, a.truncate);
      const CovarianceEstimate est = detail::compute_estimate(a, cs);
      auto j = estimate_json(est, cs.p());
      if (ess_cmd->parsed()) {
        const auto centering =
            a.centering == "global" ? LambdaCentering::global : LambdaCentering::per_chain;
        const ChainSet basis = est.method == Method::bm ? ChainSet({cs[a.chain]}) : cs;
        const EssReport rep = ess(basis, est, centering);
        j["ess"] = rep.ess;
        if (a.ess_threshold) j["terminate"] = termination_check(rep, *a.ess_threshold);
      }
      detail::OutputSink sink(a.out, out);
      sink.stream() << j.dump(2) << '\n';
      sink.finish();
      return kOk;
    }
    if (coverage->parsed() || running->parsed()) {
      const auto cfg = harness::load_config(config_path);
      const unsigned workers = harness::resolve_threads(threads);
      detail::OutputSink sink(out_path, out);
      if (coverage->parsed()) {
        harness::write_coverage_csv(harness::run_coverage(cfg, workers), sink.stream());
      } else {
        const auto stat = stat_name == "ess_per_sample" ? harness::RunningStat::ess_per_sample
                                                        : harness::RunningStat::frobenius;
        harness::write_running_csv(harness::run_running_stat(cfg, stat, workers), stat,
                                   sink.stream());
      }
      sink.finish();
      return kOk;
    }
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  err << app.help();
  return kUsage;
}

inline int cli_dispatch(int argc, char** argv) {
  return cli_dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace parachain::cli
