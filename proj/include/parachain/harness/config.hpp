#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "parachain/errors.hpp"
#include "parachain/diagnostics.hpp"
#include "parachain/estimators.hpp"
#include "parachain/samplers.hpp"

namespace parachain::harness {

enum class TargetKind { gibbs, rosenbrock, external };

// Estimators evaluated by the experiment engine. `truth` is the closed-form
// Sigma, available for the Gibbs target only.
enum class EstimatorKind { bm, abm, rbm, naive, truth };

inline std::string to_string(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::bm: return "bm";
    case EstimatorKind::abm: return "abm";
    case EstimatorKind::rbm: return "rbm";
    case EstimatorKind::naive: return "naive";
    case EstimatorKind::truth: return "true";
  }
  return "?";
}

inline std::optional<EstimatorKind> parse_estimator(const std::string& s) {
  if (s == "bm") return EstimatorKind::bm;
  if (s == "abm") return EstimatorKind::abm;
  if (s == "rbm") return EstimatorKind::rbm;
  if (s == "naive") return EstimatorKind::naive;
  if (s == "true") return EstimatorKind::truth;
  return std::nullopt;
}

enum class BatchRule { sqrt, cube_root, fixed };

struct BatchConfig {
  BatchRule rule = BatchRule::sqrt;
  double multiplier = 1.0;
  std::size_t fixed_size = 0;
  unsigned r = 3;
  double c = 0.5;

  // Batch size for chains of length n.
  std::size_t batch_size(std::size_t n) const {
    switch (rule) {
      case BatchRule::sqrt: return default_batch_size(n, BatchMode::sqrt, multiplier);
      case BatchRule::cube_root: return default_batch_size(n, BatchMode::cube_root, multiplier);
      case BatchRule::fixed: return fixed_size;
    }
    return 0;
  }

  BatchSpec spec(std::size_t n) const { return {batch_size(n), r, c}; }
};

struct ExperimentConfig {
  TargetKind target = TargetKind::gibbs;
  GibbsParams gibbs{};
  double proposal_sd = kRosenbrockProposalSd;
  std::optional<double> init_spread;  // target-specific default when unset
  std::string input;                  // external target
  std::optional<Vector> true_mean;    // external target

  std::size_t m = 5;
  std::vector<std::size_t> n_grid;
  std::size_t replications = 1;
  std::size_t replication_offset = 0;
  std::vector<EstimatorKind> estimators;
  BatchConfig batch{};
  double level = 0.95;
  std::uint64_t base_seed = 0;
  LambdaCentering centering = LambdaCentering::per_chain;

  void validate() const;
};

inline void ExperimentConfig::validate() const {
  if (m < 1) throw ConfigError("m must be >= 1");
  if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1]) throw ConfigError("n_grid must be strictly increasing");
  if (n_grid.front() < 4) throw ConfigError("n_grid entries must be >= 4");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (estimators.empty()) throw ConfigError("estimators must not be empty");
  if (batch.r < 1) throw ConfigError("r must be >= 1");
  if (!(batch.c >= 0.0 && batch.c < 1.0)) throw ConfigError("c must lie in [0, 1)");
  if (!(batch.multiplier > 0.0)) throw ConfigError("batch_multiplier must be > 0");
  if (batch.rule == BatchRule::fixed && batch.fixed_size < 1)
    throw ConfigError("batch_mode 'fixed' requires batch_size >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  if (target == TargetKind::gibbs) {
    try {
      gibbs.validate();
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (target == TargetKind::rosenbrock && !(proposal_sd > 0.0))
    throw ConfigError("proposal_sd must be > 0");
  if (target == TargetKind::external) {
    if (input.empty()) throw ConfigError("external target requires 'input'");
    if (replications != 1) throw ConfigError("external target supports replications = 1 only");
  }
  for (auto e : estimators) {
    if (e == EstimatorKind::truth && target != TargetKind::gibbs)
      throw ConfigError("estimator 'true' requires the gibbs target");
    if (e == EstimatorKind::naive && m < 2) throw ConfigError("estimator 'naive' requires m >= 2");
  }
}

namespace detail {

template <class T>
T get_as(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace detail

// Flat JSON object. Unknown keys are rejected.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  static const std::set<std::string> known = {
      "target",       "mu1",          "mu2",         "omega1",     "omega2",
      "rho",          "proposal_sd",  "init_spread", "input",      "true_mean",
      "m",            "n_grid",       "replications", "replication_offset",
      "estimators",   "batch_mode",   "batch_multiplier", "batch_size",
      "r",            "c",            "level",       "base_seed",  "lambda_centering"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");

  using detail::get_as;
  ExperimentConfig cfg;
  const std::string target = j.contains("target") ? get_as<std::string>(j, "target") : "gibbs";
  if (target == "gibbs") cfg.target = TargetKind::gibbs;
  else if (target == "rosenbrock") cfg.target = TargetKind::rosenbrock;
  else if (target == "external") cfg.target = TargetKind::external;
  else throw ConfigError("unknown target '" + target + "'");

  if (j.contains("mu1")) cfg.gibbs.mu1 = get_as<double>(j, "mu1");
  if (j.contains("mu2")) cfg.gibbs.mu2 = get_as<double>(j, "mu2");
  if (j.contains("omega1")) cfg.gibbs.omega1 = get_as<double>(j, "omega1");
  if (j.contains("omega2")) cfg.gibbs.omega2 = get_as<double>(j, "omega2");
  if (j.contains("rho")) cfg.gibbs.rho = get_as<double>(j, "rho");
  if (j.contains("proposal_sd")) cfg.proposal_sd = get_as<double>(j, "proposal_sd");
  if (j.contains("init_spread")) cfg.init_spread = get_as<double>(j, "init_spread");
  if (j.contains("input")) cfg.input = get_as<std::string>(j, "input");
  if (j.contains("true_mean")) cfg.true_mean = get_as<Vector>(j, "true_mean");

  if (j.contains("m")) cfg.m = get_as<std::size_t>(j, "m");
  if (!j.contains("n_grid")) throw ConfigError("config requires 'n_grid'");
  cfg.n_grid = get_as<std::vector<std::size_t>>(j, "n_grid");
  if (j.contains("replications")) cfg.replications = get_as<std::size_t>(j, "replications");
  if (j.contains("replication_offset"))
    cfg.replication_offset = get_as<std::size_t>(j, "replication_offset");

  const auto names = j.contains("estimators")
                         ? get_as<std::vector<std::string>>(j, "estimators")
                         : std::vector<std::string>{"abm", "rbm"};
  for (const auto& name : names) {
    const auto e = parse_estimator(name);
    if (!e) throw ConfigError("unknown estimator '" + name + "'");
    cfg.estimators.push_back(*e);
  }

  if (j.contains("batch_mode")) {
    const auto mode = get_as<std::string>(j, "batch_mode");
    if (mode == "sqrt") cfg.batch.rule = BatchRule::sqrt;
    else if (mode == "cube_root") cfg.batch.rule = BatchRule::cube_root;
    else if (mode == "fixed") cfg.batch.rule = BatchRule::fixed;
    else throw ConfigError("unknown batch_mode '" + mode + "'");
  }
  if (j.contains("batch_multiplier")) cfg.batch.multiplier = get_as<double>(j, "batch_multiplier");
  if (j.contains("batch_size")) cfg.batch.fixed_size = get_as<std::size_t>(j, "batch_size");
  if (j.contains("r")) cfg.batch.r = get_as<unsigned>(j, "r");
  if (j.contains("c")) cfg.batch.c = get_as<double>(j, "c");
  if (j.contains("level")) cfg.level = get_as<double>(j, "level");
  if (j.contains("base_seed")) cfg.base_seed = get_as<std::uint64_t>(j, "base_seed");
  if (j.contains("lambda_centering")) {
    const auto how = get_as<std::string>(j, "lambda_centering");
    if (how == "per_chain") cfg.centering = LambdaCentering::per_chain;
    else if (how == "global") cfg.centering = LambdaCentering::global;
    else throw ConfigError("unknown lambda_centering '" + how + "'");
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace parachain::harness
