#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tleague/types.hpp"

namespace tleague::env {

struct EnvSpec {
  std::string env_name;
  std::uint32_t n_agents = 2;
  std::uint32_t horizon = 1;
  // Payoff for agent 0 in a matrix game, indexed [a0][a1]. Agent 1 receives
  // the entries of payoff_table_b when given, otherwise the negated table
  // (zero-sum).
  std::optional<std::vector<std::vector<double>>> payoff_table;
  std::optional<std::vector<std::vector<double>>> payoff_table_b;
  std::uint64_t seed = 0;
};

struct StepResult {
  std::vector<std::vector<double>> observations;  // one per agent
  std::vector<double> rewards;                    // one per agent
  bool done = false;
  std::vector<Outcome> outcomes;  // filled iff done
};

// Multi-agent environment with simultaneous moves. Single-context; run many
// instances for parallelism.
class Env {
 public:
  virtual ~Env() = default;

  // Begins episode `episode()`+1; deterministic given (spec seed, episode index).
  virtual std::vector<std::vector<double>> Reset() = 0;

  // Exactly n_agents() actions. Throws std::invalid_argument on an
  // out-of-range action and std::logic_error when stepping a finished episode.
  virtual StepResult Step(std::span<const std::uint32_t> actions) = 0;

  virtual std::uint32_t n_agents() const = 0;
  virtual std::uint32_t obs_dim() const = 0;
  virtual std::uint32_t n_actions() const = 0;

  // True when observations are one-hot vectors (tabular-policy compatible).
  virtual bool one_hot_obs() const = 0;
};

using EnvFactory = std::function<std::unique_ptr<Env>(const EnvSpec&)>;

// Build-time extensible registry keyed by the config `env:` name.
void RegisterEnv(const std::string& name, EnvFactory factory);
std::vector<std::string> RegisteredEnvNames();

// Throws std::invalid_argument for an unknown env_name.
std::unique_ptr<Env> MakeEnv(const EnvSpec& spec);

// Canonical 3x3 Rock-Paper-Scissors payoff for agent 0.
std::vector<std::vector<double>> RpsPayoff();

// Outcome per agent from cumulative episode rewards (sign convention; a tie
// at the horizon is a tie for everyone).
std::vector<Outcome> OutcomesFromReturns(std::span<const double> returns);

}  // namespace tleague::env
