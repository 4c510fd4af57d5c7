#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tleague/env/env.hpp"
#include "tleague/league/league_state.hpp"
#include "tleague/learner/learner.hpp"

namespace tleague::run {

// Carries the offending 1-based line number of the config file.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& file, int line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        line_no(line) {}
  int line_no;
};

enum class RunMode { kLockstep, kThreads, kProcess };

// One parsed run configuration: the cluster shape (M_G groups, M_L shards,
// M_A actors per shard, M_M pool replicas), the environment, the algorithm,
// and per-group league settings.
struct RunConfig {
  env::EnvSpec env;
  PolicyFamily family = PolicyFamily::kTabularSoftmax;
  double init_scale = 0.0;
  learner::Algo algo = learner::Algo::kPpo;
  RunMode mode = RunMode::kLockstep;

  std::uint32_t n_groups = 1;       // M_G
  std::uint32_t shards = 1;         // M_L
  std::uint32_t actors = 1;         // M_A (per shard)
  std::uint32_t pool_replicas = 1;  // M_M
  std::uint32_t inf_servers = 0;

  std::uint64_t seed = 0;
  std::uint32_t periods = 10;
  std::uint32_t period_steps = 100;
  std::uint32_t publish_interval = 10;
  std::uint32_t param_refresh_interval = 1;
  std::size_t replay_capacity = 4096;

  // Only meaningful in process mode; 0 auto-assigns.
  std::uint16_t base_port = 0;

  std::vector<league::LearnerGroupConfig> groups;  // one per n_groups
};

// Parses the line-oriented `key: value` format with `[group <i>]` sections.
// Unknown keys, malformed values and out-of-range section indices raise
// ConfigError with the exact line.
RunConfig ParseRunConfigText(const std::string& text, const std::string& file_name);
RunConfig LoadRunConfig(const std::string& path);

}  // namespace tleague::run
