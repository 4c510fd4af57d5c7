#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tleague/run/config.hpp"

namespace tleague::run {

// One child process of a process-mode run.
struct ProcessSpec {
  std::string role;  // "pool" | "league" | "learner" | "learner-relay" | "inf" | "actor"
  std::vector<std::string> argv;
  std::uint16_t listen_port = 0;  // 0 when the role does not listen
};

// Deterministic port layout and command lines for every child, in launch
// order (pools, league manager, learners rank-0-first, inf-servers, actors).
// Throws ConfigError on a duplicate listen port.
std::vector<ProcessSpec> PlanProcesses(const RunConfig& cfg,
                                       const std::string& config_path,
                                       const std::string& run_dir,
                                       const std::string& self_exe);

// True when the TCP port can be bound on the loopback interface right now.
bool PortIsFree(std::uint16_t port);

// Spawns and supervises the plan: crashed actors are restarted, a dead
// pool/league/learner fail-stops the whole run, and all rank-0 learners
// exiting cleanly completes it (frozen models are then exported to
// <run_dir>/models). Returns the process exit code for the `run` command.
int LaunchRun(const RunConfig& cfg, const std::string& config_path,
              const std::string& run_dir, const std::string& self_exe);

}  // namespace tleague::run
