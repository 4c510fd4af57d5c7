#pragma once

#include <string>
#include <vector>

#include "tleague/learner/learner.hpp"
#include "tleague/run/config.hpp"

namespace tleague::run {

struct RunResult {
  std::vector<std::string> frozen_keys;
  std::string league_summary;
  std::vector<learner::ThroughputStats> group_counters;
};

// File name a model key is stored under inside <run_dir>/models/.
std::string ModelFileName(const std::string& model_key);

// Runs the whole league in this process. Lockstep mode drives every actor
// and learner round-robin on the calling thread (bit-reproducible given the
// config seed); threads mode runs them concurrently. Writes models/,
// league.txt and metrics.log under run_dir (pass "" to skip the outputs).
RunResult LocalRun(const RunConfig& cfg, const std::string& run_dir);

}  // namespace tleague::run
