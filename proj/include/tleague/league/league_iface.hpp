#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tleague/types.hpp"

namespace tleague::league {

// League-manager operations as seen by actors and learners; implemented by
// LeagueState (in-process) and LeagueClient (RPC).
class LeagueIface {
 public:
  virtual ~LeagueIface() = default;
  virtual Task RequestActorTask(const std::string& actor_id, std::uint32_t group) = 0;
  virtual Task RequestLearnerTask(std::uint32_t group, std::uint32_t rank) = 0;
  virtual void ReportOutcome(std::uint64_t task_id,
                             const std::vector<Outcome>& outcomes) = 0;
  virtual std::string EndLearningPeriod(std::uint32_t group) = 0;
};

}  // namespace tleague::league
