#pragma once

#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tleague/league/league_iface.hpp"
#include "tleague/league/payoff.hpp"
#include "tleague/league/sampling.hpp"
#include "tleague/pool/pool_iface.hpp"
#include "tleague/types.hpp"

namespace tleague::league {

struct UnknownTaskError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DuplicateReportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LearnerGroupConfig {
  std::string lineage = "main";
  SamplingScheme scheme;
  HyperParams hyper;
  PolicyFamily family = PolicyFamily::kTabularSoftmax;
  PolicyShape shape;
  double init_scale = 0.0;
  std::uint32_t n_opponents = 1;
  bool perturb_hyper = false;
  // When set, self-play opponents come from this group's current model
  // (exploiter role); otherwise from the group itself.
  std::optional<std::uint32_t> opponent_group;
};

// The coordination authority: issues consistent actor/learner tasks, keeps
// the payoff matrix and Elo via its game-manager state, snapshots
// hyperparameters per model, and advances learning periods. All public
// methods are serialized internally.
class LeagueState : public LeagueIface {
 public:
  // Creates the generation-0 seed model of every group in the pool.
  LeagueState(std::vector<LearnerGroupConfig> groups, pool::ModelPoolIface& pool,
              std::uint64_t seed);

  Task RequestActorTask(const std::string& actor_id, std::uint32_t group) override;

  // Only rank 0 may call; other ranks get a RankError.
  Task RequestLearnerTask(std::uint32_t group, std::uint32_t rank) override;

  // outcomes[0] is the learning agent. Duplicate task ids are rejected.
  void ReportOutcome(std::uint64_t task_id,
                     const std::vector<Outcome>& outcomes) override;

  // Freezes the group's current model, creates the successor record, and
  // returns the successor key.
  std::string EndLearningPeriod(std::uint32_t group) override;

  std::string CurrentKey(std::uint32_t group = 0) const;
  std::uint32_t Generation(std::uint32_t group = 0) const;
  std::size_t n_groups() const { return groups_.size(); }

  PayoffMatrix PayoffSnapshot() const;
  std::vector<std::string> FrozenKeys() const;

  // Multiplies learning_rate by a factor drawn uniformly from
  // {0.8, 1.0, 1.25}; identity when `enabled` is false.
  static HyperParams PerturbHyper(const HyperParams& hp, bool enabled,
                                  std::mt19937_64& rng);

  // Payoff matrix, Elo table and per-group period state as aligned text.
  std::string Summary() const;

 private:
  struct GroupState {
    LearnerGroupConfig cfg;
    std::string current_key;
    std::uint32_t generation = 0;
  };

  struct PendingTask {
    std::uint32_t group = 0;
    std::string learning_key;
    std::vector<std::string> opponent_keys;
  };

  std::string MakeKey(const std::string& lineage, std::uint32_t generation) const;
  GroupState& GroupAt(std::uint32_t group);
  const GroupState& GroupAt(std::uint32_t group) const;
  Task IssueTaskLocked(std::uint32_t group, bool sample_opponents);

  mutable std::mutex mu_;
  std::vector<GroupState> groups_;
  pool::ModelPoolIface& pool_;
  PayoffMatrix payoff_;
  std::vector<std::string> frozen_keys_;
  std::unordered_map<std::uint64_t, PendingTask> pending_;
  std::unordered_set<std::uint64_t> reported_;
  std::uint64_t next_task_id_ = 1;
  // Logical creation clock: record timestamps must be reproducible so that
  // two equally-seeded runs freeze bit-identical model files.
  std::uint64_t creation_counter_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace tleague::league
