#include "tleague/league/league_state.hpp"

#include <cstdio>
#include <sstream>

#include "tleague/policy/policy.hpp"
#include "tleague/pool/model_store.hpp"

namespace tleague::league {

LeagueState::LeagueState(std::vector<LearnerGroupConfig> groups,
                         pool::ModelPoolIface& pool, std::uint64_t seed)
    : pool_(pool), rng_(seed) {
  if (groups.empty()) throw std::invalid_argument("at least one learner group required");
  for (std::size_t g = 0; g < groups.size(); ++g) {
    groups[g].hyper.Validate();
    GroupState gs;
    gs.cfg = std::move(groups[g]);
    gs.generation = 0;
    gs.current_key = MakeKey(gs.cfg.lineage, 0);
    ModelRecord seed_rec;
    seed_rec.model_key = gs.current_key;
    seed_rec.params = policy::InitParams(gs.cfg.family, gs.cfg.shape,
                                         gs.cfg.init_scale, seed + g);
    seed_rec.hyperparams = gs.cfg.hyper;
    seed_rec.created_at_us = ++creation_counter_;
    pool_.PutModel(seed_rec);
    payoff_.AddModel(gs.current_key);
    groups_.push_back(std::move(gs));
  }
}

std::string LeagueState::MakeKey(const std::string& lineage,
                                 std::uint32_t generation) const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04u", generation);
  return lineage + ":" + buf;
}

LeagueState::GroupState& LeagueState::GroupAt(std::uint32_t group) {
  if (group >= groups_.size())
    throw std::invalid_argument("unknown learner group: " + std::to_string(group));
  return groups_[group];
}

const LeagueState::GroupState& LeagueState::GroupAt(std::uint32_t group) const {
  if (group >= groups_.size())
    throw std::invalid_argument("unknown learner group: " + std::to_string(group));
  return groups_[group];
}

Task LeagueState::IssueTaskLocked(std::uint32_t group, bool sample_opponents) {
  GroupState& gs = GroupAt(group);
  Task task;
  task.task_id = next_task_id_++;
  task.learner_group = group;
  task.learning_model_key = gs.current_key;
  task.hyperparams = gs.cfg.hyper;
  if (sample_opponents) {
    std::string self_key = gs.current_key;
    if (gs.cfg.opponent_group) self_key = GroupAt(*gs.cfg.opponent_group).current_key;
    for (std::uint32_t slot = 0; slot < gs.cfg.n_opponents; ++slot) {
      task.opponent_model_keys.push_back(
          SampleOpponent(payoff_, self_key, frozen_keys_, gs.cfg.scheme, rng_));
    }
    pending_[task.task_id] = {group, task.learning_model_key, task.opponent_model_keys};
  }
  return task;
}

Task LeagueState::RequestActorTask(const std::string& actor_id, std::uint32_t group) {
  (void)actor_id;
  std::lock_guard lock(mu_);
  return IssueTaskLocked(group, /*sample_opponents=*/true);
}

Task LeagueState::RequestLearnerTask(std::uint32_t group, std::uint32_t rank) {
  if (rank != 0)
    throw RankError("only the rank-0 learner may request tasks (got rank " +
                    std::to_string(rank) + ")");
  std::lock_guard lock(mu_);
  return IssueTaskLocked(group, /*sample_opponents=*/false);
}

void LeagueState::ReportOutcome(std::uint64_t task_id,
                                const std::vector<Outcome>& outcomes) {
  std::lock_guard lock(mu_);
  auto it = pending_.find(task_id);
  if (it == pending_.end()) {
    if (reported_.count(task_id))
      throw DuplicateReportError("task already reported: " + std::to_string(task_id));
    throw UnknownTaskError("unknown task id: " + std::to_string(task_id));
  }
  const PendingTask& pt = it->second;
  if (outcomes.size() < 1 + pt.opponent_keys.size())
    throw std::invalid_argument("outcome list shorter than agent count");
  double elo_k = GroupAt(pt.group).cfg.hyper.elo_k;
  for (const auto& opp : pt.opponent_keys)
    payoff_.Record(pt.learning_key, opp, outcomes[0], elo_k);
  reported_.insert(task_id);
  pending_.erase(it);
}

std::string LeagueState::EndLearningPeriod(std::uint32_t group) {
  std::lock_guard lock(mu_);
  GroupState& gs = GroupAt(group);
  const std::string frozen_key = gs.current_key;
  pool_.FreezeModel(frozen_key);
  ModelRecord frozen = pool_.GetModel(frozen_key);
  frozen_keys_.push_back(frozen_key);

  ++gs.generation;
  gs.cfg.hyper = PerturbHyper(gs.cfg.hyper, gs.cfg.perturb_hyper, rng_);
  ModelRecord next;
  next.model_key = MakeKey(gs.cfg.lineage, gs.generation);
  next.params = frozen.params;  // successor starts from the frozen blob
  next.hyperparams = gs.cfg.hyper;
  next.parent_key = frozen_key;
  next.created_at_us = ++creation_counter_;
  pool_.PutModel(next);
  payoff_.AddModel(next.model_key);
  gs.current_key = next.model_key;
  return next.model_key;
}

std::string LeagueState::CurrentKey(std::uint32_t group) const {
  std::lock_guard lock(mu_);
  return GroupAt(group).current_key;
}

std::uint32_t LeagueState::Generation(std::uint32_t group) const {
  std::lock_guard lock(mu_);
  return GroupAt(group).generation;
}

PayoffMatrix LeagueState::PayoffSnapshot() const {
  std::lock_guard lock(mu_);
  return payoff_;
}

std::vector<std::string> LeagueState::FrozenKeys() const {
  std::lock_guard lock(mu_);
  return frozen_keys_;
}

HyperParams LeagueState::PerturbHyper(const HyperParams& hp, bool enabled,
                                      std::mt19937_64& rng) {
  if (!enabled) return hp;
  static constexpr double kFactors[] = {0.8, 1.0, 1.25};
  std::uniform_int_distribution<int> pick(0, 2);
  HyperParams out = hp;
  out.learning_rate *= kFactors[pick(rng)];
  return out;
}

std::string LeagueState::Summary() const {
  std::lock_guard lock(mu_);
  std::ostringstream os;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const GroupState& gs = groups_[g];
    os << "group " << g << " lineage=" << gs.cfg.lineage
       << " scheme=" << SchemeKindName(gs.cfg.scheme.kind)
       << " generation=" << gs.generation << " current=" << gs.current_key << '\n';
  }
  os << payoff_.Summary();
  return os.str();
}

}  // namespace tleague::league
