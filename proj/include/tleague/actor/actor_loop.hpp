#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>

#include "tleague/actor/segmenter.hpp"
#include "tleague/env/env.hpp"
#include "tleague/infserver/inf_server.hpp"
#include "tleague/league/league_iface.hpp"
#include "tleague/learner/segment_sink.hpp"
#include "tleague/pool/pool_iface.hpp"

namespace tleague::actor {

struct ActorConfig {
  std::string actor_id;
  std::uint32_t learner_group = 0;
  env::EnvSpec env;
  std::uint32_t unroll_len = 1;
  std::uint32_t param_refresh_interval = 1;  // episodes between blob pulls
  std::uint64_t seed = 0;
};

// Rollout worker: per episode it requests a task, refreshes parameters when
// due, plays one game recording only the learning agent's steps, streams the
// unroll windows to the learner, and reports the outcome.
class Actor {
 public:
  // `inference` non-null switches the learning agent to remote inference;
  // opponents are always evaluated locally.
  Actor(ActorConfig config, league::LeagueIface& league, pool::ModelPoolIface& pool,
        learner::SegmentSink& sink, infserver::InferenceIface* inference = nullptr);

  void RunEpisode();

  // Loops RunEpisode until `stop` is set; finishes the in-flight episode.
  void Run(const std::atomic<bool>& stop);

  std::uint64_t episodes() const { return episodes_; }
  std::uint64_t next_segment_seq() const { return next_seq_; }

 private:
  const ParamBlob& OpponentParams(const std::string& key);

  ActorConfig config_;
  league::LeagueIface& league_;
  pool::ModelPoolIface& pool_;
  learner::SegmentSink& sink_;
  infserver::InferenceIface* inference_;

  std::unique_ptr<env::Env> env_;
  std::mt19937_64 rng_;
  std::uint64_t episodes_ = 0;
  std::uint64_t next_seq_ = 0;

  // Learning-side blob, refreshed every param_refresh_interval episodes.
  ParamBlob theta_;
  std::string theta_key_;
  std::uint64_t episodes_since_refresh_ = 0;

  // Frozen opponents never change, so cache them forever; non-frozen
  // opponent keys (pure self-play) are refetched alongside theta.
  std::unordered_map<std::string, ParamBlob> frozen_cache_;
  std::deque<ParamBlob> scratch_;  // live non-theta opponents, one episode
};

}  // namespace tleague::actor
