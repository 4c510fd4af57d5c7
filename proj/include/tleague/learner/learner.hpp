#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tleague/league/league_iface.hpp"
#include "tleague/learner/replay_mem.hpp"
#include "tleague/learner/segment_sink.hpp"
#include "tleague/pool/pool_iface.hpp"
#include "tleague/rlmath/rlmath.hpp"

namespace tleague::learner {

enum class Algo { kPpo, kVtrace };

Algo ParseAlgo(const std::string& name);  // "ppo" | "vtrace"

struct LearnerConfig {
  std::uint32_t group = 0;
  std::uint32_t num_shards = 1;
  Algo algo = Algo::kPpo;
  std::uint32_t publish_interval = 10;
  std::uint32_t period_steps = 100;
  std::size_t replay_capacity = 4096;
  std::uint64_t seed = 0;
  // Artificial per-update sleep, for throughput experiments with a learner
  // that is deliberately slower than the actor population.
  std::uint32_t step_delay_ms = 0;
};

struct ThroughputStats {
  double rfps = 0.0;
  double cfps = 0.0;
  std::uint64_t update_steps = 0;
  std::uint64_t stale_dropped = 0;
};

// Learner-group core (rank 0): ingests segments, runs synchronized
// minibatch SGD across num_shards in-process shard contexts, and publishes
// parameters to the pool. Ranks > 0 are thin ingest relays (LearnerService).
class Learner : public SegmentSink {
 public:
  Learner(LearnerConfig config, league::LeagueIface& league,
          pool::ModelPoolIface& pool);

  // Pulls the group's task and current blob; resets the replay ring so no
  // stale-keyed segment can ever be sampled.
  void StartPeriod();

  // Drops segments whose model_key differs from the current task key.
  void PushSegment(const TrajectorySegment& segment) override;

  // One synchronized update: blocking-samples num_shards minibatches,
  // computes per-shard gradients, averages them in rank order, applies the
  // identical SGD step everywhere, and publishes on the configured cadence.
  // Returns false when the replay was shut down mid-block.
  bool TrainStep();

  // Publishes final params, ends the period at the league, and starts the
  // successor period. Returns the successor key.
  std::string FinishPeriod();

  // Convenience: period_steps train steps then FinishPeriod.
  std::string RunPeriod();

  void Shutdown() { replay_.Shutdown(); }

  const std::string& current_key() const { return current_key_; }
  const ParamBlob& params() const { return params_; }
  const HyperParams& hyper() const { return hyper_; }
  std::uint64_t update_steps() const { return update_steps_; }
  ReplayMem& replay() { return replay_; }

  // Cumulative counters (steps, not rates).
  ThroughputStats Counters() const;

  // Appends one `ts=<s> group=<g> rfps=<r> cfps=<c> steps=<k>` line with
  // rates measured since the previous call.
  void LogMetricsLine(std::string& out);

 private:
  rlmath::Minibatch BuildMinibatch(const std::vector<TrajectorySegment>& segments) const;
  void Publish();

  LearnerConfig config_;
  league::LeagueIface& league_;
  pool::ModelPoolIface& pool_;
  ReplayMem replay_;

  std::mutex task_mu_;  // guards current_key_/hyper_/teacher_ vs ingest
  std::string current_key_;
  HyperParams hyper_;
  ParamBlob params_;
  std::string parent_key_;
  std::uint64_t created_at_us_ = 0;
  std::uint64_t update_steps_ = 0;
  std::atomic<std::uint64_t> stale_dropped_{0};

  // metrics-rate bookkeeping
  std::uint64_t last_metric_recv_ = 0;
  std::uint64_t last_metric_cons_ = 0;
  double last_metric_ts_ = 0.0;
};

}  // namespace tleague::learner
