#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <random>
#include <vector>

#include "tleague/types.hpp"

namespace tleague::learner {

// Bounded ring of trajectory segments with per-segment reuse accounting.
// Sampling blocks until enough fresh data exists, which is the on-policy
// speed control: with max_reuse=1 the learner can never outrun the actors.
class ReplayMem {
 public:
  ReplayMem(std::size_t capacity, std::uint32_t max_reuse, std::uint64_t seed);

  // FIFO-evicts the oldest entry when full. Counts the unpadded steps.
  void Push(TrajectorySegment segment);

  // Uniformly samples `n` segments among entries with use_count < max_reuse,
  // incrementing their counts and evicting the ones that hit the bound.
  // Blocks until `n` eligible entries exist; returns an empty vector after
  // Shutdown().
  std::vector<TrajectorySegment> SampleBlocking(std::size_t n);

  // Drops everything (period rollover).
  void Clear();

  // Takes effect for subsequent samples; call only with the ring empty.
  void SetMaxReuse(std::uint32_t max_reuse);

  // Unblocks samplers permanently.
  void Shutdown();

  std::size_t size() const;
  std::uint64_t received_steps() const;
  std::uint64_t consumed_steps() const;

 private:
  struct Entry {
    TrajectorySegment segment;
    std::uint32_t use_count = 0;
  };

  std::size_t EligibleLocked() const;

  const std::size_t capacity_;
  std::uint32_t max_reuse_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Entry> entries_;
  bool shutdown_ = false;
  std::uint64_t received_steps_ = 0;
  std::uint64_t consumed_steps_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace tleague::learner
