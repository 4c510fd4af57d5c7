#include "tleague/learner/replay_mem.hpp"

#include <algorithm>
#include <stdexcept>

namespace tleague::learner {

ReplayMem::ReplayMem(std::size_t capacity, std::uint32_t max_reuse, std::uint64_t seed)
    : capacity_(capacity), max_reuse_(max_reuse), rng_(seed) {
  if (capacity_ == 0) throw std::invalid_argument("replay capacity must be >= 1");
  if (max_reuse_ == 0) throw std::invalid_argument("max_reuse must be >= 1");
}

void ReplayMem::Push(TrajectorySegment segment) {
  std::lock_guard lock(mu_);
  received_steps_ += segment.valid_steps;
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(Entry{std::move(segment), 0});
  cv_.notify_all();
}

std::size_t ReplayMem::EligibleLocked() const {
  // All live entries are eligible: anything that reached max_reuse was
  // evicted on the spot.
  return entries_.size();
}

std::vector<TrajectorySegment> ReplayMem::SampleBlocking(std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample size must be >= 1");
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return shutdown_ || EligibleLocked() >= n; });
  if (shutdown_) return {};

  std::vector<TrajectorySegment> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::uniform_int_distribution<std::size_t> pick(0, entries_.size() - 1);
    std::size_t i = pick(rng_);
    Entry& e = entries_[i];
    consumed_steps_ += e.segment.valid_steps;
    if (++e.use_count >= max_reuse_) {
      out.push_back(std::move(e.segment));
      entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      out.push_back(e.segment);
    }
  }
  return out;
}

void ReplayMem::Clear() {
  std::lock_guard lock(mu_);
  entries_.clear();
}

void ReplayMem::SetMaxReuse(std::uint32_t max_reuse) {
  if (max_reuse == 0) throw std::invalid_argument("max_reuse must be >= 1");
  std::lock_guard lock(mu_);
  max_reuse_ = max_reuse;
}

void ReplayMem::Shutdown() {
  std::lock_guard lock(mu_);
  shutdown_ = true;
  cv_.notify_all();
}

std::size_t ReplayMem::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::uint64_t ReplayMem::received_steps() const {
  std::lock_guard lock(mu_);
  return received_steps_;
}

std::uint64_t ReplayMem::consumed_steps() const {
  std::lock_guard lock(mu_);
  return consumed_steps_;
}

}  // namespace tleague::learner
