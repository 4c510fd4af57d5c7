#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tleague/types.hpp"

namespace tleague::actor {

// Splits one episode into consecutive non-overlapping unroll windows of
// length L. The bootstrap of each window is the recorded value estimate of
// the step after it (0 past the episode end); the final window is
// zero-padded with valid_steps marking the real prefix. segment_seq starts
// at `first_seq` and increments per segment.
std::vector<TrajectorySegment> SegmentEpisode(const std::vector<SegmentStep>& steps,
                                              std::uint32_t unroll_len,
                                              const std::string& model_key,
                                              std::uint64_t first_seq);

}  // namespace tleague::actor
