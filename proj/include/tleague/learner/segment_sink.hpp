#pragma once

#include "tleague/types.hpp"

namespace tleague::learner {

// Where actors stream trajectory segments; implemented by the learner core
// (in-process) and LearnerClient (RPC).
class SegmentSink {
 public:
  virtual ~SegmentSink() = default;
  virtual void PushSegment(const TrajectorySegment& segment) = 0;
};

}  // namespace tleague::learner
