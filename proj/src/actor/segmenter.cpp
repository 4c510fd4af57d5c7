#include "tleague/actor/segmenter.hpp"

#include <stdexcept>

namespace tleague::actor {

std::vector<TrajectorySegment> SegmentEpisode(const std::vector<SegmentStep>& steps,
                                              std::uint32_t unroll_len,
                                              const std::string& model_key,
                                              std::uint64_t first_seq) {
  if (steps.empty()) throw std::invalid_argument("empty episode");
  if (unroll_len == 0) throw std::invalid_argument("unroll_len must be >= 1");
  std::vector<TrajectorySegment> out;
  for (std::size_t start = 0; start < steps.size(); start += unroll_len) {
    std::size_t end = std::min(start + unroll_len, steps.size());
    TrajectorySegment seg;
    seg.model_key = model_key;
    seg.segment_seq = first_seq + out.size();
    seg.valid_steps = static_cast<std::uint32_t>(end - start);
    seg.steps.assign(steps.begin() + start, steps.begin() + end);
    if (end < steps.size()) {
      seg.bootstrap_value = steps[end].value_est;
    } else {
      seg.bootstrap_value = 0.0;  // episode ended inside/at this window
    }
    // zero padding up to the fixed window length
    if (!seg.steps.empty()) {
      SegmentStep pad;
      pad.obs.assign(seg.steps.front().obs.size(), 0.0);
      while (seg.steps.size() < unroll_len) seg.steps.push_back(pad);
    }
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace tleague::actor
