#pragma once

#include <memory>

#include "tleague/learner/segment_sink.hpp"
#include "tleague/net/tcp.hpp"

namespace tleague::learner {

// Segment-ingest endpoint. Rank 0 wires it to the learner core; higher ranks
// wire it to a LearnerClient pointed at rank 0, acting as pure relays.
class LearnerService {
 public:
  LearnerService(SegmentSink& sink, const std::string& host, std::uint16_t port);

  net::Endpoint endpoint() const { return server_->endpoint(); }
  void Stop() { server_->Stop(); }

 private:
  proto::Message Handle(const proto::Message& req);

  SegmentSink& sink_;
  std::unique_ptr<net::Server> server_;
};

class LearnerClient : public SegmentSink {
 public:
  explicit LearnerClient(net::Endpoint ep) : rpc_(std::move(ep)) {}

  void PushSegment(const TrajectorySegment& segment) override;

 private:
  net::RpcClient rpc_;
};

}  // namespace tleague::learner
