#include "tleague/learner/learner_service.hpp"

namespace tleague::learner {

LearnerService::LearnerService(SegmentSink& sink, const std::string& host,
                               std::uint16_t port)
    : sink_(sink) {
  server_ = std::make_unique<net::Server>(
      host, port, [this](const proto::Message& req) { return Handle(req); });
}

proto::Message LearnerService::Handle(const proto::Message& req) {
  if (const auto* push = std::get_if<proto::SegmentPushBody>(&req.payload)) {
    sink_.PushSegment(push->segment);
    return proto::MakeAck(req.correlation_id);
  }
  return proto::MakeError(req.correlation_id, proto::kErrBadRequest,
                          "learner only accepts SegmentPush");
}

void LearnerClient::PushSegment(const TrajectorySegment& segment) {
  auto reply = rpc_.Call(proto::SegmentPushBody{segment});
  net::Expect<proto::AckBody>(reply);
}

}  // namespace tleague::learner
