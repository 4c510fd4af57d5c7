#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "tleague/types.hpp"

namespace tleague::proto {

inline constexpr std::uint32_t kSchemaVersion = 1;
inline constexpr std::size_t kMaxFrameBytes = 64ull * 1024 * 1024;

// Wire tags. Values are part of the protocol, never reorder.
enum class MsgKind : std::uint8_t {
  kTaskRequest = 1,
  kTaskReply = 2,
  kOutcomeReport = 3,
  kSegmentPush = 4,
  kParamGet = 5,
  kParamPut = 6,
  kParamReply = 7,
  kFreezeModel = 8,
  kListModels = 9,
  kInferenceRequest = 10,
  kInferenceReply = 11,
  kLearnerTaskRequest = 12,
  kLearnerTaskReply = 13,
  kEndLearningPeriod = 14,
  kAck = 15,
  kError = 16,
};

const char* MsgKindName(MsgKind k);

struct TaskRequestBody {
  std::string actor_id;
  std::uint32_t learner_group = 0;
  bool operator==(const TaskRequestBody&) const = default;
};

struct TaskReplyBody {
  Task task;
  bool operator==(const TaskReplyBody&) const = default;
};

struct OutcomeReportBody {
  std::uint64_t task_id = 0;
  std::vector<Outcome> outcomes;  // per agent slot, learning agent first
  bool operator==(const OutcomeReportBody&) const = default;
};

struct SegmentPushBody {
  TrajectorySegment segment;
  bool operator==(const SegmentPushBody&) const = default;
};

struct ParamGetBody {
  // Either an explicit key or "latest:<lineage>" which the pool resolves to
  // the newest record of that lineage.
  std::string model_key;
  bool operator==(const ParamGetBody&) const = default;
};

struct ParamPutBody {
  ModelRecord record;
  bool operator==(const ParamPutBody&) const = default;
};

struct ParamReplyBody {
  ModelRecord record;
  bool operator==(const ParamReplyBody&) const = default;
};

struct FreezeModelBody {
  std::string model_key;
  bool operator==(const FreezeModelBody&) const = default;
};

struct ModelInfo {
  std::string model_key;
  bool frozen = false;
  std::uint64_t created_at_us = 0;
  bool operator==(const ModelInfo&) const = default;
};

// Same kind serves request (reply=false, entries empty) and response.
struct ListModelsBody {
  bool reply = false;
  std::vector<ModelInfo> entries;
  bool operator==(const ListModelsBody&) const = default;
};

struct InferenceRequestBody {
  std::string model_key;  // empty: the server's configured model
  std::vector<double> obs;
  bool operator==(const InferenceRequestBody&) const = default;
};

struct InferenceReplyBody {
  std::vector<double> logits;
  std::vector<double> probs;
  double value = 0.0;
  std::uint64_t model_version = 0;
  bool operator==(const InferenceReplyBody&) const = default;
};

struct LearnerTaskRequestBody {
  std::uint32_t group = 0;
  std::uint32_t rank = 0;
  bool operator==(const LearnerTaskRequestBody&) const = default;
};

struct LearnerTaskReplyBody {
  Task task;
  bool operator==(const LearnerTaskReplyBody&) const = default;
};

struct EndLearningPeriodBody {
  std::uint32_t group = 0;
  bool operator==(const EndLearningPeriodBody&) const = default;
};

struct AckBody {
  std::string detail;  // e.g. the successor model key after a period end
  bool operator==(const AckBody&) const = default;
};

struct ErrorBody {
  std::uint32_t code = 0;
  std::string message;
  bool operator==(const ErrorBody&) const = default;
};

// Error codes carried in ErrorBody.
enum ErrCode : std::uint32_t {
  kErrUnknown = 0,
  kErrNotFound = 1,
  kErrFrozenKey = 2,
  kErrBadRequest = 3,
  kErrNoActiveGroup = 4,
  kErrDuplicateReport = 5,
  kErrProtocol = 6,
  kErrNoModelLoaded = 7,
};

// Variant order must match MsgKind values (index = kind - 1).
using Payload = std::variant<
    TaskRequestBody, TaskReplyBody, OutcomeReportBody, SegmentPushBody,
    ParamGetBody, ParamPutBody, ParamReplyBody, FreezeModelBody,
    ListModelsBody, InferenceRequestBody, InferenceReplyBody,
    LearnerTaskRequestBody, LearnerTaskReplyBody, EndLearningPeriodBody,
    AckBody, ErrorBody>;

struct Message {
  std::uint32_t schema_version = kSchemaVersion;
  std::uint64_t correlation_id = 0;
  Payload payload;

  MsgKind kind() const {
    return static_cast<MsgKind>(payload.index() + 1);
  }

  bool operator==(const Message&) const = default;
};

// Convenience constructors.
Message MakeMessage(std::uint64_t correlation_id, Payload payload);
Message MakeError(std::uint64_t correlation_id, std::uint32_t code, std::string text);
Message MakeAck(std::uint64_t correlation_id, std::string detail = {});

}  // namespace tleague::proto
