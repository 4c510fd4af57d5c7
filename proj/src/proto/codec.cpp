#include "tleague/proto/codec.hpp"

#include <bit>
#include <cstring>

namespace tleague::proto {

namespace {

class ByteWriter {
 public:
  void U8(std::uint8_t v) { buf_.push_back(v); }

  void U32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }

  void Bool(bool v) { U8(v ? 1 : 0); }

  void Str(const std::string& s) {
    U32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }

  void F64Vec(const std::vector<double>& v) {
    U32(static_cast<std::uint32_t>(v.size()));
    for (double x : v) F64(x);
  }

  std::vector<std::uint8_t> Take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t U8() {
    Need(1);
    return data_[pos_++];
  }

  std::uint32_t U32() {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }

  std::uint64_t U64() {
    Need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }

  double F64() { return std::bit_cast<double>(U64()); }

  bool Bool() {
    std::uint8_t v = U8();
    if (v > 1) throw DecodeError("invalid boolean byte");
    return v == 1;
  }

  std::string Str() {
    std::uint32_t n = U32();
    Need(n);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  std::vector<double> F64Vec() {
    std::uint32_t n = U32();
    Need(static_cast<std::size_t>(n) * 8);
    std::vector<double> v(n);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = F64();
    return v;
  }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void Need(std::size_t n) {
    if (data_.size() - pos_ < n) throw DecodeError("truncated frame");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

// --- nested payload pieces ---

void WriteHyperParams(ByteWriter& w, const HyperParams& hp) {
  w.F64(hp.learning_rate);
  w.F64(hp.gamma);
  w.F64(hp.lam);
  w.F64(hp.clip_eps);
  w.F64(hp.vf_coef);
  w.F64(hp.ent_coef);
  w.F64(hp.kl_teacher_coef);
  w.F64(hp.rho_bar);
  w.F64(hp.c_bar);
  w.F64(hp.elo_sigma);
  w.F64(hp.elo_k);
  w.U32(hp.batch_size);
  w.U32(hp.unroll_len);
  w.U32(hp.max_reuse);
  w.Bool(hp.adv_norm);
}

HyperParams ReadHyperParams(ByteReader& r) {
  HyperParams hp;
  hp.learning_rate = r.F64();
  hp.gamma = r.F64();
  hp.lam = r.F64();
  hp.clip_eps = r.F64();
  hp.vf_coef = r.F64();
  hp.ent_coef = r.F64();
  hp.kl_teacher_coef = r.F64();
  hp.rho_bar = r.F64();
  hp.c_bar = r.F64();
  hp.elo_sigma = r.F64();
  hp.elo_k = r.F64();
  hp.batch_size = r.U32();
  hp.unroll_len = r.U32();
  hp.max_reuse = r.U32();
  hp.adv_norm = r.Bool();
  return hp;
}

void WriteParamBlob(ByteWriter& w, const ParamBlob& b) {
  w.U8(static_cast<std::uint8_t>(b.family));
  w.U32(b.shape.obs_dim);
  w.U32(b.shape.n_actions);
  w.F64Vec(b.values);
}

ParamBlob ReadParamBlob(ByteReader& r) {
  ParamBlob b;
  std::uint8_t fam = r.U8();
  if (fam > 1) throw DecodeError("unknown policy family");
  b.family = static_cast<PolicyFamily>(fam);
  b.shape.obs_dim = r.U32();
  b.shape.n_actions = r.U32();
  b.values = r.F64Vec();
  return b;
}

void WriteModelRecord(ByteWriter& w, const ModelRecord& m) {
  w.Str(m.model_key);
  WriteParamBlob(w, m.params);
  WriteHyperParams(w, m.hyperparams);
  w.Str(m.parent_key);
  w.U64(m.created_at_us);
  w.Bool(m.frozen);
}

ModelRecord ReadModelRecord(ByteReader& r) {
  ModelRecord m;
  m.model_key = r.Str();
  m.params = ReadParamBlob(r);
  m.hyperparams = ReadHyperParams(r);
  m.parent_key = r.Str();
  m.created_at_us = r.U64();
  m.frozen = r.Bool();
  return m;
}

void WriteTask(ByteWriter& w, const Task& t) {
  w.U64(t.task_id);
  w.U32(t.learner_group);
  w.Str(t.learning_model_key);
  w.U32(static_cast<std::uint32_t>(t.opponent_model_keys.size()));
  for (const auto& k : t.opponent_model_keys) w.Str(k);
  WriteHyperParams(w, t.hyperparams);
}

Task ReadTask(ByteReader& r) {
  Task t;
  t.task_id = r.U64();
  t.learner_group = r.U32();
  t.learning_model_key = r.Str();
  std::uint32_t n = r.U32();
  t.opponent_model_keys.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) t.opponent_model_keys[i] = r.Str();
  t.hyperparams = ReadHyperParams(r);
  return t;
}

void WriteSegment(ByteWriter& w, const TrajectorySegment& s) {
  w.Str(s.model_key);
  w.U32(static_cast<std::uint32_t>(s.steps.size()));
  for (const auto& st : s.steps) {
    w.F64Vec(st.obs);
    w.U32(st.action);
    w.F64(st.reward);
    w.F64(st.behavior_logp);
    w.F64(st.value_est);
    w.Bool(st.done);
  }
  w.U32(s.valid_steps);
  w.F64(s.bootstrap_value);
  w.U64(s.segment_seq);
}

TrajectorySegment ReadSegment(ByteReader& r) {
  TrajectorySegment s;
  s.model_key = r.Str();
  std::uint32_t n = r.U32();
  s.steps.resize(n);
  for (auto& st : s.steps) {
    st.obs = r.F64Vec();
    st.action = r.U32();
    st.reward = r.F64();
    st.behavior_logp = r.F64();
    st.value_est = r.F64();
    st.done = r.Bool();
  }
  s.valid_steps = r.U32();
  s.bootstrap_value = r.F64();
  s.segment_seq = r.U64();
  return s;
}

// --- payload bodies ---

struct PayloadWriter {
  ByteWriter& w;

  void operator()(const TaskRequestBody& b) {
    w.Str(b.actor_id);
    w.U32(b.learner_group);
  }
  void operator()(const TaskReplyBody& b) { WriteTask(w, b.task); }
  void operator()(const OutcomeReportBody& b) {
    w.U64(b.task_id);
    w.U32(static_cast<std::uint32_t>(b.outcomes.size()));
    for (Outcome o : b.outcomes) w.U8(static_cast<std::uint8_t>(o));
  }
  void operator()(const SegmentPushBody& b) { WriteSegment(w, b.segment); }
  void operator()(const ParamGetBody& b) { w.Str(b.model_key); }
  void operator()(const ParamPutBody& b) { WriteModelRecord(w, b.record); }
  void operator()(const ParamReplyBody& b) { WriteModelRecord(w, b.record); }
  void operator()(const FreezeModelBody& b) { w.Str(b.model_key); }
  void operator()(const ListModelsBody& b) {
    w.Bool(b.reply);
    w.U32(static_cast<std::uint32_t>(b.entries.size()));
    for (const auto& e : b.entries) {
      w.Str(e.model_key);
      w.Bool(e.frozen);
      w.U64(e.created_at_us);
    }
  }
  void operator()(const InferenceRequestBody& b) {
    w.Str(b.model_key);
    w.F64Vec(b.obs);
  }
  void operator()(const InferenceReplyBody& b) {
    w.F64Vec(b.logits);
    w.F64Vec(b.probs);
    w.F64(b.value);
    w.U64(b.model_version);
  }
  void operator()(const LearnerTaskRequestBody& b) {
    w.U32(b.group);
    w.U32(b.rank);
  }
  void operator()(const LearnerTaskReplyBody& b) { WriteTask(w, b.task); }
  void operator()(const EndLearningPeriodBody& b) { w.U32(b.group); }
  void operator()(const AckBody& b) { w.Str(b.detail); }
  void operator()(const ErrorBody& b) {
    w.U32(b.code);
    w.Str(b.message);
  }
};

Payload ReadPayload(MsgKind kind, ByteReader& r) {
  switch (kind) {
    case MsgKind::kTaskRequest: {
      TaskRequestBody b;
      b.actor_id = r.Str();
      b.learner_group = r.U32();
      return b;
    }
    case MsgKind::kTaskReply:
      return TaskReplyBody{ReadTask(r)};
    case MsgKind::kOutcomeReport: {
      OutcomeReportBody b;
      b.task_id = r.U64();
      std::uint32_t n = r.U32();
      b.outcomes.resize(n);
      for (auto& o : b.outcomes) {
        std::uint8_t v = r.U8();
        if (v > 2) throw DecodeError("invalid outcome value");
        o = static_cast<Outcome>(v);
      }
      return b;
    }
    case MsgKind::kSegmentPush:
      return SegmentPushBody{ReadSegment(r)};
    case MsgKind::kParamGet:
      return ParamGetBody{r.Str()};
    case MsgKind::kParamPut:
      return ParamPutBody{ReadModelRecord(r)};
    case MsgKind::kParamReply:
      return ParamReplyBody{ReadModelRecord(r)};
    case MsgKind::kFreezeModel:
      return FreezeModelBody{r.Str()};
    case MsgKind::kListModels: {
      ListModelsBody b;
      b.reply = r.Bool();
      std::uint32_t n = r.U32();
      b.entries.resize(n);
      for (auto& e : b.entries) {
        e.model_key = r.Str();
        e.frozen = r.Bool();
        e.created_at_us = r.U64();
      }
      return b;
    }
    case MsgKind::kInferenceRequest: {
      InferenceRequestBody b;
      b.model_key = r.Str();
      b.obs = r.F64Vec();
      return b;
    }
    case MsgKind::kInferenceReply: {
      InferenceReplyBody b;
      b.logits = r.F64Vec();
      b.probs = r.F64Vec();
      b.value = r.F64();
      b.model_version = r.U64();
      return b;
    }
    case MsgKind::kLearnerTaskRequest: {
      LearnerTaskRequestBody b;
      b.group = r.U32();
      b.rank = r.U32();
      return b;
    }
    case MsgKind::kLearnerTaskReply:
      return LearnerTaskReplyBody{ReadTask(r)};
    case MsgKind::kEndLearningPeriod:
      return EndLearningPeriodBody{r.U32()};
    case MsgKind::kAck:
      return AckBody{r.Str()};
    case MsgKind::kError: {
      ErrorBody b;
      b.code = r.U32();
      b.message = r.Str();
      return b;
    }
  }
  throw DecodeError("unknown message kind");
}

}  // namespace

const char* MsgKindName(MsgKind k) {
  switch (k) {
    case MsgKind::kTaskRequest: return "TaskRequest";
    case MsgKind::kTaskReply: return "TaskReply";
    case MsgKind::kOutcomeReport: return "OutcomeReport";
    case MsgKind::kSegmentPush: return "SegmentPush";
    case MsgKind::kParamGet: return "ParamGet";
    case MsgKind::kParamPut: return "ParamPut";
    case MsgKind::kParamReply: return "ParamReply";
    case MsgKind::kFreezeModel: return "FreezeModel";
    case MsgKind::kListModels: return "ListModels";
    case MsgKind::kInferenceRequest: return "InferenceRequest";
    case MsgKind::kInferenceReply: return "InferenceReply";
    case MsgKind::kLearnerTaskRequest: return "LearnerTaskRequest";
    case MsgKind::kLearnerTaskReply: return "LearnerTaskReply";
    case MsgKind::kEndLearningPeriod: return "EndLearningPeriod";
    case MsgKind::kAck: return "Ack";
    case MsgKind::kError: return "Error";
  }
  return "?";
}

Message MakeMessage(std::uint64_t correlation_id, Payload payload) {
  Message m;
  m.correlation_id = correlation_id;
  m.payload = std::move(payload);
  return m;
}

Message MakeError(std::uint64_t correlation_id, std::uint32_t code, std::string text) {
  return MakeMessage(correlation_id, ErrorBody{code, std::move(text)});
}

Message MakeAck(std::uint64_t correlation_id, std::string detail) {
  return MakeMessage(correlation_id, AckBody{std::move(detail)});
}

std::vector<std::uint8_t> Encode(const Message& msg) {
  ByteWriter body;
  body.U32(msg.schema_version);
  body.U8(static_cast<std::uint8_t>(msg.kind()));
  body.U64(msg.correlation_id);
  std::visit(PayloadWriter{body}, msg.payload);
  std::vector<std::uint8_t> b = body.Take();
  if (b.size() + 4 > kMaxFrameBytes) throw EncodeError("frame exceeds maximum size");

  ByteWriter out;
  out.U32(static_cast<std::uint32_t>(b.size()));
  std::vector<std::uint8_t> frame = out.Take();
  frame.insert(frame.end(), b.begin(), b.end());
  return frame;
}

Message Decode(std::span<const std::uint8_t> frame) {
  ByteReader r(frame);
  std::uint32_t body_len = r.U32();
  if (body_len != frame.size() - 4) {
    throw DecodeError(body_len > frame.size() - 4 ? "truncated frame"
                                                  : "trailing bytes after frame");
  }
  if (frame.size() > kMaxFrameBytes) throw DecodeError("frame exceeds maximum size");

  Message m;
  m.schema_version = r.U32();
  if (m.schema_version != kSchemaVersion) throw DecodeError("schema version mismatch");
  std::uint8_t kind = r.U8();
  if (kind < 1 || kind > 16) throw DecodeError("unknown message kind");
  m.correlation_id = r.U64();
  m.payload = ReadPayload(static_cast<MsgKind>(kind), r);
  if (r.remaining() != 0) throw DecodeError("trailing bytes after payload");
  return m;
}

void FrameSplitter::Feed(std::span<const std::uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

bool FrameSplitter::Next(std::vector<std::uint8_t>& frame) {
  if (buf_.size() < 4) return false;
  std::uint32_t body_len = 0;
  for (int i = 0; i < 4; ++i) body_len |= static_cast<std::uint32_t>(buf_[i]) << (8 * i);
  if (static_cast<std::size_t>(body_len) + 4 > kMaxFrameBytes)
    throw DecodeError("frame exceeds maximum size");
  std::size_t total = static_cast<std::size_t>(body_len) + 4;
  if (buf_.size() < total) return false;
  frame.assign(buf_.begin(), buf_.begin() + total);
  buf_.erase(buf_.begin(), buf_.begin() + total);
  return true;
}

}  // namespace tleague::proto
