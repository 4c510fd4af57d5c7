#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tleague {

// Per-agent result of a finished game.
enum class Outcome : std::uint8_t { kWin = 0, kLoss = 1, kTie = 2 };

const char* OutcomeName(Outcome o);

enum class PolicyFamily : std::uint8_t { kTabularSoftmax = 0, kLinearSoftmax = 1 };

// For tabular_softmax, obs_dim is the size of the enumerated observation set
// (observations are one-hot vectors of that length). For linear_softmax it is
// the raw feature dimension.
struct PolicyShape {
  std::uint32_t obs_dim = 0;
  std::uint32_t n_actions = 0;

  bool operator==(const PolicyShape&) const = default;
};

// Flat parameter vector for one policy: action logits block followed by the
// value-head block. Immutable by convention once handed out.
struct ParamBlob {
  PolicyFamily family = PolicyFamily::kTabularSoftmax;
  PolicyShape shape;
  std::vector<double> values;

  bool operator==(const ParamBlob&) const = default;
};

struct HyperParams {
  double learning_rate = 1e-2;
  double gamma = 0.99;
  double lam = 0.95;
  double clip_eps = 0.2;
  double vf_coef = 0.5;
  double ent_coef = 0.01;
  double kl_teacher_coef = 0.0;
  double rho_bar = 1.0;
  double c_bar = 1.0;
  double elo_sigma = 200.0;
  double elo_k = 16.0;
  std::uint32_t batch_size = 32;
  std::uint32_t unroll_len = 1;
  std::uint32_t max_reuse = 1;
  bool adv_norm = true;

  // Throws std::invalid_argument on an out-of-range field.
  void Validate() const;

  bool operator==(const HyperParams&) const = default;
};

// One element of the opponent pool. Frozen records never change again.
struct ModelRecord {
  std::string model_key;
  ParamBlob params;
  HyperParams hyperparams;
  std::string parent_key;  // empty means no parent (seed model)
  std::uint64_t created_at_us = 0;
  bool frozen = false;

  bool operator==(const ModelRecord&) const = default;
};

// The league manager's assignment to actors and learners.
struct Task {
  std::uint64_t task_id = 0;
  std::uint32_t learner_group = 0;
  std::string learning_model_key;
  std::vector<std::string> opponent_model_keys;
  HyperParams hyperparams;

  bool operator==(const Task&) const = default;
};

struct SegmentStep {
  std::vector<double> obs;
  std::uint32_t action = 0;
  double reward = 0.0;
  double behavior_logp = 0.0;
  double value_est = 0.0;
  bool done = false;

  bool operator==(const SegmentStep&) const = default;
};

// Fixed-length unroll window of learning-agent steps. Only the first
// valid_steps entries are real; the rest are zero padding and must be
// excluded from losses.
struct TrajectorySegment {
  std::string model_key;
  std::vector<SegmentStep> steps;
  std::uint32_t valid_steps = 0;
  double bootstrap_value = 0.0;
  std::uint64_t segment_seq = 0;

  bool operator==(const TrajectorySegment&) const = default;
};

}  // namespace tleague
