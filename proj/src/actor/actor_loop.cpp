#include "tleague/actor/actor_loop.hpp"

#include <cmath>
#include <stdexcept>

#include "tleague/policy/policy.hpp"

namespace tleague::actor {

Actor::Actor(ActorConfig config, league::LeagueIface& league,
             pool::ModelPoolIface& pool, learner::SegmentSink& sink,
             infserver::InferenceIface* inference)
    : config_(std::move(config)),
      league_(league),
      pool_(pool),
      sink_(sink),
      inference_(inference),
      env_(env::MakeEnv(config_.env)),
      rng_(config_.seed) {
  if (config_.unroll_len == 0) throw std::invalid_argument("unroll_len must be >= 1");
  if (config_.param_refresh_interval == 0) {
    throw std::invalid_argument("param_refresh_interval must be >= 1");
  }
}

const ParamBlob& Actor::OpponentParams(const std::string& key) {
  if (key == theta_key_) return theta_;
  auto it = frozen_cache_.find(key);
  if (it != frozen_cache_.end()) return it->second;
  ModelRecord record = pool_.GetModel(key);
  if (record.frozen) {
    return frozen_cache_.emplace(key, std::move(record.params)).first->second;
  }
  // Live key from another group (exploiter role): hold it for this episode.
  scratch_.push_back(std::move(record.params));
  return scratch_.back();
}

void Actor::RunEpisode() {
  Task task = league_.RequestActorTask(config_.actor_id, config_.learner_group);

  const bool key_changed = task.learning_model_key != theta_key_;
  if (key_changed || episodes_since_refresh_ >= config_.param_refresh_interval) {
    theta_ = pool_.GetModel(task.learning_model_key).params;
    theta_key_ = task.learning_model_key;
    episodes_since_refresh_ = 0;
  }

  scratch_.clear();
  std::vector<const ParamBlob*> opponents;
  opponents.reserve(task.opponent_model_keys.size());
  for (const std::string& key : task.opponent_model_keys) {
    opponents.push_back(&OpponentParams(key));
  }
  if (opponents.size() + 1 != env_->n_agents()) {
    throw std::runtime_error("task opponent count does not match env agents");
  }

  std::vector<SegmentStep> steps;
  auto obs = env_->Reset();
  env::StepResult result;
  while (true) {
    std::vector<std::uint32_t> actions(env_->n_agents());

    // Learning agent (slot 0): remote inference when configured, and the
    // recorded logp/value come from the exact blob version used to act.
    policy::ActionDistribution dist0;
    double value0 = 0.0;
    if (inference_ != nullptr) {
      auto reply = inference_->Infer(obs[0]);
      dist0.logits = std::move(reply.logits);
      dist0.probs = std::move(reply.probs);
      value0 = reply.value;
    } else {
      dist0 = policy::Distribution(theta_, obs[0]);
      value0 = policy::ValueEstimate(theta_, obs[0]);
    }
    auto sampled = policy::SampleAction(dist0, rng_);
    actions[0] = sampled.action;

    for (std::size_t i = 0; i < opponents.size(); ++i) {
      auto dist = policy::Distribution(*opponents[i], obs[i + 1]);
      actions[i + 1] = policy::SampleAction(dist, rng_).action;
    }

    result = env_->Step(actions);

    SegmentStep step;
    step.obs = std::move(obs[0]);
    step.action = sampled.action;
    step.reward = result.rewards[0];
    step.behavior_logp = sampled.logp;
    step.value_est = value0;
    step.done = result.done;
    steps.push_back(std::move(step));

    if (result.done) break;
    obs = std::move(result.observations);
  }

  auto segments =
      SegmentEpisode(steps, config_.unroll_len, task.learning_model_key, next_seq_);
  next_seq_ += segments.size();
  for (const auto& seg : segments) sink_.PushSegment(seg);

  league_.ReportOutcome(task.task_id, result.outcomes);

  ++episodes_;
  ++episodes_since_refresh_;
}

void Actor::Run(const std::atomic<bool>& stop) {
  while (!stop.load(std::memory_order_relaxed)) RunEpisode();
}

}  // namespace tleague::actor
