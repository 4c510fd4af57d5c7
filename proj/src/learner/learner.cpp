#include "tleague/learner/learner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <span>
#include <stdexcept>
#include <thread>

#include "tleague/policy/policy.hpp"

namespace tleague::learner {

Algo ParseAlgo(const std::string& name) {
  if (name == "ppo") return Algo::kPpo;
  if (name == "vtrace") return Algo::kVtrace;
  throw std::invalid_argument("unknown algo: " + name);
}

Learner::Learner(LearnerConfig config, league::LeagueIface& league,
                 pool::ModelPoolIface& pool)
    : config_(config),
      league_(league),
      pool_(pool),
      replay_(config.replay_capacity, /*max_reuse set per task*/ 1, config.seed) {
  if (config_.num_shards == 0) throw std::invalid_argument("num_shards must be >= 1");
  StartPeriod();
}

void Learner::StartPeriod() {
  Task task = league_.RequestLearnerTask(config_.group, 0);
  ModelRecord record = pool_.GetModel(task.learning_model_key);
  std::lock_guard lock(task_mu_);
  current_key_ = task.learning_model_key;
  hyper_ = task.hyperparams;
  params_ = std::move(record.params);
  parent_key_ = record.parent_key;
  created_at_us_ = record.created_at_us;
  // Rebuild the ring so nothing tagged with the old key survives rollover.
  replay_.Clear();
  replay_.SetMaxReuse(hyper_.max_reuse);
}

void Learner::PushSegment(const TrajectorySegment& segment) {
  {
    std::lock_guard lock(task_mu_);
    if (segment.model_key != current_key_) {
      stale_dropped_.fetch_add(1, std::memory_order_relaxed);
      return;
    }
  }
  replay_.Push(segment);
}

rlmath::Minibatch Learner::BuildMinibatch(
    const std::vector<TrajectorySegment>& segments) const {
  rlmath::Minibatch batch;
  for (const TrajectorySegment& seg : segments) {
    const std::size_t n = seg.valid_steps;
    if (n == 0) continue;
    std::vector<double> rewards(n), values(n), behavior(n);
    // std::vector<bool> is packed and cannot back a span<const bool>
    std::unique_ptr<bool[]> done_buf(new bool[n]);
    for (std::size_t t = 0; t < n; ++t) {
      rewards[t] = seg.steps[t].reward;
      values[t] = seg.steps[t].value_est;
      behavior[t] = seg.steps[t].behavior_logp;
      done_buf[t] = seg.steps[t].done;
    }
    std::span<const bool> dones(done_buf.get(), n);
    std::vector<double> advantages, targets;
    if (config_.algo == Algo::kPpo) {
      advantages = rlmath::GaeAdvantages(rewards, values, seg.bootstrap_value, dones,
                                         hyper_.gamma, hyper_.lam);
      targets = rlmath::LambdaReturn(rewards, values, seg.bootstrap_value, dones,
                                     hyper_.gamma, hyper_.lam);
    } else {
      // V-trace needs the target policy's logps at consume time.
      std::vector<double> target_logps(n);
      for (std::size_t t = 0; t < n; ++t) {
        auto dist = policy::Distribution(params_, seg.steps[t].obs);
        target_logps[t] = std::log(dist.probs[seg.steps[t].action]);
      }
      auto vt = rlmath::VtraceTargets(behavior, target_logps, rewards, values,
                                      seg.bootstrap_value, dones, hyper_.gamma,
                                      hyper_.rho_bar, hyper_.c_bar);
      advantages = std::move(vt.pg_adv);
      targets = std::move(vt.vs);
    }
    for (std::size_t t = 0; t < n; ++t) {
      rlmath::Sample s;
      s.obs = seg.steps[t].obs;
      s.action = seg.steps[t].action;
      s.behavior_logp = behavior[t];
      s.advantage = advantages[t];
      s.value_target = targets[t];
      batch.samples.push_back(std::move(s));
    }
  }
  return batch;
}

bool Learner::TrainStep() {
  if (config_.step_delay_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(config_.step_delay_ms));
  }
  const std::size_t per_shard = hyper_.batch_size;
  auto segments = replay_.SampleBlocking(per_shard * config_.num_shards);
  if (segments.empty()) return false;

  // Each shard works on its contiguous slice of the draw; gradients are then
  // averaged in rank order so every shard would apply the bit-identical
  // update.
  std::vector<rlmath::LossResult> results(config_.num_shards);
  std::vector<std::exception_ptr> errors(config_.num_shards);
  std::vector<std::thread> shards;
  shards.reserve(config_.num_shards);
  for (std::uint32_t r = 0; r < config_.num_shards; ++r) {
    shards.emplace_back([&, r] {
      try {
        std::vector<TrajectorySegment> slice(
            segments.begin() + static_cast<std::ptrdiff_t>(r * per_shard),
            segments.begin() + static_cast<std::ptrdiff_t>((r + 1) * per_shard));
        rlmath::Minibatch batch = BuildMinibatch(slice);
        results[r] = config_.algo == Algo::kPpo
                         ? rlmath::PpoLossAndGrad(params_, nullptr, batch, hyper_)
                         : rlmath::PgLossAndGrad(params_, batch, hyper_);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    });
  }
  for (auto& t : shards) t.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);

  std::vector<double> avg(results[0].grad.size(), 0.0);
  double loss = 0.0;
  for (const auto& res : results) {
    if (!std::isfinite(res.loss)) {
      throw std::runtime_error("non-finite loss at update step " +
                               std::to_string(update_steps_ + 1));
    }
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += res.grad[i];
    loss += res.loss;
  }
  const double inv = 1.0 / static_cast<double>(config_.num_shards);
  for (double& g : avg) g *= inv;
  (void)loss;

  params_ = rlmath::SgdStep(params_, avg, hyper_.learning_rate);
  ++update_steps_;
  if (config_.publish_interval > 0 && update_steps_ % config_.publish_interval == 0) {
    Publish();
  }
  return true;
}

void Learner::Publish() {
  ModelRecord record;
  record.model_key = current_key_;
  record.params = params_;
  record.hyperparams = hyper_;
  record.parent_key = parent_key_;
  record.created_at_us = created_at_us_;
  record.frozen = false;
  pool_.PutModel(record);
}

std::string Learner::FinishPeriod() {
  Publish();  // the frozen pool member must be the final parameters
  std::string successor = league_.EndLearningPeriod(config_.group);
  StartPeriod();
  return successor;
}

std::string Learner::RunPeriod() {
  for (std::uint32_t k = 0; k < config_.period_steps; ++k) {
    if (!TrainStep()) return {};
  }
  return FinishPeriod();
}

ThroughputStats Learner::Counters() const {
  ThroughputStats s;
  s.rfps = static_cast<double>(replay_.received_steps());
  s.cfps = static_cast<double>(replay_.consumed_steps());
  s.update_steps = update_steps_;
  s.stale_dropped = stale_dropped_.load(std::memory_order_relaxed);
  return s;
}

void Learner::LogMetricsLine(std::string& out) {
  using Clock = std::chrono::steady_clock;
  const double now = std::chrono::duration<double>(Clock::now().time_since_epoch()).count();
  const std::uint64_t recv = replay_.received_steps();
  const std::uint64_t cons = replay_.consumed_steps();
  double rfps = 0.0;
  double cfps = 0.0;
  if (last_metric_ts_ > 0.0 && now > last_metric_ts_) {
    const double dt = now - last_metric_ts_;
    rfps = static_cast<double>(recv - last_metric_recv_) / dt;
    cfps = static_cast<double>(cons - last_metric_cons_) / dt;
  }
  last_metric_ts_ = now;
  last_metric_recv_ = recv;
  last_metric_cons_ = cons;

  const auto wall = std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count();
  char buf[160];
  std::snprintf(buf, sizeof(buf), "ts=%lld group=%u rfps=%.1f cfps=%.1f steps=%llu\n",
                static_cast<long long>(wall), config_.group, rfps, cfps,
                static_cast<unsigned long long>(update_steps_));
  out += buf;
}

}  // namespace tleague::learner
