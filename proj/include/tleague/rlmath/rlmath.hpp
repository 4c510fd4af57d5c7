#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tleague/policy/policy.hpp"
#include "tleague/types.hpp"

namespace tleague::rlmath {

// Backward-recursive lambda-return with value bootstrap at the segment end.
// dones[t] marks an episode boundary after step t and zeroes the bootstrap
// across it. All arrays have length L >= 1.
std::vector<double> LambdaReturn(std::span<const double> rewards,
                                 std::span<const double> values, double bootstrap,
                                 std::span<const bool> dones, double gamma, double lam);

// Generalized advantage estimates from the TD-residual recursion.
// Identity: gae + values == lambda_return (checked in tests).
std::vector<double> GaeAdvantages(std::span<const double> rewards,
                                  std::span<const double> values, double bootstrap,
                                  std::span<const bool> dones, double gamma, double lam);

struct VtraceResult {
  std::vector<double> vs;
  std::vector<double> pg_adv;
};

// Truncated-importance-weight off-policy value targets and policy-gradient
// advantages.
VtraceResult VtraceTargets(std::span<const double> behavior_logps,
                           std::span<const double> target_logps,
                           std::span<const double> rewards,
                           std::span<const double> values, double bootstrap,
                           std::span<const bool> dones, double gamma, double rho_bar,
                           double c_bar);

struct Sample {
  std::vector<double> obs;
  std::uint32_t action = 0;
  double behavior_logp = 0.0;
  double advantage = 0.0;
  double value_target = 0.0;
};

struct Minibatch {
  std::vector<Sample> samples;
};

struct LossStats {
  double clip_fraction = 0.0;
  double mean_ratio = 0.0;
  double entropy = 0.0;
  double value_loss = 0.0;
};

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;
  LossStats stats;
};

// Clipped-surrogate PPO loss with value MSE, entropy bonus and optional
// teacher-KL penalty; analytic gradient over the flat parameter vector.
// Advantages are normalized per minibatch when hp.adv_norm is set.
LossResult PpoLossAndGrad(const ParamBlob& params, const ParamBlob* teacher,
                          const Minibatch& batch, const HyperParams& hp);

// Policy-gradient loss for precomputed (stop-gradient) advantages, used by
// the V-trace learner path: -mean(adv * log pi) + vf * MSE - ent * H.
LossResult PgLossAndGrad(const ParamBlob& params, const Minibatch& batch,
                         const HyperParams& hp);

// values <- values - learning_rate * grad, returned as a new blob.
ParamBlob SgdStep(const ParamBlob& params, std::span<const double> grad,
                  double learning_rate);

}  // namespace tleague::rlmath
