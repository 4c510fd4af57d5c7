#include "tleague/policy/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tleague::policy {

namespace {

void CheckShape(PolicyShape shape) {
  if (shape.obs_dim == 0 || shape.n_actions == 0)
    throw std::invalid_argument("policy shape dimensions must be positive");
}

void CheckObs(const ParamBlob& params, std::span<const double> obs) {
  if (obs.size() != params.shape.obs_dim)
    throw std::invalid_argument("observation size does not match policy shape");
}

}  // namespace

std::size_t ParamCount(PolicyFamily family, PolicyShape shape) {
  CheckShape(shape);
  (void)family;  // both families: logits block + per-feature value head
  return static_cast<std::size_t>(shape.obs_dim) * shape.n_actions + shape.obs_dim;
}

ParamBlob InitParams(PolicyFamily family, PolicyShape shape, double init_scale,
                     std::uint64_t seed) {
  if (init_scale < 0.0) throw std::invalid_argument("init_scale must be >= 0");
  std::size_t n = ParamCount(family, shape);
  ParamBlob blob;
  blob.family = family;
  blob.shape = shape;
  blob.values.assign(n, 0.0);
  if (init_scale > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-init_scale, init_scale);
    for (double& v : blob.values) v = u(rng);
  }
  return blob;
}

std::vector<double> Softmax(std::span<const double> logits) {
  double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

std::size_t OneHotIndex(std::span<const double> obs) {
  std::size_t idx = obs.size();
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i] == 1.0) {
      if (idx != obs.size())
        throw std::invalid_argument("tabular observation must be one-hot");
      idx = i;
    } else if (obs[i] != 0.0) {
      throw std::invalid_argument("tabular observation must be one-hot");
    }
  }
  if (idx == obs.size())
    throw std::invalid_argument("tabular observation must be one-hot");
  return idx;
}

ActionDistribution Distribution(const ParamBlob& params, std::span<const double> obs) {
  CheckObs(params, obs);
  const std::uint32_t a = params.shape.n_actions;
  ActionDistribution dist;
  dist.logits.assign(a, 0.0);
  if (params.family == PolicyFamily::kTabularSoftmax) {
    std::size_t row = OneHotIndex(obs);
    for (std::uint32_t k = 0; k < a; ++k) dist.logits[k] = params.values[row * a + k];
  } else {
    // W is row-major [n_actions x obs_dim]
    for (std::uint32_t k = 0; k < a; ++k) {
      double z = 0.0;
      for (std::uint32_t j = 0; j < params.shape.obs_dim; ++j)
        z += params.values[static_cast<std::size_t>(k) * params.shape.obs_dim + j] * obs[j];
      dist.logits[k] = z;
    }
  }
  dist.probs = Softmax(dist.logits);
  return dist;
}

double ValueEstimate(const ParamBlob& params, std::span<const double> obs) {
  CheckObs(params, obs);
  const std::size_t value_off =
      static_cast<std::size_t>(params.shape.obs_dim) * params.shape.n_actions;
  if (params.family == PolicyFamily::kTabularSoftmax) {
    return params.values[value_off + OneHotIndex(obs)];
  }
  double v = 0.0;
  for (std::uint32_t j = 0; j < params.shape.obs_dim; ++j)
    v += params.values[value_off + j] * obs[j];
  return v;
}

SampledAction SampleAction(const ActionDistribution& dist, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = u(rng);
  double acc = 0.0;
  std::uint32_t action = static_cast<std::uint32_t>(dist.probs.size()) - 1;
  for (std::uint32_t i = 0; i < dist.probs.size(); ++i) {
    acc += dist.probs[i];
    if (r < acc) {
      action = i;
      break;
    }
  }
  return {action, std::log(dist.probs[action])};
}

void AccumulateGrad(const ParamBlob& params, std::span<const double> obs,
                    std::span<const double> dlogits, double dvalue,
                    std::span<double> grad) {
  CheckObs(params, obs);
  const std::uint32_t a = params.shape.n_actions;
  const std::uint32_t d = params.shape.obs_dim;
  if (dlogits.size() != a) throw std::invalid_argument("dlogits size mismatch");
  if (grad.size() != params.values.size()) throw std::invalid_argument("grad size mismatch");
  const std::size_t value_off = static_cast<std::size_t>(d) * a;
  if (params.family == PolicyFamily::kTabularSoftmax) {
    std::size_t row = OneHotIndex(obs);
    for (std::uint32_t k = 0; k < a; ++k) grad[row * a + k] += dlogits[k];
    grad[value_off + row] += dvalue;
  } else {
    for (std::uint32_t k = 0; k < a; ++k)
      for (std::uint32_t j = 0; j < d; ++j)
        grad[static_cast<std::size_t>(k) * d + j] += dlogits[k] * obs[j];
    for (std::uint32_t j = 0; j < d; ++j) grad[value_off + j] += dvalue * obs[j];
  }
}

std::vector<double> PolicyGradLogp(const ParamBlob& params, std::span<const double> obs,
                                   std::uint32_t action) {
  ActionDistribution dist = Distribution(params, obs);
  if (action >= dist.probs.size()) throw std::invalid_argument("action out of range");
  std::vector<double> dlogits(dist.probs.size());
  for (std::size_t k = 0; k < dlogits.size(); ++k)
    dlogits[k] = (k == action ? 1.0 : 0.0) - dist.probs[k];
  std::vector<double> grad(params.values.size(), 0.0);
  AccumulateGrad(params, obs, dlogits, 0.0, grad);
  return grad;
}

}  // namespace tleague::policy
