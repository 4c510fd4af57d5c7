#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tleague/types.hpp"

namespace tleague::policy {

// Discrete action distribution; probs = softmax(logits).
struct ActionDistribution {
  std::vector<double> logits;
  std::vector<double> probs;

  bool operator==(const ActionDistribution&) const = default;
};

// Number of parameters for a family/shape: the logits block followed by the
// value-head block (one value weight per observation row / feature).
std::size_t ParamCount(PolicyFamily family, PolicyShape shape);

// i.i.d. uniform values in [-init_scale, +init_scale]. init_scale 0 gives
// the uniform-random policy. Throws std::invalid_argument on a bad shape or
// negative scale.
ParamBlob InitParams(PolicyFamily family, PolicyShape shape, double init_scale,
                     std::uint64_t seed);

// Numerically stable softmax.
std::vector<double> Softmax(std::span<const double> logits);

// tabular_softmax requires obs to be exactly one-hot (the enumerated
// observation set is the standard basis); linear_softmax computes
// logits = W * obs. Throws std::invalid_argument on shape mismatch.
ActionDistribution Distribution(const ParamBlob& params, std::span<const double> obs);

// Value-head estimate for the same observation.
double ValueEstimate(const ParamBlob& params, std::span<const double> obs);

struct SampledAction {
  std::uint32_t action = 0;
  double logp = 0.0;
};

SampledAction SampleAction(const ActionDistribution& dist, std::mt19937_64& rng);

// Chain rule: scatter per-sample d(loss)/d(logits) and d(loss)/d(value) into
// a gradient over the flat parameter vector. grad must have ParamCount
// entries and is accumulated into.
void AccumulateGrad(const ParamBlob& params, std::span<const double> obs,
                    std::span<const double> dlogits, double dvalue,
                    std::span<double> grad);

// Gradient of log pi(action | obs) w.r.t. the flat parameter vector.
std::vector<double> PolicyGradLogp(const ParamBlob& params, std::span<const double> obs,
                                   std::uint32_t action);

// Index of the set entry of a one-hot observation (tabular indexing).
// Throws std::invalid_argument if obs is not one-hot.
std::size_t OneHotIndex(std::span<const double> obs);

}  // namespace tleague::policy
