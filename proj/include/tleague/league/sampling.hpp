#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tleague/league/payoff.hpp"

namespace tleague::league {

enum class SchemeKind {
  kSelfPlayLatest,
  kUniformRecentK,
  kPfsp,
  kMixture,  // self-play / PFSP probabilistic mixture
};

SchemeKind ParseSchemeKind(const std::string& name);
const char* SchemeKindName(SchemeKind k);

struct SamplingScheme {
  SchemeKind kind = SchemeKind::kSelfPlayLatest;
  std::uint32_t recent_k = 50;
  double pfsp_exponent = 2.0;
  double mixture_self_play_weight = 0.35;
  std::optional<double> elo_matching_sigma;  // Gaussian match-quality kernel
};

struct WeightedKey {
  std::string key;
  double prob = 0.0;
};

// Analytic opponent distribution for one draw. `frozen_keys` is the pool in
// creation order; `current_key` stands in for the live learning model. Falls
// back to pure self-play while the frozen pool is empty. Throws
// std::invalid_argument when there is no candidate at all.
std::vector<WeightedKey> OpponentWeights(const PayoffMatrix& payoff,
                                         const std::string& current_key,
                                         const std::vector<std::string>& frozen_keys,
                                         const SamplingScheme& scheme);

// One draw from OpponentWeights.
std::string SampleOpponent(const PayoffMatrix& payoff, const std::string& current_key,
                           const std::vector<std::string>& frozen_keys,
                           const SamplingScheme& scheme, std::mt19937_64& rng);

// PFSP priority f(p) = (1 - p)^exponent of the smoothed win rate.
double PfspWeight(double win_rate, double exponent);

}  // namespace tleague::league
