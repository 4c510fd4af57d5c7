#include "tleague/league/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace tleague::league {

SchemeKind ParseSchemeKind(const std::string& name) {
  if (name == "self_play_latest") return SchemeKind::kSelfPlayLatest;
  if (name == "uniform_recent_k") return SchemeKind::kUniformRecentK;
  if (name == "pfsp") return SchemeKind::kPfsp;
  if (name == "mixture") return SchemeKind::kMixture;
  throw std::invalid_argument("unknown sampling scheme: " + name);
}

const char* SchemeKindName(SchemeKind k) {
  switch (k) {
    case SchemeKind::kSelfPlayLatest: return "self_play_latest";
    case SchemeKind::kUniformRecentK: return "uniform_recent_k";
    case SchemeKind::kPfsp: return "pfsp";
    case SchemeKind::kMixture: return "mixture";
  }
  return "?";
}

double PfspWeight(double win_rate, double exponent) {
  return std::pow(1.0 - win_rate, exponent);
}

namespace {

void ApplyEloMatching(const PayoffMatrix& payoff, const std::string& current_key,
                      double sigma, std::vector<WeightedKey>& weights) {
  if (!payoff.Contains(current_key)) return;
  double elo_c = payoff.Elo(current_key);
  for (auto& wk : weights) {
    double d = payoff.Elo(wk.key) - elo_c;
    wk.prob *= std::exp(-d * d / (2.0 * sigma * sigma));
  }
}

void Normalize(std::vector<WeightedKey>& weights) {
  double sum = 0.0;
  for (const auto& wk : weights) sum += wk.prob;
  if (sum <= 0.0) {
    // all-zero kernel (e.g. extreme Elo gaps): fall back to uniform
    for (auto& wk : weights) wk.prob = 1.0 / static_cast<double>(weights.size());
    return;
  }
  for (auto& wk : weights) wk.prob /= sum;
}

// Scheme weights over the frozen candidates only (no self-play component).
std::vector<WeightedKey> FrozenWeights(const PayoffMatrix& payoff,
                                       const std::string& current_key,
                                       const std::vector<std::string>& frozen_keys,
                                       const SamplingScheme& scheme, SchemeKind kind) {
  std::vector<WeightedKey> weights;
  if (kind == SchemeKind::kUniformRecentK) {
    std::size_t n = frozen_keys.size();
    std::size_t take = std::min<std::size_t>(scheme.recent_k, n);
    for (std::size_t i = n - take; i < n; ++i) weights.push_back({frozen_keys[i], 1.0});
  } else {  // PFSP
    for (const auto& key : frozen_keys) {
      double p = payoff.SmoothedWinRate(current_key, key);
      weights.push_back({key, PfspWeight(p, scheme.pfsp_exponent)});
    }
  }
  if (scheme.elo_matching_sigma)
    ApplyEloMatching(payoff, current_key, *scheme.elo_matching_sigma, weights);
  Normalize(weights);
  return weights;
}

}  // namespace

std::vector<WeightedKey> OpponentWeights(const PayoffMatrix& payoff,
                                         const std::string& current_key,
                                         const std::vector<std::string>& frozen_keys,
                                         const SamplingScheme& scheme) {
  if (current_key.empty() && frozen_keys.empty())
    throw std::invalid_argument("empty opponent candidate set");
  if (scheme.kind == SchemeKind::kSelfPlayLatest || frozen_keys.empty())
    return {{current_key, 1.0}};

  if (scheme.kind == SchemeKind::kMixture) {
    double w = scheme.mixture_self_play_weight;
    if (w < 0.0 || w > 1.0)
      throw std::invalid_argument("mixture_self_play_weight must be in [0, 1]");
    std::vector<WeightedKey> out{{current_key, w}};
    for (auto& wk :
         FrozenWeights(payoff, current_key, frozen_keys, scheme, SchemeKind::kPfsp)) {
      if (wk.key == current_key)
        out[0].prob += (1.0 - w) * wk.prob;  // current may also be frozen-listed
      else
        out.push_back({wk.key, (1.0 - w) * wk.prob});
    }
    return out;
  }
  return FrozenWeights(payoff, current_key, frozen_keys, scheme, scheme.kind);
}

std::string SampleOpponent(const PayoffMatrix& payoff, const std::string& current_key,
                           const std::vector<std::string>& frozen_keys,
                           const SamplingScheme& scheme, std::mt19937_64& rng) {
  std::vector<WeightedKey> weights =
      OpponentWeights(payoff, current_key, frozen_keys, scheme);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double r = u(rng);
  double acc = 0.0;
  for (const auto& wk : weights) {
    acc += wk.prob;
    if (r < acc) return wk.key;
  }
  return weights.back().key;
}

}  // namespace tleague::league
