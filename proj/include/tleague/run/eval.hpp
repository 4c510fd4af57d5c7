#pragma once

#include <cstdint>
#include <string>

#include "tleague/env/env.hpp"
#include "tleague/types.hpp"

namespace tleague::run {

struct EvalReport {
  std::string key_a;
  std::string key_b;
  std::uint32_t n_episodes = 0;
  std::uint32_t wins = 0;    // for side a
  std::uint32_t losses = 0;
  std::uint32_t ties = 0;
  double win_rate = 0.0;  // a tie counts as half a win

  std::string str() const;
};

// Plays n_episodes with side assignments balanced (a opens even games).
// Paired games share a derived seed, so Evaluate(b, a, ...) on the same
// arguments maps wins and losses exactly onto each other.
EvalReport Evaluate(const ParamBlob& a, const ParamBlob& b, const env::EnvSpec& spec,
                    std::uint32_t n_episodes, std::uint64_t seed);

// Best-response value against the policy on a one-shot matrix game: the max
// over opponent pure actions of the opponent's expected payoff. Zero at the
// Nash equilibrium of a symmetric zero-sum game. Throws
// std::invalid_argument for a non-matrix environment.
double Exploitability(const ParamBlob& blob, const env::EnvSpec& spec);

}  // namespace tleague::run
