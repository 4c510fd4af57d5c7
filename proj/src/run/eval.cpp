#include "tleague/run/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "tleague/policy/policy.hpp"

namespace tleague::run {

namespace {

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t n) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (n + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Plays one deterministic game: slot assignment, parameters and derived seed
// fully decide the outcome. Returns slot-0's outcome.
Outcome PlayGame(const ParamBlob& p0, const ParamBlob& p1, const env::EnvSpec& spec,
                 std::uint64_t game_seed) {
  env::EnvSpec local = spec;
  local.seed = game_seed;
  auto env = env::MakeEnv(local);
  std::mt19937_64 rng(game_seed);

  auto obs = env->Reset();
  for (;;) {
    std::vector<std::uint32_t> actions(2);
    actions[0] = policy::SampleAction(policy::Distribution(p0, obs[0]), rng).action;
    actions[1] = policy::SampleAction(policy::Distribution(p1, obs[1]), rng).action;
    auto result = env->Step(actions);
    if (result.done) return result.outcomes[0];
    obs = std::move(result.observations);
  }
}

}  // namespace

std::string EvalReport::str() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "a=%s b=%s episodes=%u wins=%u losses=%u ties=%u win_rate=%.4f",
                key_a.c_str(), key_b.c_str(), n_episodes, wins, losses, ties,
                win_rate);
  return buf;
}

EvalReport Evaluate(const ParamBlob& a, const ParamBlob& b, const env::EnvSpec& spec,
                    std::uint32_t n_episodes, std::uint64_t seed) {
  if (n_episodes == 0) throw std::invalid_argument("n_episodes must be >= 1");
  EvalReport report;
  report.n_episodes = n_episodes;
  for (std::uint32_t i = 0; i < n_episodes; ++i) {
    // Paired games share a seed with the sides swapped, so the whole
    // evaluation is symmetric under exchanging (a, b).
    const std::uint64_t game_seed = MixSeed(seed, i / 2);
    const bool a_first = (i % 2) == 0;
    Outcome slot0 = PlayGame(a_first ? a : b, a_first ? b : a, spec, game_seed);
    Outcome for_a = slot0;
    if (!a_first) {
      if (slot0 == Outcome::kWin) for_a = Outcome::kLoss;
      else if (slot0 == Outcome::kLoss) for_a = Outcome::kWin;
    }
    switch (for_a) {
      case Outcome::kWin: ++report.wins; break;
      case Outcome::kLoss: ++report.losses; break;
      case Outcome::kTie: ++report.ties; break;
    }
  }
  report.win_rate = (report.wins + 0.5 * report.ties) / n_episodes;
  return report;
}

double Exploitability(const ParamBlob& blob, const env::EnvSpec& spec) {
  const bool is_rps = spec.env_name == "rps";
  const bool is_matrix = spec.env_name == "matrix";
  if ((!is_rps && !is_matrix) || spec.horizon != 1) {
    throw std::invalid_argument("exploitability needs a one-shot matrix game");
  }
  auto table_a = spec.payoff_table.value_or(env::RpsPayoff());
  // Opponent payoff: the explicit B table, or -A for the zero-sum default.
  std::vector<std::vector<double>> table_b;
  if (spec.payoff_table_b) {
    table_b = *spec.payoff_table_b;
  } else {
    table_b = table_a;
    for (auto& row : table_b)
      for (double& v : row) v = -v;
  }

  const std::vector<double> obs{1.0};
  auto dist = policy::Distribution(blob, obs);
  if (dist.probs.size() != table_a.size()) {
    throw std::invalid_argument("policy action count does not match payoff table");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < table_b[0].size(); ++j) {
    double value = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
      value += dist.probs[i] * table_b[i][j];
    }
    best = std::max(best, value);
  }
  return best;
}

}  // namespace tleague::run
