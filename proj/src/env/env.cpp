#include "tleague/env/env.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>

namespace tleague::env {

namespace {

std::map<std::string, EnvFactory>& Registry() {
  static std::map<std::string, EnvFactory> registry;
  return registry;
}

std::mutex& RegistryMutex() {
  static std::mutex mu;
  return mu;
}

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t episode) {
  // splitmix64 over (seed, episode)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (episode + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void ValidateTable(const std::vector<std::vector<double>>& t) {
  if (t.empty() || t[0].empty()) throw std::invalid_argument("empty payoff table");
  for (const auto& row : t) {
    if (row.size() != t[0].size())
      throw std::invalid_argument("ragged payoff table");
    for (double v : row)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite payoff entry");
  }
}

// One-shot or iterated two-player matrix game. One-shot observations are the
// constant vector {1}; the iterated variant observes a one-hot of the
// previous joint action ("start" state first).
class MatrixGameEnv : public Env {
 public:
  MatrixGameEnv(const EnvSpec& spec, bool iterated) : iterated_(iterated) {
    if (spec.n_agents != 2)
      throw std::invalid_argument("matrix games support exactly 2 agents");
    payoff_a_ = spec.payoff_table.value_or(RpsPayoff());
    ValidateTable(payoff_a_);
    if (spec.payoff_table_b) {
      payoff_b_ = *spec.payoff_table_b;
      ValidateTable(payoff_b_);
      if (payoff_b_.size() != payoff_a_.size() ||
          payoff_b_[0].size() != payoff_a_[0].size())
        throw std::invalid_argument("payoff table shape mismatch");
    } else {
      payoff_b_ = payoff_a_;
      for (auto& row : payoff_b_)
        for (double& v : row) v = -v;
    }
    if (payoff_a_.size() != payoff_a_[0].size())
      throw std::invalid_argument("matrix games require a square action space");
    n_actions_ = static_cast<std::uint32_t>(payoff_a_.size());
    horizon_ = iterated_ ? spec.horizon : 1;
    if (horizon_ < 1) throw std::invalid_argument("horizon must be >= 1");
    obs_dim_ = iterated_ ? 1 + n_actions_ * n_actions_ : 1;
  }

  std::vector<std::vector<double>> Reset() override {
    step_ = 0;
    done_ = false;
    returns_.assign(2, 0.0);
    ++episode_;
    std::vector<double> obs(obs_dim_, 0.0);
    obs[0] = 1.0;  // one-shot constant state / iterated "start" state
    return {obs, obs};
  }

  StepResult Step(std::span<const std::uint32_t> actions) override {
    if (done_) throw std::logic_error("step after episode end");
    if (actions.size() != 2) throw std::invalid_argument("expected 2 actions");
    for (std::uint32_t a : actions)
      if (a >= n_actions_) throw std::invalid_argument("action out of range");
    ++step_;
    StepResult res;
    res.rewards = {payoff_a_[actions[0]][actions[1]], payoff_b_[actions[0]][actions[1]]};
    returns_[0] += res.rewards[0];
    returns_[1] += res.rewards[1];
    res.done = step_ >= horizon_;
    std::vector<double> obs(obs_dim_, 0.0);
    if (iterated_)
      obs[1 + actions[0] * n_actions_ + actions[1]] = 1.0;
    else
      obs[0] = 1.0;
    res.observations = {obs, obs};
    if (res.done) {
      done_ = true;
      res.outcomes = OutcomesFromReturns(returns_);
    }
    return res;
  }

  std::uint32_t n_agents() const override { return 2; }
  std::uint32_t obs_dim() const override { return obs_dim_; }
  std::uint32_t n_actions() const override { return n_actions_; }
  bool one_hot_obs() const override { return true; }

 private:
  bool iterated_;
  std::vector<std::vector<double>> payoff_a_;
  std::vector<std::vector<double>> payoff_b_;
  std::uint32_t n_actions_ = 0;
  std::uint32_t obs_dim_ = 0;
  std::uint32_t horizon_ = 1;
  std::uint32_t step_ = 0;
  std::uint64_t episode_ = 0;
  bool done_ = true;
  std::vector<double> returns_;
};

// 5x5 two-player pursuit duel. Actions: stay, up, down, left, right, tag.
// A tag scores +1/-1 when the opponent ends the step within one cell
// (Chebyshev distance <= 1). Observation: one-hot own cell + one-hot
// opponent cell.
class GridDuelEnv : public Env {
 public:
  static constexpr int kSize = 5;
  static constexpr std::uint32_t kActions = 6;

  explicit GridDuelEnv(const EnvSpec& spec) : seed_(spec.seed), horizon_(spec.horizon) {
    if (spec.n_agents != 2)
      throw std::invalid_argument("grid_duel supports exactly 2 agents");
    if (horizon_ < 1) throw std::invalid_argument("horizon must be >= 1");
  }

  std::vector<std::vector<double>> Reset() override {
    std::mt19937_64 rng(MixSeed(seed_, episode_));
    ++episode_;
    std::uniform_int_distribution<int> cell(0, kSize * kSize - 1);
    pos_[0] = cell(rng);
    do {
      pos_[1] = cell(rng);
    } while (pos_[1] == pos_[0]);
    step_ = 0;
    done_ = false;
    returns_.assign(2, 0.0);
    return {Observe(0), Observe(1)};
  }

  StepResult Step(std::span<const std::uint32_t> actions) override {
    if (done_) throw std::logic_error("step after episode end");
    if (actions.size() != 2) throw std::invalid_argument("expected 2 actions");
    for (std::uint32_t a : actions)
      if (a >= kActions) throw std::invalid_argument("action out of range");
    for (int i = 0; i < 2; ++i) pos_[i] = Move(pos_[i], actions[i]);
    ++step_;
    StepResult res;
    res.rewards = {0.0, 0.0};
    bool adjacent = Adjacent(pos_[0], pos_[1]);
    for (int i = 0; i < 2; ++i) {
      if (actions[i] == 5 && adjacent) {
        res.rewards[i] += 1.0;
        res.rewards[1 - i] -= 1.0;
      }
    }
    returns_[0] += res.rewards[0];
    returns_[1] += res.rewards[1];
    res.done = step_ >= horizon_;
    res.observations = {Observe(0), Observe(1)};
    if (res.done) {
      done_ = true;
      res.outcomes = OutcomesFromReturns(returns_);
    }
    return res;
  }

  std::uint32_t n_agents() const override { return 2; }
  std::uint32_t obs_dim() const override { return 2 * kSize * kSize; }
  std::uint32_t n_actions() const override { return kActions; }
  bool one_hot_obs() const override { return false; }

 private:
  static bool Adjacent(int a, int b) {
    int ax = a % kSize, ay = a / kSize, bx = b % kSize, by = b / kSize;
    return std::abs(ax - bx) <= 1 && std::abs(ay - by) <= 1;
  }

  static int Move(int pos, std::uint32_t action) {
    int x = pos % kSize, y = pos / kSize;
    switch (action) {
      case 1: y = std::max(0, y - 1); break;          // up
      case 2: y = std::min(kSize - 1, y + 1); break;  // down
      case 3: x = std::max(0, x - 1); break;          // left
      case 4: x = std::min(kSize - 1, x + 1); break;  // right
      default: break;                                 // stay / tag
    }
    return y * kSize + x;
  }

  std::vector<double> Observe(int agent) const {
    std::vector<double> obs(2 * kSize * kSize, 0.0);
    obs[pos_[agent]] = 1.0;
    obs[kSize * kSize + pos_[1 - agent]] = 1.0;
    return obs;
  }

  std::uint64_t seed_;
  std::uint32_t horizon_;
  std::uint64_t episode_ = 0;
  std::uint32_t step_ = 0;
  bool done_ = true;
  int pos_[2] = {0, 0};
  std::vector<double> returns_;
};

struct BuiltinRegistrar {
  BuiltinRegistrar() {
    RegisterEnv("rps", [](const EnvSpec& spec) -> std::unique_ptr<Env> {
      EnvSpec s = spec;
      if (!s.payoff_table) s.payoff_table = RpsPayoff();
      return std::make_unique<MatrixGameEnv>(s, /*iterated=*/false);
    });
    RegisterEnv("matrix", [](const EnvSpec& spec) -> std::unique_ptr<Env> {
      if (!spec.payoff_table)
        throw std::invalid_argument("matrix env requires a payoff_table");
      return std::make_unique<MatrixGameEnv>(spec, /*iterated=*/false);
    });
    RegisterEnv("iterated_rps", [](const EnvSpec& spec) -> std::unique_ptr<Env> {
      EnvSpec s = spec;
      if (!s.payoff_table) s.payoff_table = RpsPayoff();
      if (s.horizon < 2) s.horizon = 10;
      return std::make_unique<MatrixGameEnv>(s, /*iterated=*/true);
    });
    RegisterEnv("grid_duel", [](const EnvSpec& spec) -> std::unique_ptr<Env> {
      EnvSpec s = spec;
      if (s.horizon < 2) s.horizon = 20;
      return std::make_unique<GridDuelEnv>(s);
    });
  }
};

}  // namespace

std::vector<std::vector<double>> RpsPayoff() {
  // rows: rock, paper, scissors for agent 0
  return {{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}};
}

std::vector<Outcome> OutcomesFromReturns(std::span<const double> returns) {
  std::vector<Outcome> out(returns.size(), Outcome::kTie);
  double best = *std::max_element(returns.begin(), returns.end());
  double worst = *std::min_element(returns.begin(), returns.end());
  if (best == worst) return out;  // everyone tied
  for (std::size_t i = 0; i < returns.size(); ++i)
    out[i] = returns[i] == best ? Outcome::kWin : Outcome::kLoss;
  return out;
}

void RegisterEnv(const std::string& name, EnvFactory factory) {
  std::lock_guard lock(RegistryMutex());
  Registry()[name] = std::move(factory);
}

std::vector<std::string> RegisteredEnvNames() {
  static BuiltinRegistrar registrar;
  std::lock_guard lock(RegistryMutex());
  std::vector<std::string> names;
  for (const auto& [name, _] : Registry()) names.push_back(name);
  return names;
}

std::unique_ptr<Env> MakeEnv(const EnvSpec& spec) {
  static BuiltinRegistrar registrar;
  EnvFactory factory;
  {
    std::lock_guard lock(RegistryMutex());
    auto it = Registry().find(spec.env_name);
    if (it == Registry().end())
      throw std::invalid_argument("unknown env: " + spec.env_name);
    factory = it->second;
  }
  return factory(spec);
}

}  // namespace tleague::env
