#include "tleague/run/bench.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <thread>

#include "tleague/actor/actor_loop.hpp"
#include "tleague/pool/model_store.hpp"

namespace tleague::run {

namespace {

struct Scenario {
  std::string env;
  std::uint32_t horizon = 1;
  std::uint32_t m_g = 1;
  std::uint32_t m_l = 1;
  std::uint32_t m_a = 1;
};

Scenario LookupScenario(const std::string& name) {
  // names are M_G x M_L x M_A (actors per shard)
  if (name == "rps-1x1x4") return {"rps", 1, 1, 1, 4};
  if (name == "rps-1x2x8") return {"rps", 1, 1, 2, 8};
  if (name == "grid-1x2x8") return {"grid_duel", 20, 1, 2, 8};
  throw std::invalid_argument("unknown bench scenario: " + name);
}

}  // namespace

std::vector<std::string> BenchScenarioNames() {
  return {"rps-1x1x4", "rps-1x2x8", "grid-1x2x8"};
}

std::string BenchResult::MetricsLine() const {
  const auto wall = std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::system_clock::now().time_since_epoch())
                        .count();
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "ts=%lld scenario=%s rfps=%.1f cfps=%.1f duration=%.1f",
                static_cast<long long>(wall), scenario.c_str(), rfps, cfps,
                duration_s);
  return buf;
}

std::string BenchResult::CsvLine() const {
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%s,%u,%u,%u,%.1f,%.1f,%.1f", scenario.c_str(),
                m_g, m_l, m_a, rfps, cfps, duration_s);
  return buf;
}

BenchResult RunBench(const std::string& name, const BenchOptions& opts) {
  const Scenario sc = LookupScenario(name);

  RunConfig cfg;
  cfg.env.env_name = sc.env;
  cfg.env.horizon = sc.horizon;
  cfg.env.seed = opts.seed;
  cfg.mode = RunMode::kThreads;
  cfg.n_groups = sc.m_g;
  cfg.shards = sc.m_l;
  cfg.actors = sc.m_a;
  cfg.seed = opts.seed;
  cfg.groups.assign(sc.m_g, league::LearnerGroupConfig{});
  for (auto& g : cfg.groups) {
    if (sc.env == "grid_duel") g.family = PolicyFamily::kLinearSoftmax;
    g.scheme.kind = league::SchemeKind::kSelfPlayLatest;
  }

  auto probe = env::MakeEnv(cfg.env);
  const PolicyShape shape{probe->obs_dim(), probe->n_actions()};
  probe.reset();

  std::vector<league::LearnerGroupConfig> groups = cfg.groups;
  for (auto& g : groups) g.shape = shape;

  pool::ModelStore store;
  pool::DirectPool pool(store);
  league::LeagueState league(groups, pool, cfg.seed);

  std::vector<std::unique_ptr<learner::Learner>> learners;
  for (std::uint32_t g = 0; g < cfg.n_groups; ++g) {
    learner::LearnerConfig lc;
    lc.group = g;
    lc.num_shards = cfg.shards;
    lc.publish_interval = 50;
    lc.replay_capacity = 1 << 16;
    lc.seed = cfg.seed + g;
    lc.step_delay_ms = opts.learner_step_delay_ms;
    learners.push_back(std::make_unique<learner::Learner>(lc, league, pool));
  }

  std::vector<std::unique_ptr<actor::Actor>> actors;
  for (std::uint32_t g = 0; g < cfg.n_groups; ++g) {
    for (std::uint32_t i = 0; i < cfg.shards * cfg.actors; ++i) {
      actor::ActorConfig ac;
      ac.actor_id = "bench-g" + std::to_string(g) + "-a" + std::to_string(i);
      ac.learner_group = g;
      ac.env = cfg.env;
      ac.env.seed = cfg.seed * 977 + g * 131 + i;
      ac.seed = cfg.seed * 31 + g * 1024 + i;
      actors.push_back(std::make_unique<actor::Actor>(ac, league, pool,
                                                      *learners[g]));
    }
  }

  std::atomic<bool> stop{false};
  std::vector<std::thread> threads;
  for (auto& a : actors)
    threads.emplace_back([&stop, actor = a.get()] { actor->Run(stop); });
  for (auto& l : learners) {
    threads.emplace_back([&stop, lrn = l.get()] {
      while (!stop.load(std::memory_order_relaxed)) {
        if (!lrn->TrainStep()) return;
      }
    });
  }

  auto sleep_s = [](double s) {
    std::this_thread::sleep_for(std::chrono::duration<double>(s));
  };
  sleep_s(opts.warmup_s);

  std::uint64_t recv0 = 0;
  std::uint64_t cons0 = 0;
  for (auto& l : learners) {
    recv0 += l->replay().received_steps();
    cons0 += l->replay().consumed_steps();
  }
  const auto t0 = std::chrono::steady_clock::now();
  sleep_s(opts.duration_s);
  std::uint64_t recv1 = 0;
  std::uint64_t cons1 = 0;
  for (auto& l : learners) {
    recv1 += l->replay().received_steps();
    cons1 += l->replay().consumed_steps();
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();

  stop.store(true);
  for (auto& l : learners) l->Shutdown();
  for (auto& t : threads) t.join();

  BenchResult result;
  result.scenario = name;
  result.m_g = sc.m_g;
  result.m_l = sc.m_l;
  result.m_a = sc.m_a;
  result.rfps = static_cast<double>(recv1 - recv0) / dt;
  result.cfps = static_cast<double>(cons1 - cons0) / dt;
  result.duration_s = dt;
  return result;
}

void AppendBenchCsv(const std::string& path, const BenchResult& result) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open bench csv: " + path);
  if (fresh) out << "scenario,m_g,m_l,m_a,rfps,cfps,duration_s\n";
  out << result.CsvLine() << '\n';
}

}  // namespace tleague::run
