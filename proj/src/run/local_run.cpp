#include "tleague/run/local_run.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <thread>

#include "tleague/actor/actor_loop.hpp"
#include "tleague/pool/model_store.hpp"
#include "tleague/run/model_io.hpp"

namespace tleague::run {

namespace {

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t n) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (n + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::string ModelFileName(const std::string& model_key) {
  std::string name = model_key;
  for (char& c : name)
    if (c == ':' || c == '/') c = '_';
  return name + ".model";
}

RunResult LocalRun(const RunConfig& cfg, const std::string& run_dir) {
  if (cfg.mode == RunMode::kProcess) {
    throw std::invalid_argument("process mode is handled by the launcher");
  }

  namespace fs = std::filesystem;
  if (!run_dir.empty()) fs::create_directories(fs::path(run_dir) / "models");

  auto probe = env::MakeEnv(cfg.env);
  const PolicyShape shape{probe->obs_dim(), probe->n_actions()};
  probe.reset();

  std::vector<league::LearnerGroupConfig> groups = cfg.groups;
  for (auto& g : groups) g.shape = shape;

  pool::ModelStore store;
  pool::DirectPool pool(store);
  league::LeagueState league(groups, pool, cfg.seed);

  std::vector<std::unique_ptr<learner::Learner>> learners;
  learners.reserve(cfg.n_groups);
  for (std::uint32_t g = 0; g < cfg.n_groups; ++g) {
    learner::LearnerConfig lc;
    lc.group = g;
    lc.num_shards = cfg.shards;
    lc.algo = cfg.algo;
    lc.publish_interval = cfg.publish_interval;
    lc.period_steps = cfg.period_steps;
    lc.replay_capacity = cfg.replay_capacity;
    lc.seed = MixSeed(cfg.seed, 0x4c00 + g);
    learners.push_back(std::make_unique<learner::Learner>(lc, league, pool));
  }

  // M_L * M_A actors per group, all feeding that group's learner directly.
  std::vector<std::vector<std::unique_ptr<actor::Actor>>> actors(cfg.n_groups);
  for (std::uint32_t g = 0; g < cfg.n_groups; ++g) {
    const std::uint32_t count = cfg.shards * cfg.actors;
    for (std::uint32_t i = 0; i < count; ++i) {
      actor::ActorConfig ac;
      ac.actor_id = "g" + std::to_string(g) + "-a" + std::to_string(i);
      ac.learner_group = g;
      ac.env = cfg.env;
      ac.env.seed = MixSeed(cfg.seed, 0xe000 + g * 1024 + i);
      ac.unroll_len = groups[g].hyper.unroll_len;
      ac.param_refresh_interval = cfg.param_refresh_interval;
      ac.seed = MixSeed(cfg.seed, 0xa000 + g * 1024 + i);
      actors[g].push_back(std::make_unique<actor::Actor>(ac, league, pool,
                                                         *learners[g]));
    }
  }

  std::ofstream metrics;
  if (!run_dir.empty()) metrics.open(fs::path(run_dir) / "metrics.log");

  if (cfg.mode == RunMode::kLockstep) {
    // Single-threaded round-robin: feed episodes until a full synchronized
    // draw is available, then take exactly one train step. Fully ordered, so
    // equal seeds give bit-identical runs.
    for (std::uint32_t period = 0; period < cfg.periods; ++period) {
      for (std::uint32_t g = 0; g < cfg.n_groups; ++g) {
        auto& lrn = *learners[g];
        const std::size_t need =
            static_cast<std::size_t>(lrn.hyper().batch_size) * cfg.shards;
        std::size_t next_actor = 0;
        for (std::uint32_t step = 0; step < cfg.period_steps; ++step) {
          while (lrn.replay().size() < need) {
            actors[g][next_actor]->RunEpisode();
            next_actor = (next_actor + 1) % actors[g].size();
          }
          lrn.TrainStep();
        }
        lrn.FinishPeriod();
        if (metrics.is_open()) {
          std::string line;
          lrn.LogMetricsLine(line);
          metrics << line;
        }
      }
    }
  } else {
    std::atomic<bool> stop{false};
    std::vector<std::thread> actor_threads;
    for (auto& group_actors : actors)
      for (auto& a : group_actors)
        actor_threads.emplace_back([&stop, actor = a.get()] { actor->Run(stop); });

    std::vector<std::thread> learner_threads;
    for (auto& l : learners) {
      learner_threads.emplace_back([&cfg, lrn = l.get()] {
        for (std::uint32_t p = 0; p < cfg.periods; ++p) lrn->RunPeriod();
      });
    }

    std::thread metrics_thread([&] {
      while (!stop.load()) {
        std::this_thread::sleep_for(std::chrono::seconds(1));
        if (!metrics.is_open()) continue;
        for (auto& l : learners) {
          std::string line;
          l->LogMetricsLine(line);
          metrics << line;
        }
        metrics.flush();
      }
    });

    for (auto& t : learner_threads) t.join();
    stop.store(true);
    for (auto& l : learners) l->Shutdown();
    for (auto& t : actor_threads) t.join();
    metrics_thread.join();
  }

  RunResult result;
  result.frozen_keys = league.FrozenKeys();
  result.league_summary = league.Summary();
  for (auto& l : learners) result.group_counters.push_back(l->Counters());

  if (!run_dir.empty()) {
    for (const auto& key : result.frozen_keys) {
      SaveModel((fs::path(run_dir) / "models" / ModelFileName(key)).string(),
                *store.Get(key));
    }
    std::ofstream summary(fs::path(run_dir) / "league.txt");
    summary << result.league_summary;
  }
  return result;
}

}  // namespace tleague::run
