// Command-line front end: `run` drives a whole league locally, the service
// subcommands (model-pool, league-mgr, learner, actor, inf-server) are the
// per-process entry points used in process mode, and eval/exploit/report/
// bench are the offline tools.

#include <signal.h>
#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "tleague/actor/actor_loop.hpp"
#include "tleague/infserver/inf_server.hpp"
#include "tleague/league/league_service.hpp"
#include "tleague/learner/learner_service.hpp"
#include "tleague/pool/model_pool_service.hpp"
#include "tleague/run/bench.hpp"
#include "tleague/run/eval.hpp"
#include "tleague/run/local_run.hpp"
#include "tleague/run/model_io.hpp"
#include "tleague/run/process_launch.hpp"

namespace {

using namespace tleague;

std::atomic<bool> g_stop{false};

void HandleTerm(int) { g_stop.store(true); }

void InstallTermHandler() {
  struct sigaction sa{};
  sa.sa_handler = HandleTerm;
  sigaction(SIGTERM, &sa, nullptr);
  sigaction(SIGINT, &sa, nullptr);
}

void BlockUntilSignalled() {
  while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t n) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (n + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::string SelfExe() {
  char buf[4096];
  ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) throw std::runtime_error("cannot resolve own executable path");
  buf[n] = '\0';
  return buf;
}

// `eval`/`exploit` accept either a model file path or a pool key.
ParamBlob ResolveModel(const std::string& key_or_file, const std::string& pool_ep) {
  if (std::filesystem::exists(key_or_file)) {
    return run::LoadModel(key_or_file).params;
  }
  if (pool_ep.empty()) {
    throw std::runtime_error("'" + key_or_file +
                             "' is not a file; pass --pool to resolve pool keys");
  }
  pool::ModelPoolClient pool({net::Endpoint::Parse(pool_ep)});
  return pool.GetModel(key_or_file).params;
}

env::EnvSpec MakeEvalSpec(const std::string& env_name, std::uint32_t horizon) {
  env::EnvSpec spec;
  spec.env_name = env_name;
  spec.horizon = horizon;
  return spec;
}

league::LearnerGroupConfig& GroupOf(run::RunConfig& cfg, std::uint32_t g) {
  if (g >= cfg.groups.size()) throw std::runtime_error("group index out of range");
  return cfg.groups[g];
}

PolicyShape ProbeShape(const env::EnvSpec& spec) {
  auto probe = env::MakeEnv(spec);
  return {probe->obs_dim(), probe->n_actions()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale competitive self-play league trainer"};
  app.require_subcommand(1);

  // ---- run ----------------------------------------------------------------
  auto* cmd_run = app.add_subcommand("run", "run a league from a config file");
  std::string run_config_path;
  std::string run_dir = "runs/latest";
  cmd_run->add_option("config", run_config_path, "run config file")->required();
  cmd_run->add_option("--run-dir", run_dir, "output directory");

  // ---- eval ---------------------------------------------------------------
  auto* cmd_eval = app.add_subcommand("eval", "head-to-head win rate");
  std::string eval_a, eval_b, eval_env = "rps", eval_pool;
  std::uint32_t eval_n = 100, eval_horizon = 1;
  std::uint64_t eval_seed = 0;
  cmd_eval->add_option("--a", eval_a, "model key or file")->required();
  cmd_eval->add_option("--b", eval_b, "model key or file")->required();
  cmd_eval->add_option("--env", eval_env, "environment name");
  cmd_eval->add_option("--horizon", eval_horizon, "episode horizon");
  cmd_eval->add_option("-n,--episodes", eval_n, "episode count");
  cmd_eval->add_option("--seed", eval_seed, "evaluation seed");
  cmd_eval->add_option("--pool", eval_pool, "model-pool endpoint for key lookup");

  // ---- exploit ------------------------------------------------------------
  auto* cmd_exploit = app.add_subcommand("exploit", "best-response value");
  std::string ex_model, ex_env = "rps", ex_pool;
  cmd_exploit->add_option("--model", ex_model, "model key or file")->required();
  cmd_exploit->add_option("--env", ex_env, "one-shot matrix environment");
  cmd_exploit->add_option("--pool", ex_pool, "model-pool endpoint for key lookup");

  // ---- report -------------------------------------------------------------
  auto* cmd_report = app.add_subcommand("report", "print a run's league report");
  std::string report_dir;
  cmd_report->add_option("run_dir", report_dir, "run directory")->required();

  // ---- bench --------------------------------------------------------------
  auto* cmd_bench = app.add_subcommand("bench", "throughput microbenchmark");
  std::string bench_scenario, bench_csv = "bench.csv";
  double bench_duration = 30.0, bench_warmup = 2.0;
  std::uint32_t bench_delay = 0;
  cmd_bench->add_option("scenario", bench_scenario, "one of rps-1x1x4, rps-1x2x8, grid-1x2x8")
      ->required();
  cmd_bench->add_option("--duration", bench_duration, "timed window seconds");
  cmd_bench->add_option("--warmup", bench_warmup, "warm-up seconds");
  cmd_bench->add_option("--learner-delay-ms", bench_delay, "slow the learner down");
  cmd_bench->add_option("--csv", bench_csv, "append results to this CSV");

  // ---- model-pool ---------------------------------------------------------
  auto* cmd_pool = app.add_subcommand("model-pool", "parameter store replica");
  std::string pool_listen;
  std::vector<std::string> pool_secondaries;
  cmd_pool->add_option("--listen", pool_listen, "host:port")->required();
  cmd_pool->add_option("--secondary", pool_secondaries, "replica endpoints (primary only)");

  // ---- league-mgr ---------------------------------------------------------
  auto* cmd_league = app.add_subcommand("league-mgr", "coordination service");
  std::string lg_config, lg_listen, lg_pool, lg_summary_log;
  cmd_league->add_option("--config", lg_config, "run config file")->required();
  cmd_league->add_option("--listen", lg_listen, "host:port")->required();
  cmd_league->add_option("--model-pool", lg_pool, "pool primary endpoint")->required();
  cmd_league->add_option("--summary-log", lg_summary_log, "periodic summary file");

  // ---- learner ------------------------------------------------------------
  auto* cmd_learner = app.add_subcommand("learner", "training service shard");
  std::string ln_config, ln_listen, ln_league, ln_pool, ln_rank0, ln_algo;
  std::uint32_t ln_group = 0, ln_rank = 0;
  std::uint32_t ln_num_shards = 0, ln_batch = 0, ln_reuse = 0, ln_publish = 0,
                ln_period_steps = 0;
  cmd_learner->add_option("--config", ln_config, "run config file")->required();
  cmd_learner->add_option("--group", ln_group, "learner group index");
  cmd_learner->add_option("--rank", ln_rank, "shard rank (0 hosts the shards)");
  cmd_learner->add_option("--listen", ln_listen, "segment ingest host:port")->required();
  cmd_learner->add_option("--league", ln_league, "league-mgr endpoint");
  cmd_learner->add_option("--model-pool", ln_pool, "pool primary endpoint");
  cmd_learner->add_option("--rank0", ln_rank0, "rank-0 ingest endpoint (rank > 0)");
  cmd_learner->add_option("--num-shards", ln_num_shards, "override config shards");
  cmd_learner->add_option("--algo", ln_algo, "override config algo (ppo|vtrace)");
  cmd_learner->add_option("--batch-size", ln_batch, "override batch size");
  cmd_learner->add_option("--max-reuse", ln_reuse, "override max reuse");
  cmd_learner->add_option("--publish-interval", ln_publish, "override publish cadence");
  cmd_learner->add_option("--period-steps", ln_period_steps, "override period length");

  // ---- actor --------------------------------------------------------------
  auto* cmd_actor = app.add_subcommand("actor", "rollout worker");
  std::string ac_config, ac_id = "actor", ac_learner, ac_league, ac_inf;
  std::vector<std::string> ac_pools;
  std::uint32_t ac_group = 0, ac_unroll = 0;
  std::uint64_t ac_seed_offset = 0;
  std::string ac_env_override, ac_inference = "local";
  std::uint64_t ac_seed_flag = 0;
  bool ac_seed_set = false;
  cmd_actor->add_option("--config", ac_config, "run config file")->required();
  cmd_actor->add_option("--group", ac_group, "learner group index");
  cmd_actor->add_option("--id", ac_id, "actor id");
  cmd_actor->add_option("--learner", ac_learner, "segment ingest endpoint")->required();
  cmd_actor->add_option("--league", ac_league, "league-mgr endpoint")->required();
  cmd_actor->add_option("--model-pool", ac_pools, "pool endpoints")->required();
  cmd_actor->add_option("--inf-server", ac_inf, "remote inference endpoint");
  cmd_actor->add_option("--env", ac_env_override, "override config env name");
  cmd_actor->add_option("--unroll-len", ac_unroll, "override unroll length");
  cmd_actor->add_option("--inference", ac_inference, "local|remote");
  cmd_actor->add_option("--seed-offset", ac_seed_offset, "per-actor seed offset");
  cmd_actor->add_option("--seed", ac_seed_flag, "explicit actor seed");

  // ---- inf-server ---------------------------------------------------------
  auto* cmd_inf = app.add_subcommand("inf-server", "batched inference service");
  std::string if_listen, if_pool, if_key;
  std::uint32_t if_batch = 32;
  double if_timeout = 2.0;
  cmd_inf->add_option("--listen", if_listen, "host:port")->required();
  cmd_inf->add_option("--model-pool", if_pool, "pool endpoint")->required();
  cmd_inf->add_option("--model-key", if_key, "explicit key or latest:<lineage>")->required();
  cmd_inf->add_option("--max-batch", if_batch, "batch size bound");
  cmd_inf->add_option("--flush-timeout-ms", if_timeout, "batch flush timeout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_run) {
      run::RunConfig cfg = run::LoadRunConfig(run_config_path);
      if (cfg.mode == run::RunMode::kProcess) {
        return run::LaunchRun(cfg, run_config_path, run_dir, SelfExe());
      }
      auto result = run::LocalRun(cfg, run_dir);
      std::cout << result.league_summary;
      std::cout << "frozen models: " << result.frozen_keys.size() << "\n";
      return 0;
    }

    if (*cmd_eval) {
      ParamBlob a = ResolveModel(eval_a, eval_pool);
      ParamBlob b = ResolveModel(eval_b, eval_pool);
      auto report = run::Evaluate(a, b, MakeEvalSpec(eval_env, eval_horizon),
                                  eval_n, eval_seed);
      report.key_a = eval_a;
      report.key_b = eval_b;
      std::cout << report.str() << "\n";
      return 0;
    }

    if (*cmd_exploit) {
      ParamBlob blob = ResolveModel(ex_model, ex_pool);
      double v = run::Exploitability(blob, MakeEvalSpec(ex_env, 1));
      std::printf("exploitability=%.6f\n", v);
      return 0;
    }

    if (*cmd_report) {
      namespace fs = std::filesystem;
      bool printed = false;
      for (const char* name : {"league.txt", "league.log", "metrics.log"}) {
        fs::path p = fs::path(report_dir) / name;
        if (!fs::exists(p)) continue;
        std::ifstream in(p);
        std::cout << "== " << name << " ==\n" << in.rdbuf() << "\n";
        printed = true;
      }
      if (!printed) {
        std::cerr << "no league.txt/league.log/metrics.log under " << report_dir << "\n";
        return 1;
      }
      return 0;
    }

    if (*cmd_bench) {
      run::BenchOptions opts;
      opts.duration_s = bench_duration;
      opts.warmup_s = bench_warmup;
      opts.learner_step_delay_ms = bench_delay;
      auto result = run::RunBench(bench_scenario, opts);
      std::cout << result.MetricsLine() << "\n";
      run::AppendBenchCsv(bench_csv, result);
      return 0;
    }

    if (*cmd_pool) {
      InstallTermHandler();
      auto ep = net::Endpoint::Parse(pool_listen);
      std::vector<net::Endpoint> secondaries;
      for (const auto& s : pool_secondaries) secondaries.push_back(net::Endpoint::Parse(s));
      pool::ModelPoolService service(ep.host, ep.port, secondaries);
      BlockUntilSignalled();
      service.Stop();
      return 0;
    }

    if (*cmd_league) {
      InstallTermHandler();
      run::RunConfig cfg = run::LoadRunConfig(lg_config);
      const PolicyShape shape = ProbeShape(cfg.env);
      auto groups = cfg.groups;
      for (auto& g : groups) g.shape = shape;
      pool::ModelPoolClient pool({net::Endpoint::Parse(lg_pool)});
      league::LeagueState state(groups, pool, cfg.seed);
      auto ep = net::Endpoint::Parse(lg_listen);
      league::LeagueService service(state, ep.host, ep.port, lg_summary_log, 5);
      BlockUntilSignalled();
      service.Stop();
      return 0;
    }

    if (*cmd_learner) {
      InstallTermHandler();
      auto ep = net::Endpoint::Parse(ln_listen);
      if (ln_rank > 0) {
        // Relay rank: forward ingested segments to the rank-0 shard host.
        if (ln_rank0.empty()) throw std::runtime_error("rank > 0 needs --rank0");
        learner::LearnerClient sink(net::Endpoint::Parse(ln_rank0));
        learner::LearnerService service(sink, ep.host, ep.port);
        BlockUntilSignalled();
        service.Stop();
        return 0;
      }
      run::RunConfig cfg = run::LoadRunConfig(ln_config);
      auto& grp = GroupOf(cfg, ln_group);
      if (ln_batch > 0) grp.hyper.batch_size = ln_batch;
      if (ln_reuse > 0) grp.hyper.max_reuse = ln_reuse;
      league::LeagueClient league(net::Endpoint::Parse(ln_league));
      pool::ModelPoolClient pool({net::Endpoint::Parse(ln_pool)});
      learner::LearnerConfig lc;
      lc.group = ln_group;
      lc.num_shards = ln_num_shards > 0 ? ln_num_shards : cfg.shards;
      lc.algo = ln_algo.empty() ? cfg.algo : learner::ParseAlgo(ln_algo);
      lc.publish_interval = ln_publish > 0 ? ln_publish : cfg.publish_interval;
      lc.period_steps = ln_period_steps > 0 ? ln_period_steps : cfg.period_steps;
      lc.replay_capacity = cfg.replay_capacity;
      lc.seed = MixSeed(cfg.seed, 0x4c00 + ln_group);
      learner::Learner core(lc, league, pool);
      learner::LearnerService service(core, ep.host, ep.port);
      for (std::uint32_t p = 0; p < cfg.periods && !g_stop.load(); ++p) {
        core.RunPeriod();
      }
      core.Shutdown();
      service.Stop();
      return 0;
    }

    if (*cmd_actor) {
      InstallTermHandler();
      run::RunConfig cfg = run::LoadRunConfig(ac_config);
      auto& grp = GroupOf(cfg, ac_group);
      league::LeagueClient league(net::Endpoint::Parse(ac_league));
      std::vector<net::Endpoint> pool_eps;
      for (const auto& s : ac_pools) pool_eps.push_back(net::Endpoint::Parse(s));
      pool::ModelPoolClient pool(pool_eps, MixSeed(cfg.seed, ac_seed_offset));
      learner::LearnerClient sink(net::Endpoint::Parse(ac_learner));
      std::unique_ptr<infserver::InferenceClient> inf;
      if (!ac_inf.empty() && ac_inference != "local") {
        inf = std::make_unique<infserver::InferenceClient>(net::Endpoint::Parse(ac_inf));
      }
      actor::ActorConfig ac;
      ac.actor_id = ac_id;
      ac.learner_group = ac_group;
      ac.env = cfg.env;
      if (!ac_env_override.empty()) ac.env.env_name = ac_env_override;
      ac.env.seed = MixSeed(cfg.seed, 0xe000 + ac_seed_offset);
      ac.unroll_len = ac_unroll > 0 ? ac_unroll : grp.hyper.unroll_len;
      ac.param_refresh_interval = cfg.param_refresh_interval;
      ac_seed_set = cmd_actor->count("--seed") > 0;
      ac.seed = ac_seed_set ? ac_seed_flag : MixSeed(cfg.seed, 0xa000 + ac_seed_offset);
      actor::Actor worker(ac, league, pool, sink, inf.get());
      try {
        worker.Run(g_stop);
      } catch (const std::exception& e) {
        if (!g_stop.load()) throw;  // interrupted syscall during shutdown
      }
      return 0;
    }

    if (*cmd_inf) {
      InstallTermHandler();
      auto ep = net::Endpoint::Parse(if_listen);
      pool::ModelPoolClient pool({net::Endpoint::Parse(if_pool)});
      infserver::InfServer::Config cfg;
      cfg.model_key = if_key;
      cfg.max_batch = if_batch;
      cfg.flush_timeout_ms = if_timeout;
      std::unique_ptr<infserver::InfServer> server;
      while (!server && !g_stop.load()) {
        try {
          server = std::make_unique<infserver::InfServer>(cfg, pool, ep.host, ep.port);
        } catch (const std::exception&) {
          // the pool may not hold the tracked key yet
          std::this_thread::sleep_for(std::chrono::milliseconds(200));
        }
      }
      BlockUntilSignalled();
      if (server) server->Stop();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
