#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "tleague/run/config.hpp"

using namespace tleague;
using run::ConfigError;

namespace {

run::RunConfig Parse(const std::string& text) {
  return run::ParseRunConfigText(text, "test.conf");
}

int FailLine(const std::string& text) {
  try {
    Parse(text);
  } catch (const ConfigError& e) {
    return e.line_no;
  }
  return -1;
}

}  // namespace

TEST_CASE("a minimal config fills in sane defaults") {
  auto cfg = Parse("env: rps\n");
  CHECK(cfg.env.env_name == "rps");
  CHECK(cfg.mode == run::RunMode::kLockstep);
  CHECK(cfg.algo == learner::Algo::kPpo);
  CHECK(cfg.n_groups == 1);
  CHECK(cfg.shards == 1);
  CHECK(cfg.actors == 1);
  CHECK(cfg.pool_replicas == 1);
  REQUIRE(cfg.groups.size() == 1);
  CHECK(cfg.groups[0].lineage == "main");
  CHECK(cfg.groups[0].scheme.kind == league::SchemeKind::kSelfPlayLatest);
  CHECK(cfg.groups[0].hyper == HyperParams{});
}

TEST_CASE("a full config parses every section") {
  const std::string text = R"(# league run
env: iterated_rps
horizon: 4
mode: threads
algo: vtrace
groups: 2
shards: 2
actors: 4
pool_replicas: 2
inf_servers: 1
seed: 123
periods: 7
period_steps: 50
publish_interval: 5
param_refresh_interval: 3
replay_capacity: 512
base_port: 18000

# top-level defaults inherited by both groups
learning_rate: 0.05
batch_size: 8
scheme: uniform_recent_k
recent_k: 50
family: linear
init_scale: 0.1

[group 0]
scheme: mixture
mixture_self_play_weight: 0.35
perturb_hyper: true

[group 1]
lineage: exploiter
opponent_group: 0
learning_rate: 0.01
)";
  auto cfg = Parse(text);
  CHECK(cfg.env.env_name == "iterated_rps");
  CHECK(cfg.env.horizon == 4);
  CHECK(cfg.env.seed == 123);
  CHECK(cfg.mode == run::RunMode::kThreads);
  CHECK(cfg.algo == learner::Algo::kVtrace);
  CHECK(cfg.n_groups == 2);
  CHECK(cfg.shards == 2);
  CHECK(cfg.actors == 4);
  CHECK(cfg.pool_replicas == 2);
  CHECK(cfg.inf_servers == 1);
  CHECK(cfg.periods == 7);
  CHECK(cfg.period_steps == 50);
  CHECK(cfg.publish_interval == 5);
  CHECK(cfg.param_refresh_interval == 3);
  CHECK(cfg.replay_capacity == 512);
  CHECK(cfg.base_port == 18000);
  CHECK(cfg.family == PolicyFamily::kLinearSoftmax);

  REQUIRE(cfg.groups.size() == 2);
  // group 0 inherits the defaults, then overrides the scheme
  CHECK(cfg.groups[0].lineage == "main");
  CHECK(cfg.groups[0].scheme.kind == league::SchemeKind::kMixture);
  CHECK(cfg.groups[0].scheme.mixture_self_play_weight == 0.35);
  CHECK(cfg.groups[0].scheme.recent_k == 50);
  CHECK(cfg.groups[0].hyper.learning_rate == 0.05);
  CHECK(cfg.groups[0].hyper.batch_size == 8);
  CHECK(cfg.groups[0].perturb_hyper);
  CHECK(cfg.groups[0].family == PolicyFamily::kLinearSoftmax);
  CHECK(cfg.groups[0].init_scale == 0.1);

  CHECK(cfg.groups[1].lineage == "exploiter");
  REQUIRE(cfg.groups[1].opponent_group.has_value());
  CHECK(*cfg.groups[1].opponent_group == 0);
  CHECK(cfg.groups[1].hyper.learning_rate == 0.01);
  CHECK(cfg.groups[1].scheme.kind == league::SchemeKind::kUniformRecentK);
  CHECK_FALSE(cfg.groups[1].perturb_hyper);
}

TEST_CASE("unnamed extra groups get generated lineages") {
  auto cfg = Parse("env: rps\ngroups: 3\n");
  REQUIRE(cfg.groups.size() == 3);
  CHECK(cfg.groups[0].lineage == "main");
  CHECK(cfg.groups[1].lineage == "g1");
  CHECK(cfg.groups[2].lineage == "g2");
}

TEST_CASE("payoff rows build the matrix tables in order") {
  auto cfg = Parse(
      "env: matrix\n"
      "payoff_row: 1 -1\n"
      "payoff_row: -1 1\n"
      "payoff_row_b: 0.5 0\n"
      "payoff_row_b: 0 0.5\n");
  REQUIRE(cfg.env.payoff_table.has_value());
  CHECK(*cfg.env.payoff_table ==
        std::vector<std::vector<double>>{{1, -1}, {-1, 1}});
  REQUIRE(cfg.env.payoff_table_b.has_value());
  CHECK((*cfg.env.payoff_table_b)[0] == std::vector<double>{0.5, 0});
}

TEST_CASE("errors carry the exact offending line") {
  CHECK(FailLine("env: rps\nnot a kv line\n") == 2);
  CHECK(FailLine("env: rps\nunknown_key: 3\n") == 2);
  CHECK(FailLine("env: rps\nseed: twelve\n") == 2);
  CHECK(FailLine("env: rps\n\n\nactors: 1.5\n") == 4);
  CHECK(FailLine("env: rps\nmode: cluster\n") == 2);
  CHECK(FailLine("env: rps\nalgo: a2c\n") == 2);
  CHECK(FailLine("env: rps\nscheme: random\n") == 2);
  CHECK(FailLine("env: rps\nadv_norm: maybe\n") == 2);
  CHECK(FailLine("env: rps\nhorizon:\n") == 2);
  CHECK(FailLine("env: rps\n[group 0\n") == 2);
  CHECK(FailLine("env: rps\n[squad 0]\n") == 2);
  CHECK(FailLine("env: rps\ngroups: 2\n[group 5]\n") == 3);
  // top-level keys are frozen once a section starts
  CHECK(FailLine("env: rps\n[group 0]\nlearning_rate: 0.1\n") == -1);
  CHECK(FailLine("env: rps\n[group 0]\nlearning_rate: 0.1\n[group 0]\n") == -1);
  CHECK(FailLine("actors: 2\n[group 0]\nseed: 4\n") == 3);
}

TEST_CASE("post-parse validation catches structural mistakes") {
  CHECK_THROWS_AS(Parse("seed: 1\n"), ConfigError);             // missing env
  CHECK_THROWS_AS(Parse("env: rps\nactors: 0\n"), ConfigError);
  CHECK_THROWS_AS(Parse("env: rps\nopponent_group: 3\n"), ConfigError);
  CHECK_THROWS_AS(Parse("env: rps\nlearning_rate: -1\n"), ConfigError);
  CHECK_THROWS_AS(Parse("env: rps\nbatch_size: 0\n"), ConfigError);
}

TEST_CASE("load from disk matches in-memory parsing") {
  const std::string path = "/tmp/tleague_config_test.conf";
  {
    std::ofstream out(path);
    out << "env: rps\nseed: 99\nactors: 3\n";
  }
  auto cfg = run::LoadRunConfig(path);
  CHECK(cfg.env.env_name == "rps");
  CHECK(cfg.seed == 99);
  CHECK(cfg.actors == 3);
  std::remove(path.c_str());

  CHECK_THROWS(run::LoadRunConfig("/tmp/definitely_missing_config.conf"));
}
