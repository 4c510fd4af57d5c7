#include "tleague/run/process_launch.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "tleague/pool/model_pool_service.hpp"
#include "tleague/run/local_run.hpp"
#include "tleague/run/model_io.hpp"

namespace tleague::run {

namespace {

std::string Ep(std::uint16_t port) { return "127.0.0.1:" + std::to_string(port); }

pid_t Spawn(const std::vector<std::string>& argv) {
  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork failed");
  if (pid == 0) {
    execv(cargv[0], cargv.data());
    std::perror("execv");
    _exit(127);
  }
  return pid;
}

}  // namespace

bool PortIsFree(std::uint16_t port) {
  int fd = socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return false;
  int one = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  bool free_port = bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0;
  close(fd);
  return free_port;
}

std::vector<ProcessSpec> PlanProcesses(const RunConfig& cfg,
                                       const std::string& config_path,
                                       const std::string& run_dir,
                                       const std::string& self_exe) {
  const std::uint16_t base = cfg.base_port != 0 ? cfg.base_port : 17000;
  std::uint16_t next_port = base;
  auto take_port = [&next_port] { return next_port++; };

  std::vector<ProcessSpec> plan;

  // M_M pool replicas: replica 0 is the primary and forwards to the others.
  std::vector<std::uint16_t> pool_ports;
  for (std::uint32_t m = 0; m < cfg.pool_replicas; ++m) pool_ports.push_back(take_port());
  for (std::uint32_t m = cfg.pool_replicas; m-- > 0;) {
    ProcessSpec p;
    p.role = "pool";
    p.listen_port = pool_ports[m];
    p.argv = {self_exe, "model-pool", "--listen", Ep(pool_ports[m])};
    if (m == 0) {
      for (std::uint32_t s = 1; s < cfg.pool_replicas; ++s) {
        p.argv.push_back("--secondary");
        p.argv.push_back(Ep(pool_ports[s]));
      }
    }
    // secondaries must be up before the primary forwards to them
    plan.push_back(std::move(p));
  }

  std::string pool_primary = Ep(pool_ports[0]);
  std::uint16_t league_port = take_port();
  {
    ProcessSpec p;
    p.role = "league";
    p.listen_port = league_port;
    p.argv = {self_exe,    "league-mgr",  "--config", config_path,
              "--listen",  Ep(league_port), "--model-pool", pool_primary,
              "--summary-log", (std::filesystem::path(run_dir) / "league.log").string()};
    plan.push_back(std::move(p));
  }

  // M_G x M_L learner processes; rank 0 hosts the shard contexts, higher
  // ranks relay ingests to rank 0.
  std::vector<std::vector<std::uint16_t>> learner_ports(cfg.n_groups);
  for (std::uint32_t g = 0; g < cfg.n_groups; ++g)
    for (std::uint32_t r = 0; r < cfg.shards; ++r)
      learner_ports[g].push_back(take_port());
  for (std::uint32_t g = 0; g < cfg.n_groups; ++g) {
    for (std::uint32_t r = 0; r < cfg.shards; ++r) {
      ProcessSpec p;
      // relays never exit on their own; only rank 0 counts toward completion
      p.role = r == 0 ? "learner" : "learner-relay";
      p.listen_port = learner_ports[g][r];
      p.argv = {self_exe,      "learner",
                "--config",    config_path,
                "--group",     std::to_string(g),
                "--rank",      std::to_string(r),
                "--listen",    Ep(learner_ports[g][r]),
                "--league",    Ep(league_port),
                "--model-pool", pool_primary};
      if (r > 0) {
        p.argv.push_back("--rank0");
        p.argv.push_back(Ep(learner_ports[g][0]));
      }
      plan.push_back(std::move(p));
    }
  }

  std::vector<std::uint16_t> inf_ports;
  for (std::uint32_t i = 0; i < cfg.inf_servers; ++i) {
    std::uint16_t port = take_port();
    inf_ports.push_back(port);
    ProcessSpec p;
    p.role = "inf";
    p.listen_port = port;
    p.argv = {self_exe,      "inf-server",
              "--listen",    Ep(port),
              "--model-pool", pool_primary,
              "--model-key", "latest:" + cfg.groups[i % cfg.n_groups].lineage};
    plan.push_back(std::move(p));
  }

  // M_G x M_L x M_A actors, M_A per shard, each pinned to its shard's
  // ingest endpoint (and round-robin to an inf-server when present).
  for (std::uint32_t g = 0; g < cfg.n_groups; ++g) {
    for (std::uint32_t r = 0; r < cfg.shards; ++r) {
      for (std::uint32_t a = 0; a < cfg.actors; ++a) {
        const std::uint32_t idx = r * cfg.actors + a;
        ProcessSpec p;
        p.role = "actor";
        p.argv = {self_exe,      "actor",
                  "--config",    config_path,
                  "--group",     std::to_string(g),
                  "--id",        "g" + std::to_string(g) + "-a" + std::to_string(idx),
                  "--learner",   Ep(learner_ports[g][r]),
                  "--league",    Ep(league_port),
                  "--model-pool", pool_primary,
                  "--seed-offset", std::to_string(g * 1024 + idx)};
        if (!inf_ports.empty()) {
          p.argv.push_back("--inf-server");
          p.argv.push_back(Ep(inf_ports[(g * cfg.shards + r) % inf_ports.size()]));
        }
        plan.push_back(std::move(p));
      }
    }
  }

  std::set<std::uint16_t> seen;
  for (const auto& p : plan) {
    if (p.listen_port == 0) continue;
    if (!seen.insert(p.listen_port).second) {
      throw ConfigError(config_path, 1,
                        "duplicate listen port " + std::to_string(p.listen_port));
    }
  }
  return plan;
}

int LaunchRun(const RunConfig& cfg, const std::string& config_path,
              const std::string& run_dir, const std::string& self_exe) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(run_dir) / "models");

  auto plan = PlanProcesses(cfg, config_path, run_dir, self_exe);
  for (const auto& p : plan) {
    if (p.listen_port != 0 && !PortIsFree(p.listen_port)) {
      std::fprintf(stderr, "port %u already in use; not launching\n", p.listen_port);
      return 1;
    }
  }

  std::map<pid_t, std::size_t> children;  // pid -> plan index
  auto kill_all = [&children] {
    for (const auto& [pid, idx] : children) kill(pid, SIGTERM);
    (void)0;
  };

  std::size_t learners_pending = 0;
  for (const auto& p : plan)
    if (p.role == "learner") ++learners_pending;

  try {
    std::string last_role;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      if (!last_role.empty() && plan[i].role != last_role) {
        // next tier dials into the previous one; clients retry, the pause
        // just avoids a burst of reconnects
        std::this_thread::sleep_for(std::chrono::milliseconds(150));
      }
      children.emplace(Spawn(plan[i].argv), i);
      last_role = plan[i].role;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "launch failed: %s\n", e.what());
    kill_all();
    return 1;
  }

  int result = 0;
  bool stopping = false;
  while (!children.empty()) {
    int status = 0;
    pid_t pid = waitpid(-1, &status, 0);
    if (pid < 0) break;
    auto it = children.find(pid);
    if (it == children.end()) continue;
    const std::size_t idx = it->second;
    children.erase(it);
    const auto& spec = plan[idx];

    if (stopping) continue;

    const bool clean = WIFEXITED(status) && WEXITSTATUS(status) == 0;
    if (spec.role == "actor") {
      // Actors are expendable: restart on any unexpected death.
      children.emplace(Spawn(spec.argv), idx);
      continue;
    }
    if (spec.role == "learner" && clean) {
      if (--learners_pending == 0) {
        stopping = true;
        // Export the frozen pool before tearing the services down.
        try {
          // The pool primary always sits on the first port of the layout.
          const std::uint16_t primary =
              cfg.base_port != 0 ? cfg.base_port : 17000;
          pool::ModelPoolClient pool(
              {net::Endpoint::Parse("127.0.0.1:" + std::to_string(primary))});
          for (const auto& info : pool.ListModels()) {
            if (!info.frozen) continue;
            SaveModel((fs::path(run_dir) / "models" / ModelFileName(info.model_key))
                          .string(),
                      pool.GetModel(info.model_key));
          }
        } catch (const std::exception& e) {
          std::fprintf(stderr, "model export failed: %s\n", e.what());
          result = 1;
        }
        kill_all();
      }
      continue;
    }
    // A core service died (or a learner failed): fail-stop the run.
    std::fprintf(stderr, "%s process exited unexpectedly (status %d); stopping run\n",
                 spec.role.c_str(), status);
    result = 1;
    stopping = true;
    kill_all();
  }
  return result;
}

}  // namespace tleague::run
