#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "tleague/league/league_state.hpp"
#include "tleague/net/tcp.hpp"

namespace tleague::league {

// RPC front end for LeagueState. Optionally appends the league summary to a
// log file once per interval.
class LeagueService {
 public:
  LeagueService(LeagueState& state, const std::string& host, std::uint16_t port,
                std::string summary_log_path = {}, int summary_interval_s = 10);
  ~LeagueService();

  net::Endpoint endpoint() const { return server_->endpoint(); }
  void Stop();

 private:
  proto::Message Handle(const proto::Message& req);
  void SummaryLoop();

  LeagueState& state_;
  std::unique_ptr<net::Server> server_;
  std::string summary_log_path_;
  int summary_interval_s_;
  std::atomic<bool> stopping_{false};
  std::thread summary_thread_;
};

class LeagueClient : public LeagueIface {
 public:
  explicit LeagueClient(net::Endpoint ep) : rpc_(std::move(ep)) {}

  Task RequestActorTask(const std::string& actor_id, std::uint32_t group) override;
  Task RequestLearnerTask(std::uint32_t group, std::uint32_t rank) override;
  void ReportOutcome(std::uint64_t task_id,
                     const std::vector<Outcome>& outcomes) override;
  std::string EndLearningPeriod(std::uint32_t group) override;

 private:
  net::RpcClient rpc_;
};

}  // namespace tleague::league
