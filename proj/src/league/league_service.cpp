#include "tleague/league/league_service.hpp"

#include <chrono>
#include <fstream>

#include "tleague/pool/model_store.hpp"

namespace tleague::league {

using proto::Message;

LeagueService::LeagueService(LeagueState& state, const std::string& host,
                             std::uint16_t port, std::string summary_log_path,
                             int summary_interval_s)
    : state_(state),
      summary_log_path_(std::move(summary_log_path)),
      summary_interval_s_(summary_interval_s) {
  server_ = std::make_unique<net::Server>(
      host, port, [this](const Message& req) { return Handle(req); });
  if (!summary_log_path_.empty())
    summary_thread_ = std::thread([this] { SummaryLoop(); });
}

LeagueService::~LeagueService() { Stop(); }

void LeagueService::Stop() {
  if (stopping_.exchange(true)) return;
  server_->Stop();
  if (summary_thread_.joinable()) summary_thread_.join();
}

void LeagueService::SummaryLoop() {
  auto next = std::chrono::steady_clock::now();
  while (!stopping_.load()) {
    next += std::chrono::seconds(summary_interval_s_);
    while (!stopping_.load() && std::chrono::steady_clock::now() < next)
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    if (stopping_.load()) return;
    std::ofstream out(summary_log_path_, std::ios::app);
    out << "ts=" << pool::NowMicros() / 1000000 << " league summary\n"
        << state_.Summary() << '\n';
  }
}

Message LeagueService::Handle(const Message& req) {
  const std::uint64_t corr = req.correlation_id;
  try {
    if (const auto* tr = std::get_if<proto::TaskRequestBody>(&req.payload)) {
      Task task = state_.RequestActorTask(tr->actor_id, tr->learner_group);
      return proto::MakeMessage(corr, proto::TaskReplyBody{std::move(task)});
    }
    if (const auto* lt = std::get_if<proto::LearnerTaskRequestBody>(&req.payload)) {
      Task task = state_.RequestLearnerTask(lt->group, lt->rank);
      return proto::MakeMessage(corr, proto::LearnerTaskReplyBody{std::move(task)});
    }
    if (const auto* rep = std::get_if<proto::OutcomeReportBody>(&req.payload)) {
      state_.ReportOutcome(rep->task_id, rep->outcomes);
      return proto::MakeAck(corr);
    }
    if (const auto* end = std::get_if<proto::EndLearningPeriodBody>(&req.payload)) {
      return proto::MakeAck(corr, state_.EndLearningPeriod(end->group));
    }
    return proto::MakeError(corr, proto::kErrBadRequest,
                            std::string("unexpected message kind: ") +
                                proto::MsgKindName(req.kind()));
  } catch (const DuplicateReportError& e) {
    return proto::MakeError(corr, proto::kErrDuplicateReport, e.what());
  } catch (const UnknownTaskError& e) {
    return proto::MakeError(corr, proto::kErrNotFound, e.what());
  } catch (const RankError& e) {
    return proto::MakeError(corr, proto::kErrProtocol, e.what());
  } catch (const std::invalid_argument& e) {
    return proto::MakeError(corr, proto::kErrBadRequest, e.what());
  } catch (const std::exception& e) {
    return proto::MakeError(corr, proto::kErrUnknown, e.what());
  }
}

Task LeagueClient::RequestActorTask(const std::string& actor_id, std::uint32_t group) {
  auto reply = rpc_.Call(proto::TaskRequestBody{actor_id, group});
  return net::Expect<proto::TaskReplyBody>(reply).task;
}

Task LeagueClient::RequestLearnerTask(std::uint32_t group, std::uint32_t rank) {
  auto reply = rpc_.Call(proto::LearnerTaskRequestBody{group, rank});
  return net::Expect<proto::LearnerTaskReplyBody>(reply).task;
}

void LeagueClient::ReportOutcome(std::uint64_t task_id,
                                 const std::vector<Outcome>& outcomes) {
  net::Expect<proto::AckBody>(rpc_.Call(proto::OutcomeReportBody{task_id, outcomes}));
}

std::string LeagueClient::EndLearningPeriod(std::uint32_t group) {
  auto reply = rpc_.Call(proto::EndLearningPeriodBody{group});
  return net::Expect<proto::AckBody>(reply).detail;
}

}  // namespace tleague::league
