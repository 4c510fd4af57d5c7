#include "tleague/pool/model_pool_service.hpp"

namespace tleague::pool {

using proto::Message;

ModelPoolService::ModelPoolService(const std::string& host, std::uint16_t port,
                                   std::vector<net::Endpoint> secondaries) {
  for (auto& ep : secondaries)
    secondaries_.push_back(std::make_unique<net::RpcClient>(ep));
  server_ = std::make_unique<net::Server>(
      host, port, [this](const Message& req) { return Handle(req); });
}

Message ModelPoolService::Handle(const Message& req) {
  const std::uint64_t corr = req.correlation_id;
  try {
    if (const auto* put = std::get_if<proto::ParamPutBody>(&req.payload)) {
      store_.Put(put->record);
      for (auto& sec : secondaries_)
        net::Expect<proto::AckBody>(sec->Call(proto::ParamPutBody{put->record}));
      return proto::MakeAck(corr);
    }
    if (const auto* get = std::get_if<proto::ParamGetBody>(&req.payload)) {
      auto rec = store_.Get(get->model_key);
      return proto::MakeMessage(corr, proto::ParamReplyBody{*rec});
    }
    if (const auto* freeze = std::get_if<proto::FreezeModelBody>(&req.payload)) {
      store_.Freeze(freeze->model_key);
      for (auto& sec : secondaries_)
        net::Expect<proto::AckBody>(sec->Call(proto::FreezeModelBody{freeze->model_key}));
      return proto::MakeAck(corr);
    }
    if (std::get_if<proto::ListModelsBody>(&req.payload)) {
      return proto::MakeMessage(corr, proto::ListModelsBody{true, store_.List()});
    }
    return proto::MakeError(corr, proto::kErrBadRequest,
                            std::string("unexpected message kind: ") +
                                proto::MsgKindName(req.kind()));
  } catch (const NotFoundError& e) {
    return proto::MakeError(corr, proto::kErrNotFound, e.what());
  } catch (const FrozenKeyError& e) {
    return proto::MakeError(corr, proto::kErrFrozenKey, e.what());
  } catch (const std::exception& e) {
    return proto::MakeError(corr, proto::kErrUnknown, e.what());
  }
}

ModelPoolClient::ModelPoolClient(std::vector<net::Endpoint> endpoints, std::uint64_t seed)
    : rng_(seed) {
  if (endpoints.empty()) throw std::invalid_argument("no model pool endpoints");
  for (auto& ep : endpoints)
    clients_.push_back(std::make_unique<net::RpcClient>(ep));
}

net::RpcClient& ModelPoolClient::AnyReplica() {
  std::lock_guard lock(rng_mu_);
  std::uniform_int_distribution<std::size_t> pick(0, clients_.size() - 1);
  return *clients_[pick(rng_)];
}

void ModelPoolClient::PutModel(const ModelRecord& record) {
  net::Expect<proto::AckBody>(Primary().Call(proto::ParamPutBody{record}));
}

ModelRecord ModelPoolClient::GetModel(const std::string& model_key) {
  auto reply = AnyReplica().Call(proto::ParamGetBody{model_key});
  return net::Expect<proto::ParamReplyBody>(reply).record;
}

void ModelPoolClient::FreezeModel(const std::string& model_key) {
  net::Expect<proto::AckBody>(Primary().Call(proto::FreezeModelBody{model_key}));
}

std::vector<proto::ModelInfo> ModelPoolClient::ListModels() {
  auto reply = AnyReplica().Call(proto::ListModelsBody{});
  return net::Expect<proto::ListModelsBody>(reply).entries;
}

}  // namespace tleague::pool
