#pragma once

#include <memory>
#include <random>
#include <vector>

#include "tleague/net/tcp.hpp"
#include "tleague/pool/model_store.hpp"
#include "tleague/pool/pool_iface.hpp"

namespace tleague::pool {

// One model-pool replica. Writes land on the primary (replica 0), which
// forwards them synchronously to the secondaries; reads may hit any replica.
class ModelPoolService {
 public:
  // `secondaries` is non-empty only on the primary.
  ModelPoolService(const std::string& host, std::uint16_t port,
                   std::vector<net::Endpoint> secondaries = {});

  net::Endpoint endpoint() const { return server_->endpoint(); }
  ModelStore& store() { return store_; }

  void Stop() { server_->Stop(); }

 private:
  proto::Message Handle(const proto::Message& req);

  ModelStore store_;
  std::vector<std::unique_ptr<net::RpcClient>> secondaries_;
  std::unique_ptr<net::Server> server_;
};

// Client-side view over all replicas: puts and freezes go to replica 0,
// reads load-balance over a random replica.
class ModelPoolClient : public ModelPoolIface {
 public:
  explicit ModelPoolClient(std::vector<net::Endpoint> endpoints,
                           std::uint64_t seed = std::random_device{}());

  void PutModel(const ModelRecord& record) override;
  ModelRecord GetModel(const std::string& model_key) override;
  void FreezeModel(const std::string& model_key) override;
  std::vector<proto::ModelInfo> ListModels();

 private:
  net::RpcClient& Primary() { return *clients_.front(); }
  net::RpcClient& AnyReplica();

  std::vector<std::unique_ptr<net::RpcClient>> clients_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_;
};

}  // namespace tleague::pool
