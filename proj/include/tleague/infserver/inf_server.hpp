#pragma once

#include <condition_variable>
#include <future>
#include <memory>
#include <mutex>
#include <queue>
#include <thread>

#include "tleague/net/tcp.hpp"
#include "tleague/policy/policy.hpp"
#include "tleague/pool/pool_iface.hpp"

namespace tleague::infserver {

// What an actor in remote-inference mode needs.
class InferenceIface {
 public:
  virtual ~InferenceIface() = default;
  virtual proto::InferenceReplyBody Infer(const std::vector<double>& obs) = 0;
};

// Batched inference service: coalesces observations from many actors,
// evaluates the tracked policy once per batch, and routes each reply back.
// The reply is bit-identical to local evaluation under the same blob.
class InfServer {
 public:
  struct Config {
    std::string model_key;  // explicit key or "latest:<lineage>"
    std::uint32_t max_batch = 32;
    double flush_timeout_ms = 2.0;
    int refresh_interval_ms = 100;
  };

  InfServer(Config config, pool::ModelPoolIface& pool, const std::string& host,
            std::uint16_t port);
  ~InfServer();

  net::Endpoint endpoint() const { return server_->endpoint(); }

  // Loads the blob immediately (initial model must exist in the pool).
  void RefreshNow();

  std::uint64_t model_version() const;

  void Stop();

 private:
  struct Pending {
    std::vector<double> obs;
    std::promise<proto::InferenceReplyBody> promise;
  };

  proto::Message Handle(const proto::Message& req);
  proto::InferenceReplyBody Enqueue(std::vector<double> obs);
  void BatchLoop();
  void RefreshLoop();

  Config config_;
  pool::ModelPoolIface& pool_;

  mutable std::mutex model_mu_;
  std::shared_ptr<const ParamBlob> model_;
  std::uint64_t model_version_ = 0;

  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::queue<Pending> queue_;
  bool stopping_ = false;

  std::thread batch_thread_;
  std::thread refresh_thread_;
  std::unique_ptr<net::Server> server_;
};

class InferenceClient : public InferenceIface {
 public:
  explicit InferenceClient(net::Endpoint ep) : rpc_(std::move(ep)) {}

  proto::InferenceReplyBody Infer(const std::vector<double>& obs) override;

 private:
  net::RpcClient rpc_;
};

}  // namespace tleague::infserver
