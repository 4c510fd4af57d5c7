#include "tleague/infserver/inf_server.hpp"

#include <chrono>
#include <stdexcept>
#include <utility>

namespace tleague::infserver {

InfServer::InfServer(Config config, pool::ModelPoolIface& pool,
                     const std::string& host, std::uint16_t port)
    : config_(std::move(config)), pool_(pool) {
  if (config_.max_batch == 0) throw std::invalid_argument("max_batch must be >= 1");
  if (config_.flush_timeout_ms <= 0.0) {
    throw std::invalid_argument("flush_timeout_ms must be > 0");
  }
  RefreshNow();
  batch_thread_ = std::thread(&InfServer::BatchLoop, this);
  if (config_.refresh_interval_ms > 0) {
    refresh_thread_ = std::thread(&InfServer::RefreshLoop, this);
  }
  server_ = std::make_unique<net::Server>(
      host, port, [this](const proto::Message& req) { return Handle(req); });
}

InfServer::~InfServer() { Stop(); }

void InfServer::Stop() {
  {
    std::lock_guard lock(queue_mu_);
    if (stopping_) return;
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (server_) server_->Stop();
  if (batch_thread_.joinable()) batch_thread_.join();
  if (refresh_thread_.joinable()) refresh_thread_.join();
}

void InfServer::RefreshNow() {
  ModelRecord record = pool_.GetModel(config_.model_key);
  auto blob = std::make_shared<const ParamBlob>(std::move(record.params));
  std::lock_guard lock(model_mu_);
  // Version only moves forward; identical re-pulls still bump it, which is
  // harmless (monotonicity is the contract, not minimality).
  if (!model_ || !(*model_ == *blob)) {
    model_ = std::move(blob);
    ++model_version_;
  }
}

std::uint64_t InfServer::model_version() const {
  std::lock_guard lock(model_mu_);
  return model_version_;
}

void InfServer::RefreshLoop() {
  for (;;) {
    {
      std::unique_lock lock(queue_mu_);
      queue_cv_.wait_for(lock,
                         std::chrono::milliseconds(config_.refresh_interval_ms),
                         [&] { return stopping_; });
      if (stopping_) return;
    }
    try {
      RefreshNow();
    } catch (const std::exception&) {
      // Pool unreachable: keep serving the blob we have.
    }
  }
}

proto::Message InfServer::Handle(const proto::Message& req) {
  const auto* body = std::get_if<proto::InferenceRequestBody>(&req.payload);
  if (body == nullptr) {
    return proto::MakeError(req.correlation_id, proto::kErrBadRequest,
                            "inf-server only accepts InferenceRequest");
  }
  try {
    proto::InferenceReplyBody reply = Enqueue(body->obs);
    return proto::MakeMessage(req.correlation_id, std::move(reply));
  } catch (const std::exception& e) {
    return proto::MakeError(req.correlation_id, proto::kErrNoModelLoaded, e.what());
  }
}

proto::InferenceReplyBody InfServer::Enqueue(std::vector<double> obs) {
  std::future<proto::InferenceReplyBody> fut;
  {
    std::lock_guard lock(queue_mu_);
    if (stopping_) throw std::runtime_error("server stopping");
    Pending p;
    p.obs = std::move(obs);
    fut = p.promise.get_future();
    queue_.push(std::move(p));
  }
  queue_cv_.notify_all();
  return fut.get();
}

void InfServer::BatchLoop() {
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double, std::milli>(config_.flush_timeout_ms));
  for (;;) {
    std::vector<Pending> batch;
    {
      std::unique_lock lock(queue_mu_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_ && queue_.empty()) return;
      // Collect up to max_batch, waiting out the flush timeout for stragglers.
      const auto deadline = std::chrono::steady_clock::now() + timeout;
      while (batch.size() < config_.max_batch) {
        if (!queue_.empty()) {
          batch.push_back(std::move(queue_.front()));
          queue_.pop();
          continue;
        }
        if (stopping_) break;
        if (queue_cv_.wait_until(lock, deadline) == std::cv_status::timeout) break;
      }
    }
    if (batch.empty()) continue;

    // One blob for the whole batch: a concurrent swap affects the next batch.
    std::shared_ptr<const ParamBlob> blob;
    std::uint64_t version = 0;
    {
      std::lock_guard lock(model_mu_);
      blob = model_;
      version = model_version_;
    }
    for (Pending& p : batch) {
      try {
        proto::InferenceReplyBody reply;
        auto dist = policy::Distribution(*blob, p.obs);
        reply.logits = std::move(dist.logits);
        reply.probs = std::move(dist.probs);
        reply.value = policy::ValueEstimate(*blob, p.obs);
        reply.model_version = version;
        p.promise.set_value(std::move(reply));
      } catch (...) {
        p.promise.set_exception(std::current_exception());
      }
    }
  }
}

proto::InferenceReplyBody InferenceClient::Infer(const std::vector<double>& obs) {
  proto::InferenceRequestBody body;
  body.obs = obs;
  auto reply = rpc_.Call(std::move(body));
  return net::Expect<proto::InferenceReplyBody>(reply);
}

}  // namespace tleague::infserver
