#include "tleague/pool/model_store.hpp"

#include <chrono>

namespace tleague::pool {

std::uint64_t NowMicros() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count());
}

void ModelStore::Put(const ModelRecord& record) {
  if (record.model_key.empty()) throw std::invalid_argument("empty model key");
  if (record.params.values.size() * sizeof(double) > proto::kMaxFrameBytes / 2)
    throw std::invalid_argument("oversized parameter blob");
  auto copy = std::make_shared<const ModelRecord>(record);
  std::lock_guard lock(mu_);
  auto it = records_.find(record.model_key);
  if (it != records_.end()) {
    if (it->second->frozen)
      throw FrozenKeyError("model is frozen: " + record.model_key);
    it->second = std::move(copy);
  } else {
    records_.emplace(record.model_key, std::move(copy));
    order_.push_back(record.model_key);
  }
}

std::shared_ptr<const ModelRecord> ModelStore::Find(const std::string& key) const {
  constexpr const char kLatest[] = "latest:";
  if (key.rfind(kLatest, 0) == 0) {
    std::string prefix = key.substr(sizeof(kLatest) - 1) + ":";
    // newest = last created with this lineage prefix
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      if (it->rfind(prefix, 0) == 0) return records_.at(*it);
    }
    return nullptr;
  }
  auto it = records_.find(key);
  return it == records_.end() ? nullptr : it->second;
}

std::shared_ptr<const ModelRecord> ModelStore::Get(const std::string& model_key) const {
  std::lock_guard lock(mu_);
  auto rec = Find(model_key);
  if (!rec) throw NotFoundError("unknown model key: " + model_key);
  return rec;
}

void ModelStore::Freeze(const std::string& model_key) {
  std::lock_guard lock(mu_);
  auto it = records_.find(model_key);
  if (it == records_.end()) throw NotFoundError("unknown model key: " + model_key);
  if (it->second->frozen) return;  // idempotent
  auto copy = std::make_shared<ModelRecord>(*it->second);
  copy->frozen = true;
  it->second = std::move(copy);
}

bool ModelStore::Contains(const std::string& model_key) const {
  std::lock_guard lock(mu_);
  return Find(model_key) != nullptr;
}

std::vector<proto::ModelInfo> ModelStore::List() const {
  std::lock_guard lock(mu_);
  std::vector<proto::ModelInfo> out;
  out.reserve(order_.size());
  for (const auto& key : order_) {
    const auto& rec = records_.at(key);
    out.push_back({rec->model_key, rec->frozen, rec->created_at_us});
  }
  return out;
}

std::size_t ModelStore::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

}  // namespace tleague::pool
