#pragma once

#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tleague/proto/message.hpp"
#include "tleague/types.hpp"

namespace tleague::pool {

struct NotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FrozenKeyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// In-memory parameter store. One writer / many readers; a put swaps the
// whole record atomically, so readers always see a complete blob.
class ModelStore {
 public:
  // Throws FrozenKeyError when the key is already frozen and
  // std::invalid_argument for an oversized blob.
  void Put(const ModelRecord& record);

  // Accepts "latest:<lineage>" to resolve the newest record whose key is
  // "<lineage>:<generation>". Throws NotFoundError.
  std::shared_ptr<const ModelRecord> Get(const std::string& model_key) const;

  // Idempotent. Throws NotFoundError for an unknown key.
  void Freeze(const std::string& model_key);

  bool Contains(const std::string& model_key) const;

  // Keys in first-put order.
  std::vector<proto::ModelInfo> List() const;

  std::size_t size() const;

 private:
  std::shared_ptr<const ModelRecord> Find(const std::string& key) const;

  mutable std::mutex mu_;
  std::unordered_map<std::string, std::shared_ptr<const ModelRecord>> records_;
  std::vector<std::string> order_;
};

// Current wall-clock in microseconds, for ModelRecord::created_at_us.
std::uint64_t NowMicros();

}  // namespace tleague::pool
