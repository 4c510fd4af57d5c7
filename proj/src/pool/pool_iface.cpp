#include "tleague/pool/pool_iface.hpp"

#include "tleague/pool/model_store.hpp"

namespace tleague::pool {

void DirectPool::PutModel(const ModelRecord& record) { store_.Put(record); }

ModelRecord DirectPool::GetModel(const std::string& model_key) {
  return *store_.Get(model_key);
}

void DirectPool::FreezeModel(const std::string& model_key) { store_.Freeze(model_key); }

}  // namespace tleague::pool
