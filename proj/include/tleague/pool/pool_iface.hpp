#pragma once

#include <string>

#include "tleague/types.hpp"

namespace tleague::pool {

class ModelStore;

// What model-pool consumers (league manager, learner, actors) need; backed
// either by a remote ModelPoolClient or an in-process store.
class ModelPoolIface {
 public:
  virtual ~ModelPoolIface() = default;
  virtual void PutModel(const ModelRecord& record) = 0;
  virtual ModelRecord GetModel(const std::string& model_key) = 0;
  virtual void FreezeModel(const std::string& model_key) = 0;
};

// In-process adapter over a ModelStore, for lockstep runs and tests.
class DirectPool : public ModelPoolIface {
 public:
  explicit DirectPool(ModelStore& store) : store_(store) {}
  void PutModel(const ModelRecord& record) override;
  ModelRecord GetModel(const std::string& model_key) override;
  void FreezeModel(const std::string& model_key) override;

 private:
  ModelStore& store_;
};

}  // namespace tleague::pool
