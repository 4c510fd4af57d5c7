#pragma once

#include <string>

#include "tleague/types.hpp"

namespace tleague::run {

// Model files are the wire encoding of a ParamPut message (frame included),
// so a saved file can be replayed straight into a pool replica.
void SaveModel(const std::string& path, const ModelRecord& record);
ModelRecord LoadModel(const std::string& path);

}  // namespace tleague::run
