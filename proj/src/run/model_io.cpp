#include "tleague/run/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include "tleague/proto/codec.hpp"

namespace tleague::run {

void SaveModel(const std::string& path, const ModelRecord& record) {
  auto bytes = proto::Encode(proto::MakeMessage(0, proto::ParamPutBody{record}));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to model file: " + path);
}

ModelRecord LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  proto::Message msg = proto::Decode(bytes);
  const auto* put = std::get_if<proto::ParamPutBody>(&msg.payload);
  if (put == nullptr) throw std::runtime_error("not a model file: " + path);
  return put->record;
}

}  // namespace tleague::run
