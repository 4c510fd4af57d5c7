#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tleague/proto/message.hpp"

namespace tleague::proto {

struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Serializes one Message into a complete frame: a little-endian u32 byte
// count followed by the body. Deterministic: equal messages yield equal
// bytes. Throws EncodeError if the frame would exceed kMaxFrameBytes.
std::vector<std::uint8_t> Encode(const Message& msg);

// Parses exactly one complete frame. Trailing bytes, truncation, an unknown
// kind tag or a schema_version mismatch all throw DecodeError.
Message Decode(std::span<const std::uint8_t> frame);

// Incremental splitter for a byte stream carrying concatenated frames.
class FrameSplitter {
 public:
  void Feed(std::span<const std::uint8_t> bytes);

  // Returns true and fills `frame` (length prefix included) when a complete
  // frame is buffered. Throws DecodeError if a declared length exceeds
  // kMaxFrameBytes.
  bool Next(std::vector<std::uint8_t>& frame);

  std::size_t buffered() const { return buf_.size(); }

 private:
  std::vector<std::uint8_t> buf_;
};

}  // namespace tleague::proto
