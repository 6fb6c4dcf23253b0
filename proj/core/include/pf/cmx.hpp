// Copyright 2026 The piecefit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "pf/error.hpp"
#include "pf/model.hpp"

namespace pf {

/// Binary compatibility tensor file.
///
///   offset size  field
///   0      4     magic "CMX1"
///   4      2     version (1)
///   6      4     n
///   10     1     relation count (4 or 16)
///   11     1     puzzle type (1 or 2)
///   12     1     flags: bit0 normalized, bit1 symmetric
///   13     3     reserved, zero
///   16     ...   n * relations * n float32 values, anchor outermost, then
///                relation, then candidate
///
/// All integers and floats are little-endian.
inline constexpr std::size_t kCmxHeaderSize = 16;
inline constexpr std::uint16_t kCmxVersion = 1;

struct CmxHeader {
  std::uint16_t version = kCmxVersion;
  std::uint32_t n = 0;
  std::uint8_t relation_count = 4;
  std::uint8_t puzzle_type = 1;
  std::uint8_t flags = 0;
};

class CmxError : public Error {
 public:
  enum class Code { NotCmx, VersionMismatch, BadHeader, ShortPayload, TrailingBytes };

  CmxError(Code code, const std::string& what) : Error(ErrorKind::Data, what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

constexpr std::size_t cmx_file_size(std::size_t n, int relations) noexcept {
  return kCmxHeaderSize + 4 * n * n * static_cast<std::size_t>(relations);
}

/// Returns bytes written. Throws DataError on NaN scores, IoError on stream failure.
std::size_t write_cmx(const CompatibilityTensor& t, std::ostream& out);
std::size_t write_cmx(const CompatibilityTensor& t, const std::filesystem::path& path);

CompatibilityTensor read_cmx(std::istream& in);
CompatibilityTensor read_cmx(const std::filesystem::path& path);

}  // namespace pf
