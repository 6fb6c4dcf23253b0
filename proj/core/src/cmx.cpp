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

#include "pf/cmx.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace pf {

namespace {

constexpr std::array<char, 4> kMagic = {'C', 'M', 'X', '1'};

void put_le(std::uint8_t* dst, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) dst[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint64_t get_le(const std::uint8_t* src, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(src[i]) << (8 * i);
  return v;
}

}  // namespace

std::size_t write_cmx(const CompatibilityTensor& t, std::ostream& out) {
  const auto values = t.values();
  for (float v : values) {
    if (std::isnan(v)) throw DataError("NaN score cannot be written to CMX");
  }
  std::array<std::uint8_t, kCmxHeaderSize> header{};
  std::memcpy(header.data(), kMagic.data(), 4);
  put_le(&header[4], kCmxVersion, 2);
  put_le(&header[6], t.size(), 4);
  header[10] = static_cast<std::uint8_t>(t.relations());
  header[11] = static_cast<std::uint8_t>(t.type());
  header[12] = static_cast<std::uint8_t>((t.normalized ? 1 : 0) | (t.symmetric ? 2 : 0));
  out.write(reinterpret_cast<const char*>(header.data()), header.size());

  std::vector<std::uint8_t> payload(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    put_le(&payload[i * 4], std::bit_cast<std::uint32_t>(values[i]), 4);
  }
  out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("CMX write failed");
  return header.size() + payload.size();
}

std::size_t write_cmx(const CompatibilityTensor& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  try {
    const std::size_t bytes = write_cmx(t, out);
    out.flush();
    if (!out) throw IoError("");
    return bytes;
  } catch (const IoError&) {
    throw IoError("cannot write " + path.string());
  }
}

CompatibilityTensor read_cmx(std::istream& in) {
  std::array<std::uint8_t, kCmxHeaderSize> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() >= 4 && std::memcmp(header.data(), kMagic.data(), 4) != 0) {
    throw CmxError(CmxError::Code::NotCmx, "not a CMX file");
  }
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    if (in.gcount() < 4) throw CmxError(CmxError::Code::NotCmx, "not a CMX file");
    throw CmxError(CmxError::Code::ShortPayload, "short payload");
  }
  CmxHeader h;
  h.version = static_cast<std::uint16_t>(get_le(&header[4], 2));
  h.n = static_cast<std::uint32_t>(get_le(&header[6], 4));
  h.relation_count = header[10];
  h.puzzle_type = header[11];
  h.flags = header[12];
  if (h.version != kCmxVersion) {
    throw CmxError(CmxError::Code::VersionMismatch, "unsupported CMX version " + std::to_string(h.version));
  }
  const bool consistent = (h.puzzle_type == 1 && h.relation_count == 4) || (h.puzzle_type == 2 && h.relation_count == 16);
  if (!consistent || (h.flags & ~0x3u) != 0 || header[13] || header[14] || header[15]) {
    throw CmxError(CmxError::Code::BadHeader, "inconsistent CMX header");
  }

  const std::size_t expected = cmx_file_size(h.n, h.relation_count) - kCmxHeaderSize;
  // Seekable streams: reject truncated files before allocating the payload.
  const auto here = in.tellg();
  if (here != std::streampos(-1)) {
    in.seekg(0, std::ios::end);
    const auto end = in.tellg();
    in.seekg(here);
    if (end != std::streampos(-1) && static_cast<std::size_t>(end - here) < expected) {
      throw CmxError(CmxError::Code::ShortPayload, "short payload");
    }
  }

  CompatibilityTensor t(h.n, static_cast<PuzzleType>(h.puzzle_type));
  auto values = t.values();
  std::vector<std::uint8_t> payload(values.size() * 4);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (in.gcount() != static_cast<std::streamsize>(payload.size())) {
    throw CmxError(CmxError::Code::ShortPayload, "short payload");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CmxError(CmxError::Code::TrailingBytes, "trailing bytes after CMX payload");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(&payload[i * 4], 4)));
  }
  t.normalized = (h.flags & 1) != 0;
  t.symmetric = (h.flags & 2) != 0;
  return t;
}

CompatibilityTensor read_cmx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_cmx(in);
}

}  // namespace pf
