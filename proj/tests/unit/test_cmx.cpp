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


#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "generators.hpp"
#include "pf/cmx.hpp"

namespace pf {
namespace {

using testing::Gen;

// Byte-by-byte encoder written against the format description.
std::string hand_encode(const CompatibilityTensor& t) {
  std::string s = "CMX1";
  auto u8 = [&](unsigned v) { s.push_back(static_cast<char>(v & 0xff)); };
  u8(1), u8(0);
  const auto n = static_cast<std::uint32_t>(t.size());
  for (int k = 0; k < 4; ++k) u8(n >> (8 * k));
  u8(static_cast<unsigned>(t.relations()));
  u8(static_cast<unsigned>(t.type()));
  u8((t.normalized ? 1u : 0u) | (t.symmetric ? 2u : 0u));
  u8(0), u8(0), u8(0);
  for (float v : t.values()) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int k = 0; k < 4; ++k) u8(bits >> (8 * k));
  }
  return s;
}

std::string encode(const CompatibilityTensor& t) {
  std::ostringstream out;
  write_cmx(t, out);
  return out.str();
}

CmxError::Code read_error(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    read_cmx(in);
  } catch (const CmxError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a CMX error";
  return CmxError::Code::BadHeader;
}

TEST(Cmx, FileSizes) {
  EXPECT_EQ(cmx_file_size(3, 4), 160u);
  EXPECT_EQ(cmx_file_size(3, 16), 592u);
  EXPECT_EQ(encode(CompatibilityTensor(3, PuzzleType::Type1)).size(), 160u);
  EXPECT_EQ(encode(CompatibilityTensor(3, PuzzleType::Type2)).size(), 592u);
}

TEST(Cmx, MatchesHandEncoding) {
  Gen g(41);
  for (auto type : {PuzzleType::Type1, PuzzleType::Type2}) {
    auto t = testing::random_tensor(g, 4, type);
    t.values()[3] = -0.0f;
    t.values()[5] = std::numeric_limits<float>::denorm_min();
    t.normalized = type == PuzzleType::Type2;
    t.symmetric = true;
    EXPECT_EQ(encode(t), hand_encode(t));
  }
}

TEST(Cmx, RoundTripIsBitExact) {
  Gen g(42);
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int trial = 0; trial < 50; ++trial) {
    const auto type = trial % 2 ? PuzzleType::Type2 : PuzzleType::Type1;
    CompatibilityTensor t(static_cast<std::size_t>(testing::uniform_int(g, 1, 7)), type);
    for (float& v : t.values()) {
      do {
        const std::uint32_t b = bits(g);
        std::memcpy(&v, &b, 4);
      } while (std::isnan(v));
    }
    t.normalized = trial % 3 == 0;
    t.symmetric = trial % 5 == 0;
    std::istringstream in(encode(t));
    const auto back = read_cmx(in);
    ASSERT_EQ(back.size(), t.size());
    ASSERT_EQ(back.type(), t.type());
    EXPECT_EQ(back.normalized, t.normalized);
    EXPECT_EQ(back.symmetric, t.symmetric);
    ASSERT_EQ(std::memcmp(back.values().data(), t.values().data(), t.values().size() * 4), 0);
  }
}

TEST(Cmx, FileRoundTrip) {
  Gen g(43);
  const auto t = testing::random_tensor(g, 5, PuzzleType::Type2);
  testing::TempDir dir("cmx");
  EXPECT_EQ(write_cmx(t, dir / "t.cmx"), cmx_file_size(5, 16));
  EXPECT_EQ(std::filesystem::file_size(dir / "t.cmx"), cmx_file_size(5, 16));
  const auto back = read_cmx(dir / "t.cmx");
  EXPECT_TRUE(std::equal(t.values().begin(), t.values().end(), back.values().begin()));
}

TEST(Cmx, TruncatedPayload) {
  const std::string bytes = encode(CompatibilityTensor(3, PuzzleType::Type1));
  EXPECT_EQ(read_error(bytes.substr(0, bytes.size() - 1)), CmxError::Code::ShortPayload);
  std::istringstream in(bytes.substr(0, 100));
  try {
    read_cmx(in);
    FAIL();
  } catch (const CmxError& e) {
    EXPECT_STREQ(e.what(), "short payload");
  }
}

TEST(Cmx, WrongMagic) {
  std::string bytes = encode(CompatibilityTensor(2, PuzzleType::Type1));
  bytes[3] = '2';
  EXPECT_EQ(read_error(bytes), CmxError::Code::NotCmx);
  std::istringstream in(bytes);
  try {
    read_cmx(in);
    FAIL();
  } catch (const CmxError& e) {
    EXPECT_STREQ(e.what(), "not a CMX file");
  }
  EXPECT_EQ(read_error("CM"), CmxError::Code::NotCmx);
}

TEST(Cmx, VersionAndHeaderChecks) {
  const std::string good = encode(CompatibilityTensor(2, PuzzleType::Type1));
  std::string v2 = good;
  v2[4] = 2;
  EXPECT_EQ(read_error(v2), CmxError::Code::VersionMismatch);
  std::string rels = good;
  rels[10] = 16;  // Type-1 with 16 relations
  EXPECT_EQ(read_error(rels), CmxError::Code::BadHeader);
  std::string reserved = good;
  reserved[15] = 1;
  EXPECT_EQ(read_error(reserved), CmxError::Code::BadHeader);
  EXPECT_EQ(read_error(good + "x"), CmxError::Code::TrailingBytes);
}

TEST(Cmx, NanIsRejectedOnWrite) {
  CompatibilityTensor t(2, PuzzleType::Type1);
  t.values()[1] = std::numeric_limits<float>::quiet_NaN();
  std::ostringstream out;
  EXPECT_THROW(write_cmx(t, out), Error);
}

TEST(Cmx, MissingFileIsIoError) {
  try {
    read_cmx(std::filesystem::path("/nonexistent/dir/t.cmx"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

}  // namespace
}  // namespace pf
