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

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "generators.hpp"
#include "json.hpp"
#include "pf/cmx.hpp"
#include "pf/dataset.hpp"
#include "pf/image.hpp"

namespace pf {
namespace {

using testing::Gen;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome pf_run(std::vector<std::string> args) {
  args.insert(args.begin(), "pf");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliFlow : public ::testing::Test {
 protected:
  void SetUp() override {
    Gen g(7);
    write_image(dir_ / "src.png", testing::smooth_image(g, 40, 30, 3));
    ASSERT_EQ(pf_run({"scramble", "--input", (dir_ / "src.png").string(), "--piece-size", "10", "--type", "2", "--seed",
                      "4", "--out", bundle()})
                  .code,
              0);
  }

  std::string bundle() const { return (dir_ / "bundle").string(); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }

  testing::TempDir dir_{"cli"};
};

TEST_F(CliFlow, OracleSolveEvaluatesPerfect) {
  const Outcome c = pf_run({"compat", "--bundle", bundle(), "--measure", "oracle", "--out", at("o.cmx")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.out.rfind("measure=oracle n=12 ", 0), 0u) << c.out;
  const Outcome s = pf_run({"solve", "--bundle", bundle(), "--scores", at("o.cmx"), "--pop", "40", "--stall", "10",
                        "--seed", "1", "--out", at("r.json"), "--render", at("r.png")});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("neighbor_accuracy=1\n"), std::string::npos) << s.out;
  const Outcome e = pf_run({"eval", "--bundle", bundle(), "--arrangement", at("r.json"), "--scores", at("o.cmx"), "--out",
                        at("e.json")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("neighbor_accuracy=1\n"), std::string::npos);
  EXPECT_EQ(nlohmann::json::parse(testing::read_file(at("e.json")))["perfect"], true);
  const Image img = read_image(at("r.png"));
  const auto report = nlohmann::json::parse(testing::read_file(at("r.json")));
  EXPECT_EQ(img.height, report["rows"].get<int>() * 10);
  EXPECT_EQ(img.width, report["cols"].get<int>() * 10);
}

TEST_F(CliFlow, TopkCsvFromOracle) {
  ASSERT_EQ(pf_run({"compat", "--bundle", bundle(), "--measure", "oracle", "--out", at("o.cmx")}).code, 0);
  const Outcome t = pf_run({"topk", "--bundle", bundle(), "--scores", at("o.cmx"), "--imax", "3"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(t.out, "i,top_i\n1,1\n2,1\n3,1\n");
}

TEST_F(CliFlow, SolveIsReproducibleAcrossWorkerCounts) {
  ASSERT_EQ(pf_run({"compat", "--bundle", bundle(), "--measure", "mgc", "--workers", "1", "--out", at("a.cmx")}).code, 0);
  ASSERT_EQ(pf_run({"compat", "--bundle", bundle(), "--measure", "mgc", "--workers", "3", "--out", at("b.cmx")}).code, 0);
  EXPECT_EQ(testing::read_file(at("a.cmx")), testing::read_file(at("b.cmx")));
  const std::vector<std::string> base{"solve", "--bundle", bundle(), "--scores", at("a.cmx"), "--pop", "30", "--stall",
                                      "5", "--restarts", "2", "--seed", "9"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> v = base;
    v.insert(v.end(), extra.begin(), extra.end());
    return v;
  };
  ASSERT_EQ(pf_run(with({"--workers", "1", "--out", at("r1.json")})).code, 0);
  ASSERT_EQ(pf_run(with({"--workers", "1", "--out", at("r2.json")})).code, 0);
  ASSERT_EQ(pf_run(with({"--workers", "3", "--out", at("r3.json")})).code, 0);
  EXPECT_EQ(testing::read_file(at("r1.json")), testing::read_file(at("r2.json")));
  EXPECT_EQ(testing::read_file(at("r1.json")), testing::read_file(at("r3.json")));
}

TEST_F(CliFlow, HeatmapShapes) {
  ASSERT_EQ(pf_run({"compat", "--bundle", bundle(), "--measure", "ssd-rgb", "--out", at("s.cmx")}).code, 0);
  const Outcome h = pf_run({"heatmap", "--bundle", bundle(), "--scores", at("s.cmx"), "--relation", "bottom", "--out",
                        at("m.png")});
  ASSERT_EQ(h.code, 0) << h.err;
  EXPECT_EQ(read_image(at("m.png")).width, 12);
  ASSERT_EQ(pf_run({"solve", "--bundle", bundle(), "--scores", at("s.cmx"), "--pop", "20", "--stall", "3", "--out",
                    at("r.json")})
                .code,
            0);
  const Outcome l = pf_run({"heatmap", "--bundle", bundle(), "--scores", at("s.cmx"), "--local-fitness", "--arrangement",
                        at("r.json"), "--cell", "4", "--out", at("l.pgm")});
  ASSERT_EQ(l.code, 0) << l.err;
  const Image img = read_image(at("l.pgm"));
  const auto report = nlohmann::json::parse(testing::read_file(at("r.json")));
  EXPECT_EQ(img.width, report["cols"].get<int>() * 4);
}

TEST_F(CliFlow, RawScoresStayUnnormalized) {
  ASSERT_EQ(pf_run({"compat", "--bundle", bundle(), "--measure", "ssd-rgb", "--raw", "--out", at("raw.cmx")}).code, 0);
  const CompatibilityTensor t = read_cmx(at("raw.cmx"));
  EXPECT_FALSE(t.normalized);
  EXPECT_LT(*std::min_element(t.values().begin(), t.values().end()), -1.0f);
}

TEST(CliErrors, ExitCodes) {
  const testing::TempDir dir("clierr");
  EXPECT_EQ(pf_run({}).code, cli::kExitUsage);
  EXPECT_EQ(pf_run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(pf_run({"compat", "--bundle", "x"}).code, cli::kExitUsage);
  EXPECT_EQ(pf_run({"--help"}).code, cli::kExitOk);
  const Outcome missing = pf_run({"compat", "--bundle", (dir / "nope").string(), "--measure", "mgc", "--out", (dir / "o").string()});
  EXPECT_EQ(missing.code, cli::kExitIo);
  EXPECT_EQ(missing.err.rfind("pf: i/o error: ", 0), 0u);
  { std::ofstream(dir / "manifest.json") << "[]"; }
  EXPECT_EQ(pf_run({"compat", "--bundle", dir.path().string(), "--measure", "mgc", "--out", (dir / "o").string()}).code,
            cli::kExitData);
  Gen g(1);
  write_image(dir / "tiny.png", testing::random_image(g, 5, 5, 3));
  EXPECT_EQ(pf_run({"scramble", "--input", (dir / "tiny.png").string(), "--piece-size", "8", "--out",
                    (dir / "b").string()})
                .code,
            cli::kExitData);
  EXPECT_EQ(pf_run({"compat", "--bundle", "x", "--measure", "bogus", "--out", "y"}).code, cli::kExitUsage);
}

TEST(CliErrors, WorkerEnvironment) {
  ::setenv("PF_WORKERS", "3", 1);
  EXPECT_EQ(cli::default_workers(), 3);
  ::setenv("PF_WORKERS", "zero", 1);
  EXPECT_EQ(cli::default_workers(), 1);
  ::unsetenv("PF_WORKERS");
  EXPECT_EQ(cli::default_workers(), 1);
}

}  // namespace
}  // namespace pf
