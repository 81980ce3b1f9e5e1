// Copyright 2026 The slicebench Authors.
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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "slicebench/cli.hpp"
#include "slicebench/manifest.hpp"
#include "support.hpp"

namespace slicebench {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

TEST(Cli, HelpAndBadArguments) {
  const CliRun help = run({"--help"});
  EXPECT_EQ(help.code, 0);
  EXPECT_NE(help.out.find("zeroshot"), std::string::npos);
  EXPECT_EQ(run({"--version"}).code, 0);
  EXPECT_EQ(run({"split", "--bogus"}).code, 1);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"split", "--manifest", "/nonexistent/m.jsonl"}).code, 1);
  testing::TempDir dir("cli");
  EXPECT_EQ(run({"report", "--out", dir.path().string()}).code, 1);
}

TEST(Cli, ConfigFileWithFlagsTakingPrecedence) {
  testing::TempDir dir("clicfg");
  save_manifest(testing::key_manifest({2, 3, 1, 4}), dir / "m.jsonl");
  write(dir / "c.toml", "seed = 7\njobs = 2\n");
  const std::string m = (dir / "m.jsonl").string();
  ASSERT_EQ(run({"--config", (dir / "c.toml").string(), "split", "--manifest", m, "--out", (dir / "a.json").string()}).code, 0);
  ASSERT_EQ(run({"--config", (dir / "c.toml").string(), "--seed", "9", "split", "--manifest", m, "--out",
                 (dir / "b.json").string()})
                .code,
            0);
  const json a = json::parse(testing::read_text(dir / "a.json"));
  const json b = json::parse(testing::read_text(dir / "b.json"));
  EXPECT_EQ(a["tool"], "slicebench");
  EXPECT_EQ(a["command"], "split");
  EXPECT_EQ(a["config"]["seed"], 7);
  EXPECT_EQ(a["config"]["jobs"], 2);
  EXPECT_EQ(b["config"]["seed"], 9);
  EXPECT_EQ(a["result"]["n_slices"], 10);
}

TEST(Cli, OracleFeaturesGiveUnitDsc) {
  testing::TempDir dir("clizs");
  write(dir / "spec.json", R"({"seed": 2, "n_volumes": 2, "slices_per_volume": 3, "image_size": [32, 32],
    "feature_mode": "onehot_oracle", "patch_size": 1})");
  ASSERT_EQ(run({"synth", "--spec", (dir / "spec.json").string(), "--out", (dir / "d").string()}).code, 0);
  const std::vector<std::string> zs{"zeroshot", "--features", (dir / "d" / "features.jsonl").string(),
                                    "--gt", (dir / "d" / "manifest.jsonl").string(), "--k", "2,4",
                                    "--out", (dir / "zs.csv").string()};
  const CliRun r = run(zs);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = testing::read_text(dir / "zs.csv");
  EXPECT_EQ(csv,
            "k,n_slices,mean_dsc,std_dsc,source,assign\n"
            "2,6,1.000000,0.000000,features,best\n"
            "4,6,1.000000,0.000000,features,best\n");
  const std::string first = testing::read_text(dir / "zs.json");
  ASSERT_EQ(run(zs).code, 0);
  EXPECT_EQ(testing::read_text(dir / "zs.json"), first);
  EXPECT_EQ(testing::read_text(dir / "zs.csv"), csv);
}

TEST(Cli, RuntimeFailureMapsToTwo) {
  testing::TempDir dir("clirt");
  Manifest m = testing::key_manifest({2, 2});
  m.base_dir = dir.path();
  for (auto& e : m.entries) e.mask_path = "missing.png";
  save_manifest(m, dir / "m.jsonl");
  const CliRun r = run({"fewshot", "--pool", (dir / "m.jsonl").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

}  // namespace
}  // namespace slicebench
