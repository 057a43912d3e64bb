// Copyright 2026 The Layerwise Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the layerwise binary end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>

#include "gtest/gtest.h"
#include "layerwise/manifest.h"
#include "test_util.h"

namespace layerwise {
namespace {

using testing::TempDir;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
 protected:
  CliResult run(const std::string& args) {
    const auto out = dir_ / ("stdout" + std::to_string(n_));
    const auto err = dir_ / ("stderr" + std::to_string(n_++));
    const std::string cmd = std::string("'") + LAYERWISE_CLI_PATH + "' " + args +
                            " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Default planted dataset under <tmp>/data.
  void synth(const std::string& extra = "") {
    const CliResult r = run("synth --out " + path("data") + " " + extra);
    ASSERT_EQ(r.code, 0) << r.err;
  }

  TempDir dir_;
  int n_ = 0;
};

TEST_F(Cli, SynthThenSweepRecoversSignalLayers) {
  synth();
  const CliResult r = run("sweep --manifest " + path("data/manifest.json") + " --out " +
                    path("out") + " --svg");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "out/best_layers.json"),
            "{\n  \"naturalness\": {\"value\": 1.000000, \"groups\": \"1-2\"}\n}\n");
  EXPECT_EQ(slurp(dir_ / "out/correlations.csv"),
            "dimension,method,layer,negated_correlation\n"
            "naturalness,spearman,0,\n"
            "naturalness,spearman,1,1.000000\n"
            "naturalness,spearman,2,1.000000\n"
            "naturalness,spearman,3,\n"
            "naturalness,spearman,4,\n"
            "naturalness,spearman,5,\n");
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out/curves.svg"));
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out/distances.csv"));
}

TEST_F(Cli, WarmCacheSkipsRecomputation) {
  synth("--frames 40");
  const std::string args =
      "sweep --manifest " + path("data/manifest.json") + " --out " + path("out");
  const CliResult cold = run(args);
  ASSERT_EQ(cold.code, 0) << cold.err;
  EXPECT_NE(cold.err.find("computed: "), std::string::npos);
  const std::string first = slurp(dir_ / "out/distances.csv");
  const CliResult warm = run(args);
  ASSERT_EQ(warm.code, 0) << warm.err;
  EXPECT_EQ(warm.err.find("computed: "), std::string::npos);
  EXPECT_NE(warm.err.find("cache hit: "), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "out/distances.csv"), first);
}

TEST_F(Cli, ThreadCountGivesIdenticalBytes) {
  synth("--frames 60");
  for (const char* t : {"1", "8"}) {
    const CliResult r = run("sweep --manifest " + path("data/manifest.json") +
                      " --threads " + t + " --out " + path(std::string("t") + t));
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* f : {"distances.csv", "correlations.csv", "best_layers.json"}) {
    EXPECT_EQ(slurp(dir_ / "t1" / f), slurp(dir_ / "t8" / f)) << f;
  }
}

TEST_F(Cli, StatsWritesOneSummaryPerEntity) {
  synth("--frames 30");
  const CliResult r = run("stats --manifest " + path("data/manifest.json") + " --out " +
                    path("out"));
  ASSERT_EQ(r.code, 0) << r.err;
  for (int k = 0; k < 5; ++k) {
    EXPECT_TRUE(std::filesystem::exists(
        dir_ / ("out/summaries/systems/sys" + std::to_string(k) + ".lws")));
  }
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out/summaries/reference.lws"));
  const CliResult again = run("stats --manifest " + path("data/manifest.json") +
                        " --out " + path("out"));
  EXPECT_EQ(again.code, 0);
  EXPECT_NE(again.err.find("cache hit: "), std::string::npos);
}

TEST_F(Cli, MissingEmbeddingFileIsInputError) {
  synth("--frames 20");
  const auto victim = dir_ / "data/emb/sys3/utt002.lwe";
  std::filesystem::remove(victim);
  const CliResult r = run("stats --manifest " + path("data/manifest.json") + " --out " +
                    path("out"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("utt002.lwe"), std::string::npos) << r.err;
}

TEST_F(Cli, ConstantRatingsAreDegenerate) {
  synth("--frames 20");
  DatasetManifest m = read_manifest(dir_ / "data/manifest.json");
  for (SystemEntry& s : m.systems) s.ratings["naturalness"] = 3.0;
  write_manifest(m, dir_ / "data/manifest.json");
  const CliResult r = run("sweep --manifest " + path("data/manifest.json") + " --out " +
                    path("out"));
  EXPECT_EQ(r.code, 3) << r.err;
}

TEST_F(Cli, NullShiftWritesOutputsThenExitsDegenerate) {
  synth("--frames 20 --shift 0");
  const CliResult r = run("sweep --manifest " + path("data/manifest.json") + " --out " +
                    path("out"));
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_EQ(slurp(dir_ / "out/best_layers.json"), "{}\n");
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out/correlations.csv"));
}

TEST_F(Cli, SynthValidationAndSeeds) {
  EXPECT_EQ(run("synth --out " + path("bad") + " --signal-layers 6").code, 2);
  EXPECT_EQ(run("synth --out " + path("bad") + " --systems 2").code, 2);
  EXPECT_EQ(run("synth --out " + path("bad") + " --signal-layers x").code, 2);
  const CliResult a = run("synth --seed 5 --frames 8 --out " + path("a"));
  const CliResult b = run("synth --seed 5 --frames 8 --out " + path("b"));
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(a.out, path("a/manifest.json") + "\n");
  EXPECT_EQ(slurp(dir_ / "a/emb/sys4/utt007.lwe"),
            slurp(dir_ / "b/emb/sys4/utt007.lwe"));
  EXPECT_EQ(slurp(dir_ / "a/manifest.json"), slurp(dir_ / "b/manifest.json"));
}

TEST_F(Cli, UsageErrorsAreInputErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("sweep --pooling median").code, 2);
  EXPECT_EQ(run("sweep --out " + path("o")).code, 2);  // no manifest
  EXPECT_EQ(run("sweep --manifest " + path("nope.json")).code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
  synth("--frames 30");
  {
    std::ofstream cfg(dir_ / "cfg.json");
    cfg << R"({"manifest": "data/manifest.json", "method": "pearson",
              "out": "from-config", "threads": 2})";
  }
  const CliResult from_config = run("sweep --config " + path("cfg.json"));
  ASSERT_EQ(from_config.code, 0) << from_config.err;
  EXPECT_NE(slurp(dir_ / "from-config/correlations.csv").find(",pearson,"),
            std::string::npos);

  const CliResult overridden = run("sweep --config " + path("cfg.json") +
                             " --method spearman --out " + path("from-flags"));
  ASSERT_EQ(overridden.code, 0) << overridden.err;
  EXPECT_NE(slurp(dir_ / "from-flags/correlations.csv").find(",spearman,"),
            std::string::npos);

  {
    std::ofstream cfg(dir_ / "bad.json");
    cfg << R"({"methd": "pearson"})";
  }
  EXPECT_EQ(run("sweep --config " + path("bad.json")).code, 2);
}

TEST_F(Cli, ExcludeNaturalDropsSystemZero) {
  synth("--frames 40");
  const CliResult r = run("sweep --exclude-natural --manifest " +
                    path("data/manifest.json") + " --out " + path("out"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(dir_ / "out/best_layers.json").find("\"1-2\""),
            std::string::npos);
}

TEST_F(Cli, RefStudy) {
  synth("--frames 100");
  ASSERT_EQ(run("synth --reference-only --reference-offset 2 --frames 100 --seed 11 "
                "--out " + path("shifted")).code,
            0);
  ASSERT_EQ(run("synth --reference-only --frames 100 --dim 4 --out " +
                path("narrow")).code,
            0);
  const std::string base = "refstudy --manifest " + path("data/manifest.json") +
                           " --out " + path("out") + " --svg";
  const CliResult ok = run(base + " --alt-reference shifted=" +
                     path("shifted/manifest.json") + " --alt-reference same=" +
                     path("data/manifest.json"));
  ASSERT_EQ(ok.code, 0) << ok.err;
  const std::string csv = slurp(dir_ / "out/refstudy.csv");
  EXPECT_EQ(csv.rfind("reference_label,layer,negated_correlation\nprimary,0,", 0),
            0u);
  EXPECT_NE(csv.find("\nshifted,5,"), std::string::npos);
  EXPECT_NE(csv.find("\nsame,1,1.000000\n"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "out/refstudy.svg"));

  const CliResult dup = run(base + " --alt-reference x=" + path("shifted/manifest.json") +
                      " --alt-reference x=" + path("shifted/manifest.json"));
  EXPECT_EQ(dup.code, 2);
  const CliResult clash = run(base + " --alt-reference primary=" +
                        path("shifted/manifest.json"));
  EXPECT_EQ(clash.code, 2);
  const CliResult mismatch = run(base + " --alt-reference narrow=" +
                           path("narrow/manifest.json"));
  EXPECT_EQ(mismatch.code, 2);
  EXPECT_NE(mismatch.err.find("narrow"), std::string::npos) << mismatch.err;
  EXPECT_EQ(run(base).code, 2);  // no alternatives
  EXPECT_EQ(run(base + " --alt-reference novalue").code, 2);
}

}  // namespace
}  // namespace layerwise
