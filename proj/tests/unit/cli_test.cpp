/*
 * Copyright (C) 2026 The offlang Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "offlang/cli.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "offlang/corpus.hpp"
#include "support/synthetic.hpp"

namespace offlang {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string WriteFixture(const std::string& dir, std::size_t rows) {
  std::ostringstream olid;
  WriteOlid(olid, testing::SeparableCorpus(rows, 11));
  const std::string path = dir + "/olid.tsv";
  testing::WriteTextFile(path, olid.str());
  return path;
}

TEST(CliTest, KappaOnTwoItemFixture) {
  const std::string dir = testing::MakeTempDir("offlang_cli");
  testing::WriteTextFile(dir + "/ratings.tsv", "A\tA\nA\tB\n");
  const CliRun r = Cli({"kappa", "--ratings", dir + "/ratings.tsv"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("kappa = -0.333333"), std::string::npos) << r.out;

  testing::WriteTextFile(dir + "/counts.tsv", "2\t0\n1\t1\n");
  const CliRun c = Cli({"kappa", "--ratings", dir + "/counts.tsv", "--format", "counts"});
  EXPECT_NE(c.out.find("kappa = -0.333333"), std::string::npos) << c.out;
}

TEST(CliTest, PredictWithMissingModelWritesNothing) {
  const std::string dir = testing::MakeTempDir("offlang_cli");
  testing::WriteTextFile(dir + "/texts.tsv", "1\thello\n");
  const CliRun r = Cli({"predict", "--model", dir + "/no_model", "--in", dir + "/texts.tsv",
                     "--out", dir + "/pred.tsv"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  EXPECT_FALSE(fs::exists(dir + "/pred.tsv"));
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(Cli({"frobnicate"}).code, 1);
  EXPECT_EQ(Cli({"train", "--bogus-flag", "1"}).code, 1);
  EXPECT_EQ(Cli({}).code, 1);
  EXPECT_EQ(Cli({"--help"}).code, 0);
}

TEST(CliTest, TrainPredictEvalOnFiftyRows) {
  const std::string dir = testing::MakeTempDir("offlang_cli");
  const std::string data = WriteFixture(dir, 50);
  testing::WriteTextFile(dir + "/run.cfg", "model = logreg\nmax_terms = 500\n");
  const std::string model = dir + "/model";
  const CliRun t = Cli({"train", "--task", "6-A", "--data", data, "--config", dir + "/run.cfg",
                     "--out", model});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_TRUE(fs::exists(model + "/effective.cfg"));
  EXPECT_TRUE(fs::exists(model + "/train_report.tsv"));
  EXPECT_FALSE(fs::exists(model + "/.offlang.lock"));
  const std::string cfg = testing::ReadTextFile(model + "/effective.cfg");
  EXPECT_NE(cfg.find("model = logreg"), std::string::npos) << cfg;

  const CliRun p = Cli({"predict", "--model", model, "--in", data, "--out", dir + "/pred.tsv"});
  ASSERT_EQ(p.code, 0) << p.err;
  const std::string pred = testing::ReadTextFile(dir + "/pred.tsv");
  EXPECT_EQ(std::count(pred.begin(), pred.end(), '\n'), 51);
  EXPECT_EQ(pred.rfind("id\tlabel\tOFF\tNOT\n", 0), 0u);

  const CliRun e = Cli({"eval", "--data", data, "--pred", dir + "/pred.tsv"});
  EXPECT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("macro_f1"), std::string::npos) << e.out;
}

TEST(CliTest, ConfigErrorsAreValidationFailures) {
  const std::string dir = testing::MakeTempDir("offlang_cli");
  const std::string data = WriteFixture(dir, 50);
  testing::WriteTextFile(dir + "/bad.cfg", "trees = lots\n");
  EXPECT_EQ(Cli({"train", "--data", data, "--config", dir + "/bad.cfg", "--out",
                 dir + "/m"})
                .code,
            1);
  testing::WriteTextFile(dir + "/jobs.cfg", "jobs = 4\n");
  EXPECT_EQ(Cli({"train", "--data", data, "--config", dir + "/jobs.cfg", "--out",
                 dir + "/m2"})
                .code,
            1);
  EXPECT_EQ(Cli({"train", "--data", dir + "/missing.tsv", "--out", dir + "/m3"}).code, 1);
}

TEST(CliTest, CorpusStats) {
  const std::string dir = testing::MakeTempDir("offlang_cli");
  const CliRun r = Cli({"corpus-stats", "--data", WriteFixture(dir, 40)});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("OFF"), std::string::npos);
}

}  // namespace
}  // namespace offlang
