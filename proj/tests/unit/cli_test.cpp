//------------------------------------------------------------------------------
//
//   Copyright 2026 The uidscan Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli/cli.hpp"
#include "uidscan/file_util.hpp"
#include "uidscan/logreg.hpp"
#include "uidscan/surprisal_io.hpp"

namespace uidscan {
namespace {

namespace fs = std::filesystem;

fs::path const kFixtures = UIDSCAN_FIXTURE_DIR;

struct Outcome
{
  int         code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> const &args)
{
  std::ostringstream out;
  std::ostringstream err;
  int const          code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test
{
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() / ("uidscan_cli_" + std::to_string(std::random_device{}()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override
  {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  std::string tmp(std::string const &name) const
  {
    return (dir_ / name).string();
  }

  std::vector<std::string> lines(std::string const &path) const
  {
    std::ifstream            in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);)
    {
      out.push_back(line);
    }
    return out;
  }

  std::string train_model(std::vector<std::string> extra = {})
  {
    std::vector<std::string> args{"train", "--manifest", (kFixtures / "synthetic/manifest.json").string(),
                                  "--model-out", tmp("model.json")};
    args.insert(args.end(), extra.begin(), extra.end());
    auto const r = run_cli(args);
    EXPECT_EQ(r.code, 0) << r.err;
    return tmp("model.json");
  }

  fs::path dir_;
};

TEST_F(CliTest, FeaturizeDefaultsTo44)
{
  auto const r = run_cli({"featurize", "--input", (kFixtures / "synthetic/test.jsonl").string(), "--output",
                          tmp("features.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto const out = lines(tmp("features.jsonl"));
  ASSERT_EQ(out.size(), 20u);
  for (auto const &line : out)
  {
    EXPECT_EQ(nlohmann::json::parse(line).at("features").size(), 44u);
  }
}

TEST_F(CliTest, FeaturizeWithoutSpans)
{
  auto const r = run_cli({"featurize", "--input", (kFixtures / "synthetic/test.jsonl").string(), "--output",
                          tmp("features.jsonl"), "--span-mode", "none"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto const first = nlohmann::json::parse(lines(tmp("features.jsonl")).front());
  EXPECT_EQ(first.at("features").size(), 4u);
}

TEST_F(CliTest, FeaturizeSkipsShortDocsWithWarning)
{
  auto const r = run_cli(
      {"featurize", "--input", (kFixtures / "edge_cases.jsonl").string(), "--output", tmp("f.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(tmp("f.jsonl")).size(), 3u);
  EXPECT_NE(r.err.find("skipped single"), std::string::npos);

  auto const strict = run_cli({"--strict-short-docs", "featurize", "--input",
                               (kFixtures / "edge_cases.jsonl").string(), "--output", tmp("g.jsonl")});
  ASSERT_EQ(strict.code, 0) << strict.err;
  EXPECT_EQ(lines(tmp("g.jsonl")).size(), 0u);
}

TEST_F(CliTest, FeaturizeMissingInput)
{
  auto const r = run_cli({"featurize", "--input", tmp("absent.jsonl"), "--output", tmp("f.jsonl")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("absent.jsonl"), std::string::npos);
  EXPECT_FALSE(fs::exists(tmp("f.jsonl")));
}

TEST_F(CliTest, FlagsAreValidatedBeforeFilesAreTouched)
{
  auto const r = run_cli({"featurize", "--input", tmp("absent.jsonl"), "--output", tmp("f.jsonl"),
                          "--span-length", "1"});
  EXPECT_NE(r.code, 0);
  EXPECT_EQ(r.err.find("absent.jsonl"), std::string::npos);
  EXPECT_NE(run_cli({"featurize", "--input", "x", "--output", "y", "--span-mode", "sideways"}).code, 0);
}

TEST_F(CliTest, TrainDiscoversClasses)
{
  auto const model = load_model(train_model());
  EXPECT_EQ(model.classes, (std::vector<std::string>{"human", "machine"}));
  EXPECT_EQ(model.feature_dim, 44u);
  EXPECT_EQ(model.span_length, 20u);
}

TEST_F(CliTest, TrainIterationCapWarns)
{
  auto const r = run_cli({"train", "--manifest", (kFixtures / "synthetic/manifest.json").string(), "--model-out",
                          tmp("m.json"), "--max-iter", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(tmp("m.json")));
  EXPECT_NE(r.err.find("not converged"), std::string::npos);
}

TEST_F(CliTest, TrainNeedsTwoClasses)
{
  write_file_atomic(tmp("one.jsonl"), R"({"doc_id":"a","label":"human","tokens":[{"t":"x","s":1},{"t":"y","s":2}]}
{"doc_id":"b","label":"human","tokens":[{"t":"x","s":3},{"t":"y","s":2}]}
)");
  write_file_atomic(tmp("m.json"), R"({"name":"one","label_set":["human","machine"],"splits":{"train":["one.jsonl"]}})");
  auto const r = run_cli({"train", "--manifest", tmp("m.json"), "--model-out", tmp("model.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("need >= 2 classes"), std::string::npos);
  EXPECT_FALSE(fs::exists(tmp("model.json")));
}

TEST_F(CliTest, TrainFromFeatureFile)
{
  ASSERT_EQ(run_cli({"featurize", "--input", (kFixtures / "synthetic/train.jsonl").string(), "--output",
                     tmp("train.features.jsonl")})
                .code,
            0);
  auto const r = run_cli({"train", "--features", tmp("train.features.jsonl"), "--model-out", tmp("model.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto const via_features = load_model(tmp("model.json"));
  auto const via_manifest = load_model(train_model());
  EXPECT_EQ(via_features, via_manifest);
}

TEST_F(CliTest, EvaluateWritesReports)
{
  ASSERT_EQ(run_cli({"synth", "--kind", "dispersion", "--train-docs", "200", "--test-docs", "100", "--output-dir",
                     tmp("corpus")})
                .code,
            0);
  auto const manifest = tmp("corpus/manifest.json");
  ASSERT_EQ(run_cli({"train", "--manifest", manifest, "--model-out", tmp("model.json")}).code, 0);
  auto const r = run_cli({"evaluate", "--manifest", manifest, "--model", tmp("model.json"), "--report-out",
                          tmp("report.json"), "--report-out", tmp("report.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("average F1"), std::string::npos);
  auto const report = nlohmann::json::parse(read_file(tmp("report.json")));
  EXPECT_GE(report.at("average_f1").get<double>(), 0.95);
  EXPECT_EQ(report.at("n_docs").get<int>(), 200);
  EXPECT_EQ(lines(tmp("report.csv")).front(), "class,precision,recall,f1,support");
}

TEST_F(CliTest, EvaluateDimensionMismatch)
{
  auto const model = train_model();
  ASSERT_EQ(run_cli({"featurize", "--input", (kFixtures / "synthetic/test.jsonl").string(), "--output",
                     tmp("f4.jsonl"), "--span-mode", "none"})
                .code,
            0);
  auto const r = run_cli({"evaluate", "--features", tmp("f4.jsonl"), "--model", model, "--report-out",
                          tmp("r.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("44"), std::string::npos);
  EXPECT_NE(r.err.find("4"), std::string::npos);
  EXPECT_FALSE(fs::exists(tmp("r.json")));
}

TEST_F(CliTest, EvaluateEmptySplit)
{
  auto const model = train_model();
  write_file_atomic(tmp("m.json"), R"({"name":"e","label_set":["human","machine"],"splits":{"test":[]}})");
  auto const r = run_cli({"evaluate", "--manifest", tmp("m.json"), "--model", model, "--report-out", tmp("r.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("no documents"), std::string::npos);
}

TEST_F(CliTest, PredictSchema)
{
  auto const model = train_model();
  auto const r = run_cli({"predict", "--input", (kFixtures / "edge_cases.jsonl").string(), "--model", model,
                          "--output", tmp("pred.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("single"), std::string::npos);
  auto const out = lines(tmp("pred.jsonl"));
  ASSERT_EQ(out.size(), 3u);
  for (auto const &line : out)
  {
    auto const doc = nlohmann::json::parse(line);
    EXPECT_TRUE(doc.contains("doc_id"));
    EXPECT_TRUE(doc.contains("pred"));
    double sum = 0.0;
    for (auto const &[cls, p] : doc.at("proba").items())
    {
      sum += p.get<double>();
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST_F(CliTest, ExplainFindsSpike)
{
  auto const r = run_cli({"explain", "--input", (kFixtures / "edge_cases.jsonl").string(), "--doc-id", "spike",
                          "--span-length", "4", "--output", tmp("spike.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto const max_block = r.out.substr(r.out.find("max-UID span"), r.out.find("min-UID span") - r.out.find("max-UID span"));
  EXPECT_NE(max_block.find("quantum"), std::string::npos);
  EXPECT_NE(max_block.find("offset 2"), std::string::npos);
  auto const min_block = r.out.substr(r.out.find("min-UID span"));
  EXPECT_EQ(min_block.find("quantum"), std::string::npos);
  auto const csv = lines(tmp("spike.csv"));
  ASSERT_EQ(csv.size(), 13u);
  EXPECT_EQ(csv[0], "index,token,surprisal");
  EXPECT_EQ(csv[6], "5, quantum,14.5");
}

TEST_F(CliTest, ExplainConstantDocument)
{
  auto const r = run_cli({"explain", "--input", (kFixtures / "edge_cases.jsonl").string(), "--doc-id", "flat",
                          "--span-length", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("max-UID span: offset 0, length 3, variance 0\n"), std::string::npos);
  EXPECT_NE(r.out.find("min-UID span: offset 0, length 3, variance 0\n"), std::string::npos);
}

TEST_F(CliTest, ExplainCsvQuoting)
{
  auto const r = run_cli({"explain", "--input", (kFixtures / "edge_cases.jsonl").string(), "--doc-id", "comma",
                          "--span-length", "2", "--output", tmp("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(tmp("c.csv")), "index,token,surprisal\n0,\"Hello, \"\"world\"\"\",1.25\n1,!,0.5\n2,\"\n\",3\n");
}

TEST_F(CliTest, ExplainUnknownDoc)
{
  auto const r = run_cli({"explain", "--input", (kFixtures / "edge_cases.jsonl").string(), "--doc-id", "nope"});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, DistributionGolden)
{
  auto const r = run_cli({"distribution", "--manifest", (kFixtures / "distribution/manifest.json").string(),
                          "--split", "test", "--output", tmp("dist.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(tmp("dist.csv")), read_file(kFixtures / "distribution/expected.csv"));
}

TEST_F(CliTest, DistributionSeparatesSyntheticGroups)
{
  auto const r = run_cli({"distribution", "--manifest", (kFixtures / "synthetic/manifest.json").string(), "--split",
                          "train", "--output", tmp("dist.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto const rows = lines(tmp("dist.csv"));
  ASSERT_EQ(rows.size(), 3u);
  auto const field = [](std::string const &row, int k) {
    std::stringstream ss(row);
    std::string       cell;
    for (int i = 0; i <= k; ++i)
    {
      std::getline(ss, cell, ',');
    }
    return std::stod(cell);
  };
  EXPECT_EQ(rows[1].substr(0, 6), "human,");
  EXPECT_GT(field(rows[1], 1), field(rows[2], 1));
  EXPECT_GT(field(rows[1], 2), field(rows[2], 2));
}

TEST_F(CliTest, DistributionEmptySplit)
{
  auto const r = run_cli({"distribution", "--manifest", (kFixtures / "distribution/manifest.json").string(),
                          "--split", "empty", "--output", tmp("dist.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(fs::exists(tmp("dist.csv")));
}

TEST_F(CliTest, QuietSuppressesSummaries)
{
  auto const r = run_cli({"--quiet", "featurize", "--input", (kFixtures / "edge_cases.jsonl").string(), "--output",
                          tmp("f.jsonl")});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_TRUE(r.err.empty());
}

TEST_F(CliTest, SubcommandsAreIdempotent)
{
  auto const input = (kFixtures / "synthetic/train.jsonl").string();
  for (auto const *mode : {"minmax", "random"})
  {
    ASSERT_EQ(run_cli({"--seed", "9", "featurize", "--input", input, "--output", tmp("a.jsonl"), "--span-mode", mode}).code, 0);
    ASSERT_EQ(run_cli({"--seed", "9", "featurize", "--input", input, "--output", tmp("b.jsonl"), "--span-mode", mode}).code, 0);
    EXPECT_EQ(read_file(tmp("a.jsonl")), read_file(tmp("b.jsonl"))) << mode;
  }
  ASSERT_EQ(run_cli({"--seed", "10", "featurize", "--input", input, "--output", tmp("c.jsonl"), "--span-mode", "random"}).code, 0);
  EXPECT_NE(read_file(tmp("a.jsonl")), read_file(tmp("c.jsonl")));
}

TEST_F(CliTest, SynthWritesManifest)
{
  auto const r = run_cli({"synth", "--kind", "burst", "--train-docs", "3", "--test-docs", "2", "--output-dir",
                          tmp("corpus")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto const manifest = load_manifest(tmp("corpus/manifest.json"));
  EXPECT_EQ(manifest.label_set, (std::vector<std::string>{"bursty", "steady"}));
  EXPECT_EQ(load_corpus(manifest, "train").documents.size(), 6u);
  EXPECT_EQ(load_corpus(manifest, "test").documents.size(), 4u);
}

}  // namespace
}  // namespace uidscan
