#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "generators.hpp"
#include "vidalign/vidalign.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vidalign;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vidalign");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vidalign_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
  }

  // Track + global files for one clip with a few detector misses.
  void write_clip(const std::string& id, std::uint64_t seed, std::size_t frames = 20) const {
    SplitMix64 rng(seed);
    std::ostringstream t, g;
    write_track(t, gen::track(rng, frames, 0.1));
    write_global(g, gen::matrix(rng, frames, kGlobalDims));
    write(id + ".track.jsonl", t.str());
    write(id + ".global.jsonl", g.str());
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run_cli({}).code, cli::kExitInput);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitInput);
  // --seed is mandatory wherever randomness is involved.
  EXPECT_EQ(run_cli({"synth", "--out-dir", path("s")}).code, cli::kExitInput);
  EXPECT_EQ(run_cli({"benchmark", "--out", path("b.csv")}).code, cli::kExitInput);
}

TEST_F(CliTest, SynthAlignEvalPipeline) {
  ASSERT_EQ(run_cli({"synth", "--out-dir", path("s"), "--seed", "3", "--durations-a", "4,4",
                     "--durations-b", "2,6", "--phases", "2"})
                .code,
            0);
  std::istringstream truth(read_file(path("s/truth.json")));
  EXPECT_EQ(read_ground_truth(truth).path, (GroundTruthPath{{{1, 1}, {5, 3}, {8, 8}}}));

  const RunResult aligned = run_cli({"align", "--a", path("s/synth_a.series"), "--b", path("s/synth_b.series"),
                                     "--method", "dtw", "--out", path("p.path")});
  ASSERT_EQ(aligned.code, 0) << aligned.err;
  const RunResult evaluated =
      run_cli({"eval", "--path", path("p.path"), "--annotations", path("s/annotations.jsonl"), "--out", path("r.json")});
  ASSERT_EQ(evaluated.code, 0) << evaluated.err;
  std::istringstream report(read_file(path("r.json")));
  const ReportFile r = read_report(report);
  ASSERT_TRUE(r.report.eae);
  EXPECT_GE(*r.report.eae, 0.0);
  EXPECT_FALSE(r.report.classification_accuracy);
}

TEST_F(CliTest, EvalRejectsPhaseCountMismatch) {
  ASSERT_EQ(run_cli({"synth", "--out-dir", path("s"), "--seed", "3", "--phases", "2", "--durations-a", "4,4",
                     "--durations-b", "3,5"})
                .code,
            0);
  ASSERT_EQ(run_cli({"align", "--a", path("s/synth_a.series"), "--b", path("s/synth_b.series"), "--out",
                     path("p.path")})
                .code,
            0);
  write("ann.jsonl", "{\"videoId\":\"synth_a\",\"phases\":[1,1,1,1,2,2,2,2]}\n"
                     "{\"videoId\":\"synth_b\",\"phases\":[1,1,1,2,2,2,3,3]}\n");
  const RunResult r = run_cli({"eval", "--path", path("p.path"), "--annotations", path("ann.jsonl")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("PhaseCountMismatch"), std::string::npos) << r.err;
}

TEST_F(CliTest, BuildFromManifest) {
  write_clip("v01", 1);
  write_clip("v02", 2, 15);
  write("manifest.json", R"({"action":"swing","entries":[
    {"videoId":"v01","trackPath":"v01.track.jsonl","globalPath":"v01.global.jsonl"},
    {"videoId":"v02","trackPath":"v02.track.jsonl","globalPath":"v02.global.jsonl"}]})");
  const RunResult r = run_cli({"build", "--manifest", path("manifest.json"), "--out-dir", path("out"), "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("v01 T=20 interpolated_boxes="), std::string::npos) << r.out;
  std::istringstream in(read_file(path("out/v02.series")));
  const FeatureSeries s = read_series(in);
  EXPECT_EQ(s.width(), 166U);
  EXPECT_EQ(s.frames(), 15U);
  EXPECT_EQ(s.video_id, "v02");

  ASSERT_EQ(run_cli({"build", "--manifest", path("manifest.json"), "--out-dir", path("csv"), "--format", "csv"}).code, 0);
  std::istringstream csv(read_file(path("csv/v02.csv")));
  EXPECT_EQ(read_series(csv), s);
}

TEST_F(CliTest, BuildReportsMissingFilesAndSchemaErrors) {
  write_clip("v01", 1);
  write("missing.json", R"({"entries":[{"videoId":"v01","trackPath":"v01.track.jsonl","globalPath":"nope.jsonl"}]})");
  RunResult r = run_cli({"build", "--manifest", path("missing.json"), "--out-dir", path("out")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("nope.jsonl"), std::string::npos) << r.err;

  write("bad.global.jsonl", "{\"frame\":1,\"global\":[1]}\n");
  write("bad.json", R"({"entries":[{"videoId":"clipX","trackPath":"v01.track.jsonl","globalPath":"bad.global.jsonl"}]})");
  r = run_cli({"build", "--manifest", path("bad.json"), "--out-dir", path("out")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("clipX"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("bad.global.jsonl:1"), std::string::npos) << r.err;

  write("dup.json", R"({"entries":[
    {"videoId":"v01","trackPath":"v01.track.jsonl","globalPath":"v01.global.jsonl"},
    {"videoId":"v01","trackPath":"v01.track.jsonl","globalPath":"v01.global.jsonl"}]})");
  r = run_cli({"build", "--manifest", path("dup.json"), "--out-dir", path("out")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("duplicate"), std::string::npos) << r.err;
}

TEST_F(CliTest, AlignBatchWritesSummary) {
  ASSERT_EQ(run_cli({"synth", "--out-dir", path("s"), "--seed", "9"}).code, 0);
  write("pairs.txt", "# a,b\ns/synth_a.series,s/synth_b.series\ns/synth_b.series,s/synth_a.series\n");
  const RunResult r = run_cli({"align", "--pairs", path("pairs.txt"), "--out-dir", path("paths"), "--method", "ddtw",
                               "--margin", "3", "--lambda", "0.5", "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string summary = read_file(path("paths/summary.csv"));
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "pair,a,b,method,n,k,margin,lambda,total_cost,path_file");
  EXPECT_NE(summary.find("\n1,synth_b,synth_a,ddtw,"), std::string::npos) << summary;
  EXPECT_NE(summary.find(",3,0.5,"), std::string::npos) << summary;
}

TEST_F(CliTest, ClassifyIsDeterministic) {
  std::vector<std::string> args{"classify", "--annotations", path("ann.jsonl"), "--seed", "4", "--folds", "3"};
  std::vector<PhaseAnnotation> annotations;
  for (const auto& item : synthetic_phase_dataset(6, 3, 12, 0.2, 8)) {
    std::ostringstream s;
    write_series(s, item.series, SeriesFormat::kBinary);
    write(item.series.video_id + ".series", s.str());
    args.push_back("--series");
    args.push_back(path(item.series.video_id + ".series"));
    annotations.push_back(item.annotation);
  }
  std::ostringstream a;
  write_annotations(a, annotations);
  write("ann.jsonl", a.str());
  const RunResult first = run_cli(args);
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.out.find("\"accuracy\": "), std::string::npos);
  EXPECT_EQ(run_cli(args).out, first.out);
}

TEST_F(CliTest, BenchmarkIsDeterministic) {
  const std::vector<std::string> base{"benchmark", "--seed", "5", "--pairs", "4", "--dim", "12"};
  auto with_out = [&](const std::string& name, const std::string& jobs) {
    auto args = base;
    args.insert(args.end(), {"--out", path(name), "--jobs", jobs});
    return run_cli(args);
  };
  ASSERT_EQ(with_out("a.csv", "1").code, 0);
  ASSERT_EQ(with_out("b.csv", "2").code, 0);
  const std::string csv = read_file(path("a.csv"));
  EXPECT_EQ(csv, read_file(path("b.csv")));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "suite,pair,n,k,method,eae,correct_phase_rate");
  EXPECT_NE(csv.find("wait,median,,,ddtw,"), std::string::npos);
  EXPECT_NE(csv.find("corridor,median,,,dtw,"), std::string::npos);
}

TEST_F(CliTest, MaskCommand) {
  const RunResult r = run_cli({"mask", "--width", "100", "--height", "100", "--box", "50,50,20,40", "--out",
                               path("m.bin")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(read_file(path("m.bin")));
  const Matrix m = read_mask(in);
  EXPECT_EQ(m(50, 50), 1.0);
  EXPECT_EQ(run_cli({"mask", "--width", "10", "--height", "10", "--box", "500,500,2,2", "--out", path("x")}).code,
            cli::kExitInput);
  EXPECT_EQ(run_cli({"mask", "--width", "10", "--height", "10", "--box", "1,2", "--out", path("x")}).code,
            cli::kExitInput);
}

TEST_F(CliTest, ValidateFlagsBadFiles) {
  write_clip("v01", 1);
  write("bad.track.jsonl", "{\"frame\":2,\"box\":null,\"pose\":null}\n");
  RunResult r = run_cli({"validate", "--track", path("v01.track.jsonl"), "--global", path("v01.global.jsonl")});
  EXPECT_EQ(r.code, 0) << r.err;
  r = run_cli({"validate", "--track", path("v01.track.jsonl"), "--track", path("bad.track.jsonl")});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("bad.track.jsonl:1"), std::string::npos) << r.err;
  r = run_cli({"validate", "--series", path("does-not-exist")});
  EXPECT_EQ(r.code, cli::kExitInput);
}

TEST_F(CliTest, ConfigFileAndLog) {
  write("run.toml", "[synth]\nphases = 2\ndurations-a = \"3,3\"\ndurations-b = \"4,4\"\n");
  const RunResult r = run_cli({"--config", path("run.toml"), "--log", path("run.log"), "synth", "--out-dir",
                               path("s"), "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n=6 k=8"), std::string::npos) << r.out;
  const std::string log = read_file(path("run.log"));
  EXPECT_NE(log.find("synth seed=1"), std::string::npos) << log;

  // Flags beat the config file.
  const RunResult flag = run_cli({"--config", path("run.toml"), "synth", "--out-dir", path("t"), "--seed", "1",
                                  "--durations-a", "5,5"});
  ASSERT_EQ(flag.code, 0) << flag.err;
  EXPECT_NE(flag.out.find("n=10 k=8"), std::string::npos) << flag.out;
}

}  // namespace
