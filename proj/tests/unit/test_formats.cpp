#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "generators.hpp"
#include "vidalign/vidalign.hpp"

namespace {

using namespace vidalign;

template <typename Writer>
std::string render(Writer&& w) {
  std::ostringstream out;
  w(out);
  return out.str();
}

void expect_schema_error(const std::function<void()>& f, const std::string& fragment) {
  try {
    f();
    FAIL() << "expected a schema error mentioning " << fragment;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSchema) << e.what();
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Doubles, ShortestRoundTrip) {
  SplitMix64 rng(61);
  for (int trial = 0; trial < 10000; ++trial) {
    const double v = gen::awkward_double(rng);
    const double back = parse_double(format_double(v));
    ASSERT_EQ(std::signbit(back), std::signbit(v));
    ASSERT_EQ(back, v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(3.0), "3");
  EXPECT_TRUE(std::isinf(parse_double("inf")));
  EXPECT_THROW(parse_double("1.5x"), Error);
  EXPECT_THROW(parse_double(""), Error);
}

TEST(TrackFile, RoundTripWithGaps) {
  SplitMix64 rng(62);
  const SubjectTrack t = gen::track(rng, 12, 0.3);
  const std::string text = render([&](std::ostream& o) { write_track(o, t); });
  std::istringstream in(text);
  const SubjectTrack back = read_track(in);
  EXPECT_EQ(back, t);
  EXPECT_EQ(render([&](std::ostream& o) { write_track(o, back); }), text);
}

TEST(TrackFile, SchemaErrorsCarryLineNumbers) {
  const std::string pose = "[" + [] {
    std::string s;
    for (int m = 0; m < 24; ++m) s += std::string(m ? "," : "") + "[1,2]";
    return s;
  }() + "]";
  const std::string good = R"({"frame":1,"box":{"cx":1,"cy":2,"w":3,"h":4},"pose":)" + pose + "}\n";
  {
    std::istringstream in(good + R"({"frame":3,"box":null,"pose":null})" + "\n");
    expect_schema_error([&] { read_track(in, "t.jsonl"); }, "t.jsonl:2");
  }
  {
    std::istringstream in(R"({"frame":1,"box":{"cx":1,"cy":2,"w":0,"h":4},"pose":null})");
    expect_schema_error([&] { read_track(in, "t.jsonl"); }, "positive");
  }
  {
    std::istringstream in(R"({"frame":1,"box":null,"pose":[[1,2]]})");
    expect_schema_error([&] { read_track(in, "t.jsonl"); }, "24");
  }
  {
    std::istringstream in("{not json\n");
    expect_schema_error([&] { read_track(in, "t.jsonl"); }, "t.jsonl:1");
  }
}

TEST(GlobalFile, RoundTripAndWidth) {
  SplitMix64 rng(63);
  const Matrix g = gen::matrix(rng, 5, 64);
  const std::string text = render([&](std::ostream& o) { write_global(o, g); });
  std::istringstream in(text);
  EXPECT_EQ(read_global(in), g);
  std::istringstream bad(R"({"frame":1,"global":[1,2,3]})");
  expect_schema_error([&] { read_global(bad, "g.jsonl"); }, "64");
  EXPECT_THROW(write_global(std::cout, Matrix(1, 3)), Error);
}

TEST(SeriesFile, BothEncodingsRoundTrip) {
  SplitMix64 rng(64);
  FeatureSeries s = gen::series(rng, 7, 5, "clip_01");
  s.values(0, 0) = -0.0;
  s.values(1, 1) = 1e-310;
  for (SeriesFormat f : {SeriesFormat::kBinary, SeriesFormat::kCsv}) {
    const std::string bytes = render([&](std::ostream& o) { write_series(o, s, f); });
    std::istringstream in(bytes);
    const FeatureSeries back = read_series(in);
    EXPECT_EQ(back, s);
    EXPECT_TRUE(std::signbit(back.values(0, 0)));
    EXPECT_EQ(render([&](std::ostream& o) { write_series(o, back, f); }), bytes);
  }
}

TEST(SeriesFile, CorruptInputs) {
  SplitMix64 rng(65);
  const FeatureSeries s = gen::series(rng, 3, 2, "x");
  std::string bin = render([&](std::ostream& o) { write_series(o, s, SeriesFormat::kBinary); });
  bin.pop_back();
  std::istringstream truncated(bin);
  expect_schema_error([&] { read_series(truncated, "s.bin"); }, "s.bin");
  std::istringstream ragged("#video_id=x\n1,2\n3\n");
  expect_schema_error([&] { read_series(ragged, "s.csv"); }, "s.csv:3");
  std::istringstream junk("hello\n");
  expect_schema_error([&] { read_series(junk, "s.csv"); }, "not a series");
}

TEST(PathFile, RoundTripAndValidation) {
  PathFile f;
  f.video_a = "a";
  f.video_b = "b";
  f.n = 3;
  f.k = 4;
  f.result = dp_align(CostMatrix(3, 4, 1.0));
  const std::string text = render([&](std::ostream& o) { write_path(o, f); });
  EXPECT_EQ(text.substr(0, 24), "#format=vidalign-path-1\n");
  std::istringstream in(text);
  const PathFile back = read_path(in);
  EXPECT_EQ(back.result.path, f.result.path);
  EXPECT_TRUE(std::isinf(back.result.margin));
  EXPECT_EQ(render([&](std::ostream& o) { write_path(o, back); }), text);

  std::string broken = text;
  broken.replace(broken.rfind("3,4"), 3, "3,5");
  std::istringstream bad(broken);
  expect_schema_error([&] { read_path(bad, "p.path"); }, "monotone");
}

TEST(AnnotationFile, RoundTripAndErrors) {
  const std::vector<PhaseAnnotation> a{{"v1", {1, 1, 2, 3}}, {"v2", {1, 2, 2}}};
  const std::string text = render([&](std::ostream& o) { write_annotations(o, a); });
  EXPECT_EQ(text, "{\"videoId\":\"v1\",\"phases\":[1,1,2,3]}\n{\"videoId\":\"v2\",\"phases\":[1,2,2]}\n");
  std::istringstream in(text);
  EXPECT_EQ(read_annotations(in), a);
  std::istringstream dup(text + "{\"videoId\":\"v1\",\"phases\":[1]}\n");
  expect_schema_error([&] { read_annotations(dup, "a.jsonl"); }, "a.jsonl:3");
  std::istringstream skip("{\"videoId\":\"v\",\"phases\":[1,3]}\n");
  expect_schema_error([&] { read_annotations(skip, "a.jsonl"); }, "a.jsonl:1");
}

TEST(GroundTruthFile, RoundTrip) {
  const GroundTruthFile g{8, 8, GroundTruthPath{{{1, 1}, {5, 3}, {8, 8}}}};
  const std::string text = render([&](std::ostream& o) { write_ground_truth(o, g); });
  std::istringstream in(text);
  const GroundTruthFile back = read_ground_truth(in);
  EXPECT_EQ(back.n, 8U);
  EXPECT_EQ(back.path, g.path);
}

TEST(ReportFile, NullMetricsAndTypedConfig) {
  ReportFile r;
  r.report.eae = 0.065;
  r.config = {{"method", std::string("ddtw")}, {"lambda", 1.0}, {"folds", std::int64_t{10}}, {"flag", true}};
  const std::string text = render([&](std::ostream& o) { write_report(o, r); });
  std::istringstream in(text);
  const ReportFile back = read_report(in);
  EXPECT_EQ(back.report.eae, 0.065);
  EXPECT_FALSE(back.report.correct_phase_rate);
  EXPECT_FALSE(back.report.classification_accuracy);
  EXPECT_EQ(back.config, r.config);
  EXPECT_EQ(render([&](std::ostream& o) { write_report(o, back); }), text);
}

TEST(MaskFile, BinaryAndText) {
  const WeightMask m = gaussian_mask(17, 9, Box{{8, 4}, 6, 4});
  for (bool text : {false, true}) {
    const std::string bytes = render([&](std::ostream& o) { write_mask(o, m.values, text); });
    std::istringstream in(bytes);
    const Matrix back = read_mask(in);
    ASSERT_EQ(back.rows(), 9U);
    ASSERT_EQ(back.cols(), 17U);
    for (std::size_t e = 0; e < back.data().size(); ++e) {
      EXPECT_EQ(back.data()[e], static_cast<double>(static_cast<float>(m.values.data()[e])));
    }
    EXPECT_EQ(render([&](std::ostream& o) { write_mask(o, back, text); }), bytes);
  }
}

TEST(Files, AtomicWriteAndMissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "vidalign_formats_test";
  std::filesystem::create_directories(dir);
  const auto target = dir / "out.txt";
  write_file_atomic(target, "first");
  write_file_atomic(target, "second");
  EXPECT_EQ(read_file(target), "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1U);
  try {
    read_file(dir / "nope.txt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("nope.txt"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
