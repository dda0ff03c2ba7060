#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "generators.hpp"
#include "oracles.hpp"
#include "vidalign/vidalign.hpp"

namespace {

using namespace vidalign;

PhaseAnnotation labels(std::vector<int> phases, std::string id = "v") {
  return PhaseAnnotation{std::move(id), std::move(phases)};
}

GroundTruthPath line(std::vector<Point2> anchors) { return GroundTruthPath{std::move(anchors)}; }

TEST(Annotation, BoundariesRoundTrip) {
  const PhaseAnnotation a = labels({1, 1, 2, 2, 2, 3});
  EXPECT_EQ(a.boundaries(), (std::vector<int>{3, 6}));
  EXPECT_EQ(a.phase_count(), 3);
  EXPECT_EQ(a.phase_of(3), 2);
  const std::vector<int> b{3, 6};
  EXPECT_EQ(PhaseAnnotation::from_boundaries(6, b, "v"), a);
}

TEST(Annotation, Validation) {
  EXPECT_NO_THROW(validate(labels({1, 2, 3})));
  for (const auto& bad : {std::vector<int>{}, {2, 2}, {1, 3}, {1, 2, 1}, {1, 0}}) {
    try {
      validate(labels(bad));
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidAnnotation);
    }
  }
}

TEST(GroundTruth, AnchorsFromBoundaries) {
  const GroundTruthPath g = ground_truth_path(labels({1, 1, 1, 1, 2, 2, 2, 2}),
                                              labels({1, 1, 2, 2, 2, 2, 2, 2}));
  EXPECT_EQ(g, line({{1, 1}, {5, 3}, {8, 8}}));
}

TEST(GroundTruth, Errors) {
  try {
    ground_truth_path(labels({1, 2, 2}), labels({1, 1, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPhaseCountMismatch);
  }
  try {
    // Last phase of A starts on the final frame.
    ground_truth_path(labels({1, 1, 2}), labels({1, 2, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonMonotoneAnchors);
  }
}

TEST(Eae, TriangleFixture) {
  const GroundTruthPath bent = line({{1, 1}, {6, 3}, {11, 11}});
  const GroundTruthPath diag = line({{1, 1}, {11, 11}});
  EXPECT_NEAR(eae(bent, diag, 11, 11), 0.15, 1e-12);
  EXPECT_NEAR(std::abs(oracle::shoelace(oracle::close_region(bent.anchors, diag.anchors))), 15.0, 1e-12);
}

TEST(Eae, IdenticalPathsAreZero) {
  SplitMix64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.below(30);
    const std::size_t k = 2 + rng.below(30);
    const WarpPath p = gen::warp_path(rng, n, k);
    const auto pts = to_polyline(p);
    EXPECT_NEAR(enclosed_area(pts, pts), 0.0, 1e-12);
  }
}

TEST(Eae, CrossingLobesAdd) {
  // Staircase crossing the diagonal once: two unit-ish lobes, no cancellation.
  const std::vector<Point2> zig{{1, 1}, {1, 2}, {2, 2}, {3, 2}, {3, 3}};
  const std::vector<Point2> diag{{1, 1}, {3, 3}};
  EXPECT_NEAR(enclosed_area(zig, diag), 1.0, 1e-12);
  EXPECT_NEAR(oracle::shoelace(oracle::close_region(zig, diag)), 0.0, 1e-12);
}

TEST(Eae, EndpointMismatchThrows) {
  try {
    eae(WarpPath{{{1, 1}, {2, 2}}}, line({{1, 1}, {3, 3}}), 3, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEndpointMismatch);
  }
}

TEST(CorrectPhaseRate, Fixture) {
  const PhaseAnnotation a = labels({1, 1, 2, 2});
  const PhaseAnnotation b = labels({1, 2, 2, 2});
  // Frame 2 of A (phase 1) only meets frame 2 of B (phase 2).
  const WarpPath p{{{1, 1}, {2, 2}, {3, 3}, {4, 4}}};
  EXPECT_DOUBLE_EQ(correct_phase_rate(p, a, b), 0.75);
  // Frame 2 now also meets frame 1.
  const WarpPath q{{{1, 1}, {2, 1}, {2, 2}, {3, 3}, {4, 4}}};
  EXPECT_DOUBLE_EQ(correct_phase_rate(q, a, b), 1.0);
  EXPECT_THROW(correct_phase_rate(p, labels({1, 1, 2}), b), Error);
}

TEST(Knn, VotesAndTies) {
  Matrix train(4, 1);
  train(0, 0) = 0.0;
  train(1, 0) = 1.0;
  train(2, 0) = 10.0;
  train(3, 0) = 11.0;
  const std::vector<int> y{1, 1, 2, 2};
  Matrix test(2, 1);
  test(0, 0) = 0.4;
  test(1, 0) = 10.4;
  EXPECT_EQ(knn_classify(train, y, test, 1), (std::vector<int>{1, 2}));
  EXPECT_EQ(knn_classify(train, y, test, 3), (std::vector<int>{1, 2}));
  // Two votes each: the smaller label wins.
  EXPECT_EQ(knn_classify(train, y, test, 4), (std::vector<int>{1, 1}));
  try {
    knn_classify(Matrix(0, 1), {}, test, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyTrainSet);
  }
  EXPECT_THROW(knn_classify(train, y, test, 5), Error);
  EXPECT_THROW(knn_classify(train, y, Matrix(1, 2), 1), Error);
}

TEST(Folds, BalancedAndDeterministic) {
  std::vector<std::string> ids;
  for (int v = 0; v < 23; ++v) ids.push_back("vid" + std::to_string(v));
  const auto folds = assign_folds(ids, 5, 9);
  std::vector<int> sizes(5, 0);
  for (auto f : folds) ++sizes.at(f);
  EXPECT_EQ(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()), 1);
  EXPECT_EQ(assign_folds(ids, 5, 9), folds);
  EXPECT_NE(assign_folds(ids, 5, 10), folds);

  // Input order does not matter: folds follow the ids.
  std::vector<std::string> reversed(ids.rbegin(), ids.rend());
  const auto rfolds = assign_folds(reversed, 5, 9);
  for (std::size_t v = 0; v < ids.size(); ++v) EXPECT_EQ(rfolds[ids.size() - 1 - v], folds[v]);
}

TEST(CrossValidate, TooFewVideos) {
  const auto data = synthetic_phase_dataset(4, 3, 1);
  try {
    cross_validate(data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewVideos);
  }
}

TEST(CrossValidate, InvertedRoleTrainsOnOneFold) {
  const auto data = synthetic_phase_dataset(12, 3, 5, 0.2, 16);
  CrossValidationOptions opts;
  opts.folds = 4;
  opts.seed = 3;
  const auto normal = cross_validate(data, opts);
  opts.role = FoldRole::kTrainOnFold;
  const auto inverted = cross_validate(data, opts);
  std::size_t frames = 0;
  for (const auto& d : data) frames += d.series.frames();
  EXPECT_EQ(normal.tested_frames, frames);
  EXPECT_EQ(inverted.tested_frames, 3 * frames);
  EXPECT_EQ(normal.fold_accuracy.size(), 4U);
}

// ----- properties ---------------------------------------------------------

// Monotone path from (1,1) to (n,k) that only visits cells whose phases agree.
WarpPath phase_respecting_path(SplitMix64& rng, const PhaseAnnotation& a, const PhaseAnnotation& b) {
  const auto ba = a.boundaries();
  const auto bb = b.boundaries();
  WarpPath out;
  int i0 = 1, j0 = 1;
  for (std::size_t p = 0; p <= ba.size(); ++p) {
    const int i1 = p < ba.size() ? ba[p] - 1 : static_cast<int>(a.frames());
    const int j1 = p < bb.size() ? bb[p] - 1 : static_cast<int>(b.frames());
    const WarpPath block = gen::warp_path(rng, static_cast<std::size_t>(i1 - i0 + 1),
                                          static_cast<std::size_t>(j1 - j0 + 1));
    for (const auto& s : block.steps) out.steps.push_back({s.i + i0 - 1, s.j + j0 - 1});
    i0 = i1 + 1;
    j0 = j1 + 1;
  }
  return out;
}

TEST(EvalProperties, ReversalInvariance) {
  SplitMix64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(25);
    const std::size_t k = 2 + rng.below(25);
    auto p = to_polyline(gen::warp_path(rng, n, k));
    auto q = to_polyline(gen::warp_path(rng, n, k));
    const double area = enclosed_area(p, q);
    std::reverse(p.begin(), p.end());
    ASSERT_EQ(enclosed_area(p, q), area);
    std::reverse(q.begin(), q.end());
    ASSERT_EQ(enclosed_area(p, q), area);
    ASSERT_NEAR(enclosed_area(q, p), area, 1e-9);
  }
}

TEST(EvalProperties, NonCrossingAreaMatchesShoelace) {
  SplitMix64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(25);
    const std::size_t k = 2 + rng.below(25);
    const auto p = to_polyline(gen::warp_path(rng, n, k));
    // The upper-left corner path never crosses any monotone path.
    const std::vector<Point2> corner{{1, 1}, {1, static_cast<double>(k)},
                                     {static_cast<double>(n), static_cast<double>(k)}};
    ASSERT_NEAR(enclosed_area(p, corner), std::abs(oracle::shoelace(oracle::close_region(p, corner))), 1e-9);
  }
}

TEST(EvalProperties, CrossingAreaMatchesWindingGrid) {
  SplitMix64 rng(44);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 2 + rng.below(12);
    const std::size_t k = 2 + rng.below(12);
    const auto p = to_polyline(gen::warp_path(rng, n, k));
    const auto q = to_polyline(gen::warp_path(rng, n, k));
    const double grid = oracle::grid_area(oracle::close_region(p, q), 64);
    ASSERT_NEAR(enclosed_area(p, q), grid, 0.05) << "trial " << trial;
  }
}

TEST(EvalProperties, TrivialPathOnSquareDiagonalIsZero) {
  for (std::size_t n = 2; n < 60; ++n) {
    const GroundTruthPath diag = line({{1, 1}, {static_cast<double>(n), static_cast<double>(n)}});
    ASSERT_NEAR(eae(trivial_align(n, n), diag, n, n), 0.0, 1e-12);
  }
}

TEST(EvalProperties, IdenticalAnnotationsGiveTheDiagonal) {
  SplitMix64 rng(45);
  for (int trial = 0; trial < 50; ++trial) {
    const PhaseAnnotation a = gen::annotation(rng, 1 + static_cast<int>(rng.below(5)), 1, 10, "a");
    const std::size_t n = a.frames();
    const GroundTruthPath diag = line({{1, 1}, {static_cast<double>(n), static_cast<double>(n)}});
    ASSERT_NEAR(eae(ground_truth_path(a, a), diag, n, n), 0.0, 1e-12);
  }
}

TEST(EvalProperties, CorrectPhaseRateRangeAndPerfectPaths) {
  SplitMix64 rng(46);
  for (int trial = 0; trial < 200; ++trial) {
    const int phases = 1 + static_cast<int>(rng.below(5));
    const PhaseAnnotation a = gen::annotation(rng, phases, 1, 8, "a");
    const PhaseAnnotation b = gen::annotation(rng, phases, 1, 8, "b");
    const double any = correct_phase_rate(gen::warp_path(rng, a.frames(), b.frames()), a, b);
    ASSERT_GE(any, 0.0);
    ASSERT_LE(any, 1.0);
    const WarpPath perfect = phase_respecting_path(rng, a, b);
    ASSERT_TRUE(is_valid_path(perfect, a.frames(), b.frames()));
    ASSERT_EQ(correct_phase_rate(perfect, a, b), 1.0);
  }
}

TEST(EvalProperties, CrossValidationDeterministicAndOrderFree) {
  auto data = synthetic_phase_dataset(15, 3, 77, 0.5, 12);
  CrossValidationOptions opts;
  opts.folds = 5;
  opts.seed = 99;
  const auto first = cross_validate(data, opts);
  EXPECT_EQ(cross_validate(data, opts).accuracy, first.accuracy);
  SplitMix64 rng(47);
  for (int shuffle = 0; shuffle < 5; ++shuffle) {
    std::shuffle(data.begin(), data.end(), rng);
    const auto again = cross_validate(data, opts);
    EXPECT_EQ(again.accuracy, first.accuracy);
    EXPECT_EQ(again.fold_accuracy, first.fold_accuracy);
  }
}

}  // namespace
