#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vidalign/align.hpp"
#include "vidalign/features.hpp"
#include "vidalign/series.hpp"

namespace vidalign {

// Phase label of every frame. Labels start at 1, never decrease, and advance
// by at most one per frame, so every phase 1..P owns a contiguous run.
struct PhaseAnnotation {
  std::string video_id;
  std::vector<int> phases;

  std::size_t frames() const { return phases.size(); }
  int phase_count() const { return phases.empty() ? 0 : phases.back(); }
  // 1-based frame index.
  int phase_of(std::size_t frame) const { return phases[frame - 1]; }
  // 1-based first frame of each phase 2..P.
  std::vector<int> boundaries() const;

  // Builds phase labels for `frames` frames from the first frame of each
  // phase after the first.
  static PhaseAnnotation from_boundaries(std::size_t frames, std::span<const int> boundaries,
                                         std::string video_id = {});

  bool operator==(const PhaseAnnotation&) const = default;
};

// Throws kInvalidAnnotation when the invariants above do not hold.
void validate(const PhaseAnnotation& annotation);

// Continuous piecewise-linear correspondence between two annotated videos.
struct GroundTruthPath {
  std::vector<Point2> anchors;

  bool operator==(const GroundTruthPath&) const = default;
};

// Anchors at (1,1), at the first frame of every later phase in both videos,
// and at (n,k). Throws kPhaseCountMismatch when the videos have different
// phase counts and kNonMonotoneAnchors when consecutive anchors do not
// strictly increase in both coordinates.
GroundTruthPath ground_truth_path(const PhaseAnnotation& a, const PhaseAnnotation& b);

std::vector<Point2> to_polyline(const WarpPath& path);

// Unsigned area enclosed between two monotone polylines sharing both
// endpoints. Either polyline may be given in reverse order. Where the curves
// cross, the areas of the separate lobes are added, never cancelled.
// Throws kEndpointMismatch when the endpoints differ.
double enclosed_area(std::span<const Point2> first, std::span<const Point2> second);

// Enclosed area divided by (n-1)(k-1). Throws kEndpointMismatch unless both
// paths run from (1,1) to (n,k).
double eae(const WarpPath& predicted, const GroundTruthPath& truth, std::size_t n, std::size_t k);
double eae(const GroundTruthPath& a, const GroundTruthPath& b, std::size_t n, std::size_t k);

// Fraction of frames i of the first video aligned to at least one frame j of
// the second video with the same phase. Throws kLengthMismatch when the path
// does not span the annotated lengths.
double correct_phase_rate(const WarpPath& path, const PhaseAnnotation& a, const PhaseAnnotation& b);

inline constexpr std::size_t kDefaultNeighbors = 5;
inline constexpr std::size_t kDefaultFolds = 10;

// Majority vote among the k nearest training rows (Euclidean). Distance ties
// keep the earlier training row; vote ties go to the smaller label.
// Throws kEmptyTrainSet, kDimMismatch, kInvalidArgument (k == 0 or
// k > train rows).
std::vector<int> knn_classify(const Matrix& train, std::span<const int> train_labels,
                              const Matrix& test, std::size_t k = kDefaultNeighbors);

struct LabeledSeries {
  FeatureSeries series;
  PhaseAnnotation annotation;
};

enum class FoldRole {
  // Standard k-fold: train on the other folds, test on the held-out fold.
  kTrainOnOthers,
  // Inverted protocol: train on one fold, test on the rest.
  kTrainOnFold,
};

struct CrossValidationOptions {
  std::size_t folds = kDefaultFolds;
  std::size_t neighbors = kDefaultNeighbors;
  std::uint64_t seed = 0;
  FoldRole role = FoldRole::kTrainOnOthers;
};

struct CrossValidationResult {
  double accuracy = 0.0;  // correct / tested, pooled over every fold
  std::vector<double> fold_accuracy;
  std::size_t tested_frames = 0;
  std::size_t correct_frames = 0;
};

// Fold index for every id (same order as the input). Ids are sorted, shuffled
// with a seeded Fisher-Yates pass, then dealt round-robin.
std::vector<std::size_t> assign_folds(std::span<const std::string> video_ids, std::size_t folds,
                                      std::uint64_t seed);

// Video-level k-fold cross-validation of per-frame phase classification.
// Throws kTooFewVideos when there are fewer videos than folds.
CrossValidationResult cross_validate(std::span<const LabeledSeries> dataset,
                                     const CrossValidationOptions& options = {});

struct EvalReport {
  std::optional<double> eae;
  std::optional<double> correct_phase_rate;
  std::optional<double> classification_accuracy;
};

}  // namespace vidalign
