#pragma once

#include <cstddef>
#include <string>

#include "vidalign/features.hpp"
#include "vidalign/matrix.hpp"

namespace vidalign {

inline constexpr std::size_t kGlobalDims = 64;
inline constexpr std::size_t kFeatureWidth = kLocalDims + kGlobalDims;
static_assert(kFeatureWidth == 166);

// Column offsets of each block inside a 166-wide frame vector.
inline constexpr std::size_t kStaticBoxOffset = 0;
inline constexpr std::size_t kStaticPoseOffset = kStaticBoxOffset + kStaticBoxDims;
inline constexpr std::size_t kDynamicBoxOffset = kStaticPoseOffset + kStaticPoseDims;
inline constexpr std::size_t kDynamicPoseOffset = kDynamicBoxOffset + kDynamicBoxDims;
inline constexpr std::size_t kGlobalOffset = kDynamicPoseOffset + kDynamicPoseDims;

inline constexpr std::size_t kDefaultSmoothingWindow = 5;

// Backbone embedding of the mask-weighted frame, T x 64.
using GlobalFeatures = Matrix;

// A video modelled as a multivariate time series: one row per frame. Series
// built from tracks are 166 wide; synthetic and test series may use any width.
struct FeatureSeries {
  std::string video_id;
  Matrix values;

  std::size_t frames() const { return values.rows(); }
  std::size_t width() const { return values.cols(); }

  bool operator==(const FeatureSeries&) const = default;
};

// Concatenates the four local blocks and the global block per frame.
// Throws kLengthMismatch on differing frame counts and kDimMismatch when the
// global block is not 64 wide.
FeatureSeries assemble(const LocalFeatures& local, const GlobalFeatures& global,
                       std::string video_id = {});

// Centered moving average per dimension. Near the ends the window is cut at
// the series boundary, so frame 1 of a window-5 average uses frames 1..3.
// Throws kBadWindow for even or non-positive windows.
FeatureSeries smooth(const FeatureSeries& series, std::size_t window = kDefaultSmoothingWindow);

// Per-dimension z-score over time with population variance. Constant
// dimensions become zero.
FeatureSeries normalize(const FeatureSeries& series);

// local_features -> assemble -> smooth(5) -> normalize.
FeatureSeries build_series(const SubjectTrack& track, const GlobalFeatures& global,
                           std::string video_id = {});

}  // namespace vidalign
