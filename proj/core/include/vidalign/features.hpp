#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "vidalign/matrix.hpp"

namespace vidalign {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

// Axis-aligned subject box in pixel coordinates.
struct Box {
  Point2 center;
  double width = 0.0;
  double height = 0.0;

  // Height-to-width ratio.
  double ratio() const { return height / width; }

  bool operator==(const Box&) const = default;
};

inline constexpr std::size_t kKeypointCount = 24;
// The first keypoint is the hip (pelvis); every pose feature is anchored on it.
inline constexpr std::size_t kHipKeypoint = 0;

using Pose = std::array<Point2, kKeypointCount>;

struct TrackFrame {
  std::optional<Box> box;
  std::optional<Pose> pose;

  bool operator==(const TrackFrame&) const = default;
};

// Detections of the main subject, one entry per video frame. An absent box or
// pose marks a detector failure.
struct SubjectTrack {
  std::vector<TrackFrame> frames;

  std::size_t size() const { return frames.size(); }
  bool fully_populated() const;
  std::size_t missing_boxes() const;
  std::size_t missing_poses() const;

  bool operator==(const SubjectTrack&) const = default;
};

inline constexpr std::size_t kStaticBoxDims = 3;
inline constexpr std::size_t kStaticPoseDims = 2 * kKeypointCount;
inline constexpr std::size_t kDynamicBoxDims = kStaticBoxDims;
inline constexpr std::size_t kDynamicPoseDims = kStaticPoseDims;
inline constexpr std::size_t kLocalDims =
    kStaticBoxDims + kStaticPoseDims + kDynamicBoxDims + kDynamicPoseDims;

// Per-frame local features; every matrix has one row per frame.
//   static_box   (cx - cx1, cy - cy1, r / r1)
//   static_pose  keypoints shifted by the frame-1 hip, laid out x0 y0 x1 y1 ...
//   dynamic_*    first differences of the static blocks, zero at frame 1
struct LocalFeatures {
  Matrix static_box;
  Matrix static_pose;
  Matrix dynamic_box;
  Matrix dynamic_pose;

  std::size_t frames() const { return static_box.rows(); }
};

// Fills missing boxes and poses. Interior gaps are linearly interpolated per
// coordinate between the nearest present frames; leading and trailing gaps
// copy the nearest present frame. Throws kAllMissing when a track has no box
// or no pose at all.
SubjectTrack interpolate_track(const SubjectTrack& track);

// Requires a fully populated track. Throws kDegenerateBox if the frame-1 box
// has non-positive width or height.
Matrix static_box_features(const SubjectTrack& track);

Matrix static_pose_features(const SubjectTrack& track);

// Row n becomes rows[n] - rows[n-1]; row 0 is zero. Throws kLengthTooShort
// for fewer than two rows.
Matrix dynamic_features(const Matrix& static_rows);

// interpolate_track followed by the static and dynamic feature blocks.
LocalFeatures local_features(const SubjectTrack& track);

enum class MaskScale {
  // Offsets from the box center are divided by the margin box half extents.
  kNormalized,
  // Offsets are raw pixels, exactly as the Gaussian is usually written.
  kPixels,
};

struct MaskOptions {
  // Added to the box width and to the box height (half on each side).
  double margin_px = 20.0;
  // Outside weight is the boundary minimum minus this value.
  double outside_drop = 0.2;
  MaskScale scale = MaskScale::kNormalized;
};

// Inclusive pixel index range.
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = -1;
  int y1 = -1;

  bool contains(int x, int y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  bool operator==(const PixelRect&) const = default;
};

struct WeightMask {
  Matrix values;            // frame_height x frame_width, row = y
  PixelRect margin_box;     // pixels inside the enlarged box, clipped to the frame
  double boundary_min = 0;  // smallest weight on the margin box boundary
  double outside_value = 0;
};

// Unclipped Gaussian weight at (x, y) for the given box; the mask uses this
// value for every pixel inside the margin box.
double gaussian_weight(const Box& box, const MaskOptions& options, double x, double y);

// Truncated Gaussian weight mask. Pixels are addressed by integer index, so a
// box centered on (10, 20) gets weight 1 at column 10, row 20. Weights outside
// the margin box are constant and may be negative. Throws kEmptyIntersection
// when the box does not overlap the frame.
WeightMask gaussian_mask(int frame_width, int frame_height, const Box& box,
                         const MaskOptions& options = {});

}  // namespace vidalign
