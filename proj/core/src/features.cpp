#include "vidalign/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "vidalign/error.hpp"

namespace vidalign {
namespace {

Point2 lerp(const Point2& a, const Point2& b, double t) {
  return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

Box lerp(const Box& a, const Box& b, double t) {
  return {lerp(a.center, b.center, t), a.width + (b.width - a.width) * t,
          a.height + (b.height - a.height) * t};
}

Pose lerp(const Pose& a, const Pose& b, double t) {
  Pose out;
  for (std::size_t m = 0; m < kKeypointCount; ++m) out[m] = lerp(a[m], b[m], t);
  return out;
}

// Fills every empty slot of `values` from its present neighbours.
template <typename T>
void fill_gaps(std::vector<std::optional<T>>& values) {
  const std::size_t count = values.size();
  std::optional<std::size_t> prev;
  for (std::size_t t = 0; t < count; ++t) {
    if (values[t]) {
      prev = t;
      continue;
    }
    std::optional<std::size_t> next;
    for (std::size_t s = t + 1; s < count; ++s) {
      if (values[s]) {
        next = s;
        break;
      }
    }
    if (prev && next) {
      const double alpha = static_cast<double>(t - *prev) / static_cast<double>(*next - *prev);
      values[t] = lerp(*values[*prev], *values[*next], alpha);
    } else if (prev) {
      values[t] = values[*prev];
    } else {
      values[t] = values[*next];
    }
    // prev is left alone: filled frames never serve as interpolation anchors.
  }
}

void require_populated(const SubjectTrack& track) {
  if (!track.fully_populated()) {
    throw Error(ErrorCode::kInvalidArgument, "track has missing frames; interpolate first");
  }
  if (track.size() == 0) throw Error(ErrorCode::kLengthTooShort, "track is empty");
}

}  // namespace

bool SubjectTrack::fully_populated() const {
  return std::all_of(frames.begin(), frames.end(),
                     [](const TrackFrame& f) { return f.box && f.pose; });
}

std::size_t SubjectTrack::missing_boxes() const {
  return std::count_if(frames.begin(), frames.end(), [](const TrackFrame& f) { return !f.box; });
}

std::size_t SubjectTrack::missing_poses() const {
  return std::count_if(frames.begin(), frames.end(), [](const TrackFrame& f) { return !f.pose; });
}

SubjectTrack interpolate_track(const SubjectTrack& track) {
  if (track.missing_boxes() == track.size()) {
    throw Error(ErrorCode::kAllMissing, "no frame has a box");
  }
  if (track.missing_poses() == track.size()) {
    throw Error(ErrorCode::kAllMissing, "no frame has a pose");
  }

  std::vector<std::optional<Box>> boxes;
  std::vector<std::optional<Pose>> poses;
  boxes.reserve(track.size());
  poses.reserve(track.size());
  for (const auto& frame : track.frames) {
    boxes.push_back(frame.box);
    poses.push_back(frame.pose);
  }

  fill_gaps(boxes);
  fill_gaps(poses);

  SubjectTrack out;
  out.frames.resize(track.size());
  for (std::size_t t = 0; t < track.size(); ++t) {
    out.frames[t].box = boxes[t];
    out.frames[t].pose = poses[t];
  }
  return out;
}

Matrix static_box_features(const SubjectTrack& track) {
  require_populated(track);
  const Box& first = *track.frames.front().box;
  if (!(first.width > 0.0) || !(first.height > 0.0)) {
    throw Error(ErrorCode::kDegenerateBox,
                "frame 1 box has non-positive size (w=" + std::to_string(first.width) +
                    ", h=" + std::to_string(first.height) + ")");
  }
  const double first_ratio = first.ratio();

  Matrix out(track.size(), kStaticBoxDims);
  for (std::size_t t = 0; t < track.size(); ++t) {
    const Box& box = *track.frames[t].box;
    out(t, 0) = box.center.x - first.center.x;
    out(t, 1) = box.center.y - first.center.y;
    out(t, 2) = box.ratio() / first_ratio;
  }
  return out;
}

Matrix static_pose_features(const SubjectTrack& track) {
  require_populated(track);
  const Point2 anchor = (*track.frames.front().pose)[kHipKeypoint];

  Matrix out(track.size(), kStaticPoseDims);
  for (std::size_t t = 0; t < track.size(); ++t) {
    const Pose& pose = *track.frames[t].pose;
    for (std::size_t m = 0; m < kKeypointCount; ++m) {
      out(t, 2 * m) = pose[m].x - anchor.x;
      out(t, 2 * m + 1) = pose[m].y - anchor.y;
    }
  }
  return out;
}

Matrix dynamic_features(const Matrix& static_rows) {
  if (static_rows.rows() < 2) {
    throw Error(ErrorCode::kLengthTooShort,
                "need at least 2 frames, got " + std::to_string(static_rows.rows()));
  }
  Matrix out(static_rows.rows(), static_rows.cols(), 0.0);
  for (std::size_t t = 1; t < static_rows.rows(); ++t) {
    for (std::size_t c = 0; c < static_rows.cols(); ++c) {
      out(t, c) = static_rows(t, c) - static_rows(t - 1, c);
    }
  }
  return out;
}

LocalFeatures local_features(const SubjectTrack& track) {
  if (track.size() < 2) {
    throw Error(ErrorCode::kLengthTooShort,
                "need at least 2 frames, got " + std::to_string(track.size()));
  }
  const SubjectTrack filled = interpolate_track(track);
  LocalFeatures out;
  out.static_box = static_box_features(filled);
  out.static_pose = static_pose_features(filled);
  out.dynamic_box = dynamic_features(out.static_box);

  // Pose displacements are taken on the raw keypoints.
  Matrix raw_pose(filled.size(), kStaticPoseDims);
  for (std::size_t t = 0; t < filled.size(); ++t) {
    const Pose& pose = *filled.frames[t].pose;
    for (std::size_t m = 0; m < kKeypointCount; ++m) {
      raw_pose(t, 2 * m) = pose[m].x;
      raw_pose(t, 2 * m + 1) = pose[m].y;
    }
  }
  out.dynamic_pose = dynamic_features(raw_pose);
  return out;
}

double gaussian_weight(const Box& box, const MaskOptions& options, double x, double y) {
  double dx = x - box.center.x;
  double dy = y - box.center.y;
  if (options.scale == MaskScale::kNormalized) {
    dx /= 0.5 * (box.width + options.margin_px);
    dy /= 0.5 * (box.height + options.margin_px);
  }
  return std::exp(-(dx * dx + dy * dy) / 2.0);
}

WeightMask gaussian_mask(int frame_width, int frame_height, const Box& box,
                         const MaskOptions& options) {
  if (frame_width < 1 || frame_height < 1) {
    throw Error(ErrorCode::kInvalidArgument, "frame dimensions must be positive");
  }
  if (!(box.width > 0.0) || !(box.height > 0.0)) {
    throw Error(ErrorCode::kDegenerateBox, "mask box has non-positive size");
  }
  const double box_x0 = box.center.x - box.width / 2.0;
  const double box_x1 = box.center.x + box.width / 2.0;
  const double box_y0 = box.center.y - box.height / 2.0;
  const double box_y1 = box.center.y + box.height / 2.0;
  if (box_x1 < 0.0 || box_x0 > frame_width - 1 || box_y1 < 0.0 || box_y0 > frame_height - 1) {
    throw Error(ErrorCode::kEmptyIntersection, "box does not overlap the frame");
  }

  const double half_w = (box.width + options.margin_px) / 2.0;
  const double half_h = (box.height + options.margin_px) / 2.0;
  WeightMask mask;
  mask.margin_box.x0 = std::max(0, static_cast<int>(std::ceil(box.center.x - half_w)));
  mask.margin_box.x1 = std::min(frame_width - 1, static_cast<int>(std::floor(box.center.x + half_w)));
  mask.margin_box.y0 = std::max(0, static_cast<int>(std::ceil(box.center.y - half_h)));
  mask.margin_box.y1 =
      std::min(frame_height - 1, static_cast<int>(std::floor(box.center.y + half_h)));
  const PixelRect& rect = mask.margin_box;
  if (rect.x0 > rect.x1 || rect.y0 > rect.y1) {
    throw Error(ErrorCode::kEmptyIntersection, "margin box has no pixel inside the frame");
  }

  double boundary_min = std::numeric_limits<double>::infinity();
  for (int y = rect.y0; y <= rect.y1; ++y) {
    const bool edge_row = (y == rect.y0 || y == rect.y1);
    for (int x = rect.x0; x <= rect.x1; ++x) {
      if (edge_row || x == rect.x0 || x == rect.x1) {
        boundary_min = std::min(boundary_min, gaussian_weight(box, options, x, y));
      }
    }
  }
  mask.boundary_min = boundary_min;
  mask.outside_value = boundary_min - options.outside_drop;

  mask.values = Matrix(static_cast<std::size_t>(frame_height), static_cast<std::size_t>(frame_width),
                       mask.outside_value);
  for (int y = rect.y0; y <= rect.y1; ++y) {
    for (int x = rect.x0; x <= rect.x1; ++x) {
      mask.values(y, x) = gaussian_weight(box, options, x, y);
    }
  }
  return mask;
}

}  // namespace vidalign
