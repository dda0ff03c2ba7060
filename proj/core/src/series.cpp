#include "vidalign/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "vidalign/error.hpp"

namespace vidalign {
namespace {

void copy_block(const Matrix& block, Matrix& dest, std::size_t offset) {
  for (std::size_t t = 0; t < block.rows(); ++t) {
    std::copy(block.row(t).begin(), block.row(t).end(), dest.row(t).begin() + offset);
  }
}

}  // namespace

FeatureSeries assemble(const LocalFeatures& local, const GlobalFeatures& global,
                       std::string video_id) {
  const std::size_t frames = local.frames();
  for (const Matrix* block : {&local.static_pose, &local.dynamic_box, &local.dynamic_pose, &global}) {
    if (block->rows() != frames) {
      throw Error(ErrorCode::kLengthMismatch, "feature blocks have " + std::to_string(frames) +
                                                  " and " + std::to_string(block->rows()) +
                                                  " frames");
    }
  }
  if (local.static_box.cols() != kStaticBoxDims || local.static_pose.cols() != kStaticPoseDims ||
      local.dynamic_box.cols() != kDynamicBoxDims || local.dynamic_pose.cols() != kDynamicPoseDims) {
    throw Error(ErrorCode::kDimMismatch, "local feature blocks have unexpected widths");
  }
  if (global.cols() != kGlobalDims) {
    throw Error(ErrorCode::kDimMismatch,
                "global features must be 64 wide, got " + std::to_string(global.cols()));
  }

  FeatureSeries out{std::move(video_id), Matrix(frames, kFeatureWidth)};
  copy_block(local.static_box, out.values, kStaticBoxOffset);
  copy_block(local.static_pose, out.values, kStaticPoseOffset);
  copy_block(local.dynamic_box, out.values, kDynamicBoxOffset);
  copy_block(local.dynamic_pose, out.values, kDynamicPoseOffset);
  copy_block(global, out.values, kGlobalOffset);
  return out;
}

FeatureSeries smooth(const FeatureSeries& series, std::size_t window) {
  if (window < 1 || window % 2 == 0) {
    throw Error(ErrorCode::kBadWindow,
                "window must be odd and positive, got " + std::to_string(window));
  }
  const std::size_t frames = series.frames();
  const std::size_t half = window / 2;
  FeatureSeries out{series.video_id, Matrix(frames, series.width())};
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t lo = t >= half ? t - half : 0;
    const std::size_t hi = std::min(frames - 1, t + half);
    const double count = static_cast<double>(hi - lo + 1);
    auto dest = out.values.row(t);
    for (std::size_t s = lo; s <= hi; ++s) {
      const auto src = series.values.row(s);
      for (std::size_t c = 0; c < dest.size(); ++c) dest[c] += src[c];
    }
    for (double& v : dest) v /= count;
  }
  return out;
}

FeatureSeries normalize(const FeatureSeries& series) {
  const std::size_t frames = series.frames();
  const std::size_t width = series.width();
  FeatureSeries out{series.video_id, Matrix(frames, width, 0.0)};
  if (frames == 0) return out;

  for (std::size_t c = 0; c < width; ++c) {
    double lo = series.values(0, c);
    double hi = lo;
    double sum = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      const double v = series.values(t, c);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    if (lo == hi) continue;  // constant dimension stays zero

    const double mean = sum / static_cast<double>(frames);
    double squares = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      const double d = series.values(t, c) - mean;
      squares += d * d;
    }
    const double stddev = std::sqrt(squares / static_cast<double>(frames));
    for (std::size_t t = 0; t < frames; ++t) {
      out.values(t, c) = (series.values(t, c) - mean) / stddev;
    }
  }
  return out;
}

FeatureSeries build_series(const SubjectTrack& track, const GlobalFeatures& global,
                           std::string video_id) {
  const LocalFeatures local = local_features(track);
  return normalize(smooth(assemble(local, global, std::move(video_id)), kDefaultSmoothingWindow));
}

}  // namespace vidalign
