#include "vidalign/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "vidalign/error.hpp"
#include "vidalign/random.hpp"

namespace vidalign {
namespace {

std::string describe(const Point2& p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

// A monotone polyline re-expressed as t = x - y over s = x + y, which is
// strictly increasing along any monotone path.
struct RotatedPolyline {
  std::vector<double> s;
  std::vector<double> t;

  // Linear interpolation; `hint` is advanced monotonically by the caller.
  double at(double query, std::size_t& hint) const {
    while (hint + 2 < s.size() && s[hint + 1] < query) ++hint;
    const double s0 = s[hint];
    const double s1 = s[hint + 1];
    if (query <= s0) return t[hint];
    if (query >= s1) return t[hint + 1];
    const double alpha = (query - s0) / (s1 - s0);
    return t[hint] + (t[hint + 1] - t[hint]) * alpha;
  }
};

RotatedPolyline rotate(std::span<const Point2> points) {
  RotatedPolyline out;
  out.s.reserve(points.size());
  out.t.reserve(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (p > 0) {
      const Point2& prev = points[p - 1];
      const Point2& cur = points[p];
      if (cur == prev) continue;
      if (cur.x < prev.x || cur.y < prev.y) {
        throw Error(ErrorCode::kInvalidArgument,
                    "polyline is not monotone at " + describe(prev) + " -> " + describe(cur));
      }
    }
    out.s.push_back(points[p].x + points[p].y);
    out.t.push_back(points[p].x - points[p].y);
  }
  return out;
}

std::vector<Point2> oriented(std::span<const Point2> points) {
  std::vector<Point2> out(points.begin(), points.end());
  if (!out.empty() && out.front().x + out.front().y > out.back().x + out.back().y) {
    std::reverse(out.begin(), out.end());
  }
  return out;
}

// Integral of |h| over [a, b] for h linear with end values ha, hb.
double abs_linear_integral(double ha, double hb, double width) {
  if ((ha >= 0.0 && hb >= 0.0) || (ha <= 0.0 && hb <= 0.0)) {
    return 0.5 * (std::abs(ha) + std::abs(hb)) * width;
  }
  // Sign change: two triangles meeting at the root.
  return 0.5 * (ha * ha + hb * hb) / (std::abs(ha) + std::abs(hb)) * width;
}

void require_span(const Point2& front, const Point2& back, std::size_t n, std::size_t k,
                  const char* what) {
  if (front != Point2{1.0, 1.0} ||
      back != Point2{static_cast<double>(n), static_cast<double>(k)}) {
    throw Error(ErrorCode::kEndpointMismatch,
                std::string(what) + " runs " + describe(front) + " -> " + describe(back) +
                    ", expected (1, 1) -> (" + std::to_string(n) + ", " + std::to_string(k) + ")");
  }
}

double normalized_area(std::span<const Point2> a, std::span<const Point2> b, std::size_t n,
                       std::size_t k) {
  if (n < 2 || k < 2) {
    throw Error(ErrorCode::kInvalidArgument, "EAE needs at least 2 frames per video");
  }
  return enclosed_area(a, b) / (static_cast<double>(n - 1) * static_cast<double>(k - 1));
}

}  // namespace

std::vector<int> PhaseAnnotation::boundaries() const {
  std::vector<int> out;
  for (std::size_t t = 1; t < phases.size(); ++t) {
    if (phases[t] > phases[t - 1]) out.push_back(static_cast<int>(t + 1));
  }
  return out;
}

PhaseAnnotation PhaseAnnotation::from_boundaries(std::size_t frames, std::span<const int> boundaries,
                                                 std::string video_id) {
  PhaseAnnotation out;
  out.video_id = std::move(video_id);
  out.phases.resize(frames);
  int phase = 1;
  std::size_t next = 0;
  for (std::size_t t = 1; t <= frames; ++t) {
    if (next < boundaries.size() && boundaries[next] == static_cast<int>(t)) {
      ++phase;
      ++next;
    }
    out.phases[t - 1] = phase;
  }
  if (next != boundaries.size()) {
    throw Error(ErrorCode::kInvalidAnnotation,
                "phase boundaries must be strictly increasing within 2.." + std::to_string(frames));
  }
  return out;
}

void validate(const PhaseAnnotation& annotation) {
  const auto& phases = annotation.phases;
  const std::string id = annotation.video_id.empty() ? "annotation" : annotation.video_id;
  if (phases.empty()) throw Error(ErrorCode::kInvalidAnnotation, id + ": no frames");
  if (phases.front() != 1) {
    throw Error(ErrorCode::kInvalidAnnotation, id + ": first frame must be phase 1");
  }
  for (std::size_t t = 1; t < phases.size(); ++t) {
    const int step = phases[t] - phases[t - 1];
    if (step != 0 && step != 1) {
      throw Error(ErrorCode::kInvalidAnnotation,
                  id + ": phase jumps from " + std::to_string(phases[t - 1]) + " to " +
                      std::to_string(phases[t]) + " at frame " + std::to_string(t + 1));
    }
  }
}

GroundTruthPath ground_truth_path(const PhaseAnnotation& a, const PhaseAnnotation& b) {
  validate(a);
  validate(b);
  if (a.phase_count() != b.phase_count()) {
    throw Error(ErrorCode::kPhaseCountMismatch, std::to_string(a.phase_count()) + " vs " +
                                                    std::to_string(b.phase_count()) + " phases");
  }
  const auto starts_a = a.boundaries();
  const auto starts_b = b.boundaries();

  GroundTruthPath out;
  out.anchors.push_back({1.0, 1.0});
  for (std::size_t p = 0; p < starts_a.size(); ++p) {
    out.anchors.push_back({static_cast<double>(starts_a[p]), static_cast<double>(starts_b[p])});
  }
  out.anchors.push_back({static_cast<double>(a.frames()), static_cast<double>(b.frames())});

  for (std::size_t p = 1; p < out.anchors.size(); ++p) {
    const Point2& prev = out.anchors[p - 1];
    const Point2& cur = out.anchors[p];
    if (!(cur.x > prev.x && cur.y > prev.y)) {
      throw Error(ErrorCode::kNonMonotoneAnchors,
                  "anchor " + describe(cur) + " does not strictly follow " + describe(prev));
    }
  }
  return out;
}

std::vector<Point2> to_polyline(const WarpPath& path) {
  std::vector<Point2> out;
  out.reserve(path.steps.size());
  for (const PathStep& s : path.steps) {
    out.push_back({static_cast<double>(s.i), static_cast<double>(s.j)});
  }
  return out;
}

double enclosed_area(std::span<const Point2> first, std::span<const Point2> second) {
  if (first.empty() || second.empty()) {
    throw Error(ErrorCode::kEndpointMismatch, "empty polyline");
  }
  const auto a = oriented(first);
  const auto b = oriented(second);
  if (a.front() != b.front() || a.back() != b.back()) {
    throw Error(ErrorCode::kEndpointMismatch,
                "polylines span " + describe(a.front()) + " -> " + describe(a.back()) + " and " +
                    describe(b.front()) + " -> " + describe(b.back()));
  }
  const RotatedPolyline ra = rotate(a);
  const RotatedPolyline rb = rotate(b);
  if (ra.s.size() < 2 || rb.s.size() < 2) return 0.0;

  std::vector<double> cuts;
  cuts.reserve(ra.s.size() + rb.s.size());
  std::merge(ra.s.begin(), ra.s.end(), rb.s.begin(), rb.s.end(), std::back_inserter(cuts));
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // dx dy = ds dt / 2 under s = x + y, t = x - y.
  std::size_t hint_a = 0;
  std::size_t hint_b = 0;
  double integral = 0.0;
  double h_prev = ra.at(cuts[0], hint_a) - rb.at(cuts[0], hint_b);
  for (std::size_t c = 1; c < cuts.size(); ++c) {
    const double h = ra.at(cuts[c], hint_a) - rb.at(cuts[c], hint_b);
    integral += abs_linear_integral(h_prev, h, cuts[c] - cuts[c - 1]);
    h_prev = h;
  }
  return 0.5 * integral;
}

double eae(const WarpPath& predicted, const GroundTruthPath& truth, std::size_t n, std::size_t k) {
  if (predicted.steps.empty() || truth.anchors.empty()) {
    throw Error(ErrorCode::kEndpointMismatch, "empty path");
  }
  const auto poly = to_polyline(predicted);
  require_span(poly.front(), poly.back(), n, k, "predicted path");
  require_span(truth.anchors.front(), truth.anchors.back(), n, k, "ground truth");
  return normalized_area(poly, truth.anchors, n, k);
}

double eae(const GroundTruthPath& a, const GroundTruthPath& b, std::size_t n, std::size_t k) {
  if (a.anchors.empty() || b.anchors.empty()) {
    throw Error(ErrorCode::kEndpointMismatch, "empty path");
  }
  require_span(a.anchors.front(), a.anchors.back(), n, k, "first path");
  require_span(b.anchors.front(), b.anchors.back(), n, k, "second path");
  return normalized_area(a.anchors, b.anchors, n, k);
}

double correct_phase_rate(const WarpPath& path, const PhaseAnnotation& a, const PhaseAnnotation& b) {
  const std::size_t n = a.frames();
  const std::size_t k = b.frames();
  if (path.steps.empty() || path.steps.front() != PathStep{1, 1} ||
      path.steps.back() != PathStep{static_cast<int>(n), static_cast<int>(k)}) {
    throw Error(ErrorCode::kLengthMismatch, "path does not span the annotated lengths " +
                                                std::to_string(n) + " x " + std::to_string(k));
  }
  std::vector<char> correct(n, 0);
  for (const PathStep& s : path.steps) {
    if (s.i < 1 || s.j < 1 || static_cast<std::size_t>(s.i) > n ||
        static_cast<std::size_t>(s.j) > k) {
      throw Error(ErrorCode::kLengthMismatch, "path step outside the annotated range");
    }
    if (a.phase_of(s.i) == b.phase_of(s.j)) correct[s.i - 1] = 1;
  }
  const auto hits = std::count(correct.begin(), correct.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(n);
}

std::vector<int> knn_classify(const Matrix& train, std::span<const int> train_labels,
                              const Matrix& test, std::size_t k) {
  if (train.rows() == 0) throw Error(ErrorCode::kEmptyTrainSet, "no training frames");
  if (train_labels.size() != train.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "one label per training frame required");
  }
  if (k == 0 || k > train.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "k must be in 1.." + std::to_string(train.rows()));
  }
  if (test.rows() > 0 && test.cols() != train.cols()) {
    throw Error(ErrorCode::kDimMismatch, "train and test widths differ");
  }

  std::vector<int> out;
  out.reserve(test.rows());
  std::vector<std::pair<double, std::size_t>> dist(train.rows());
  for (std::size_t q = 0; q < test.rows(); ++q) {
    const auto x = test.row(q);
    for (std::size_t r = 0; r < train.rows(); ++r) {
      const auto y = train.row(r);
      double sum = 0.0;
      for (std::size_t c = 0; c < x.size(); ++c) {
        const double d = x[c] - y[c];
        sum += d * d;
      }
      dist[r] = {sum, r};
    }
    // Pairs compare by distance, then by row index.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());

    std::map<int, std::size_t> votes;
    for (std::size_t v = 0; v < k; ++v) ++votes[train_labels[dist[v].second]];
    int label = votes.begin()->first;
    std::size_t best = 0;
    for (const auto& [candidate, count] : votes) {
      if (count > best) {  // ascending label order keeps the smaller id on ties
        best = count;
        label = candidate;
      }
    }
    out.push_back(label);
  }
  return out;
}

std::vector<std::size_t> assign_folds(std::span<const std::string> video_ids, std::size_t folds,
                                      std::uint64_t seed) {
  if (folds == 0) throw Error(ErrorCode::kInvalidArgument, "folds must be positive");
  std::vector<std::size_t> order(video_ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return video_ids[l] < video_ids[r]; });

  SplitMix64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = rng.below(i);
    std::swap(order[i - 1], order[j]);
  }

  std::vector<std::size_t> fold_of(video_ids.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) fold_of[order[pos]] = pos % folds;
  return fold_of;
}

CrossValidationResult cross_validate(std::span<const LabeledSeries> dataset,
                                     const CrossValidationOptions& options) {
  if (options.folds < 2) throw Error(ErrorCode::kInvalidArgument, "need at least 2 folds");
  if (dataset.size() < options.folds) {
    throw Error(ErrorCode::kTooFewVideos, std::to_string(dataset.size()) + " videos for " +
                                              std::to_string(options.folds) + " folds");
  }
  std::vector<std::string> ids;
  ids.reserve(dataset.size());
  for (const auto& item : dataset) {
    if (item.series.frames() != item.annotation.frames()) {
      throw Error(ErrorCode::kLengthMismatch,
                  item.series.video_id + ": series and annotation lengths differ");
    }
    if (item.series.width() != dataset.front().series.width()) {
      throw Error(ErrorCode::kDimMismatch, item.series.video_id + ": series width differs");
    }
    ids.push_back(item.series.video_id);
  }
  const auto fold_of = assign_folds(ids, options.folds, options.seed);
  const std::size_t width = dataset.front().series.width();

  CrossValidationResult result;
  for (std::size_t fold = 0; fold < options.folds; ++fold) {
    auto in_train = [&](std::size_t v) {
      const bool held_out = fold_of[v] == fold;
      return options.role == FoldRole::kTrainOnOthers ? !held_out : held_out;
    };
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    for (std::size_t v = 0; v < dataset.size(); ++v) {
      (in_train(v) ? train_rows : test_rows) += dataset[v].series.frames();
    }
    Matrix train(train_rows, width);
    Matrix test(test_rows, width);
    std::vector<int> train_labels;
    std::vector<int> test_labels;
    std::size_t tr = 0;
    std::size_t te = 0;
    for (std::size_t v = 0; v < dataset.size(); ++v) {
      const auto& item = dataset[v];
      const bool to_train = in_train(v);
      for (std::size_t t = 0; t < item.series.frames(); ++t) {
        const auto src = item.series.values.row(t);
        auto dest = to_train ? train.row(tr++) : test.row(te++);
        std::copy(src.begin(), src.end(), dest.begin());
        (to_train ? train_labels : test_labels).push_back(item.annotation.phases[t]);
      }
    }

    const auto predicted = knn_classify(train, train_labels, test, options.neighbors);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == test_labels[i];
    result.fold_accuracy.push_back(
        test_rows == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(test_rows));
    result.correct_frames += hits;
    result.tested_frames += test_rows;
  }
  result.accuracy = result.tested_frames == 0 ? 0.0
                                              : static_cast<double>(result.correct_frames) /
                                                    static_cast<double>(result.tested_frames);
  return result;
}

}  // namespace vidalign
