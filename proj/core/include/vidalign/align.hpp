#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "vidalign/matrix.hpp"
#include "vidalign/series.hpp"

namespace vidalign {

// Frame-distance table: row i is frame i of the first video (length n),
// column j is frame j of the second (length k).
using CostMatrix = Matrix;

// One cell of an alignment. Frame indices are 1-based.
struct PathStep {
  int i = 1;
  int j = 1;

  bool operator==(const PathStep&) const = default;
};

// Monotone alignment from (1, 1) to (n, k) using steps (1,0), (0,1), (1,1).
struct WarpPath {
  std::vector<PathStep> steps;

  bool operator==(const WarpPath&) const = default;
};

enum class AlignMethod { kDtw, kDdtw, kTrivial };

std::string_view to_string(AlignMethod method);
// Accepts "dtw", "ddtw", "trivial". Throws kInvalidArgument otherwise.
AlignMethod parse_align_method(std::string_view text);

inline constexpr double kDefaultLambda = 1.0;
inline constexpr double kDefaultMarginFraction = 0.1;

struct AlignmentConfig {
  AlignMethod method = AlignMethod::kDdtw;
  // Unset means 10% of the table diagonal, see default_margin().
  std::optional<double> margin;
  double lambda = kDefaultLambda;
};

struct AlignmentResult {
  WarpPath path;
  double total_cost = 0.0;
  AlignMethod method = AlignMethod::kDtw;
  double margin = 0.0;  // resolved value actually used
  double lambda = 0.0;
};

// 0.1 * sqrt(n^2 + k^2).
double default_margin(std::size_t n, std::size_t k);

// Euclidean distance between every frame pair. Throws kDimMismatch when the
// widths differ.
CostMatrix cost_matrix(const Matrix& x, const Matrix& y);
CostMatrix cost_matrix(const FeatureSeries& x, const FeatureSeries& y);

// Orthogonal distance from cell (i, j) to the line through the origin and
// (n, k), with 1-based indices as written:
//   |(k/n) i - j| / sqrt(k^2/n^2 + 1)
double diagonal_distance(double i, double j, std::size_t n, std::size_t k);

// Multiplies each cell farther than margin from the diagonal by
// 1 + lambda (d - margin). Cells within the margin are copied unchanged.
CostMatrix penalize(const CostMatrix& costs, double margin, double lambda);

// Minimum-sum monotone path through the table, recovered by backtracking.
// Ties prefer the diagonal predecessor, then (i-1, j), then (i, j-1).
// The result is tagged as plain DTW.
AlignmentResult dp_align(const CostMatrix& costs);

// Sum of the matrix entries visited by the path.
double path_cost(const WarpPath& path, const CostMatrix& costs);

// Structural check of the warp path invariants for an n x k table.
bool is_valid_path(const WarpPath& path, std::size_t n, std::size_t k);

// Linear baseline: frame i maps to round(i k / n), clamped to [1, k], with
// intermediate monotone steps inserted so the result is a valid warp path.
WarpPath trivial_align(std::size_t n, std::size_t k);

// Runs the configured method on a precomputed distance table. total_cost is
// measured on the (penalized, for DDTW) table the path was optimized over;
// for the trivial method it is the plain table.
AlignmentResult align_costs(const CostMatrix& costs, const AlignmentConfig& config);

AlignmentResult dtw(const FeatureSeries& x, const FeatureSeries& y);
AlignmentResult ddtw(const FeatureSeries& x, const FeatureSeries& y, const AlignmentConfig& config);
AlignmentResult align(const FeatureSeries& x, const FeatureSeries& y, const AlignmentConfig& config);

}  // namespace vidalign
