#include "vidalign/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vidalign/error.hpp"

namespace vidalign {

std::string_view to_string(AlignMethod method) {
  switch (method) {
    case AlignMethod::kDtw: return "dtw";
    case AlignMethod::kDdtw: return "ddtw";
    case AlignMethod::kTrivial: return "trivial";
  }
  return "unknown";
}

AlignMethod parse_align_method(std::string_view text) {
  if (text == "dtw") return AlignMethod::kDtw;
  if (text == "ddtw") return AlignMethod::kDdtw;
  if (text == "trivial") return AlignMethod::kTrivial;
  throw Error(ErrorCode::kInvalidArgument, "unknown alignment method '" + std::string(text) + "'");
}

double default_margin(std::size_t n, std::size_t k) {
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  return kDefaultMarginFraction * std::sqrt(nn * nn + kk * kk);
}

CostMatrix cost_matrix(const Matrix& x, const Matrix& y) {
  if (x.cols() != y.cols()) {
    throw Error(ErrorCode::kDimMismatch, "series widths differ: " + std::to_string(x.cols()) +
                                             " vs " + std::to_string(y.cols()));
  }
  CostMatrix out(x.rows(), y.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < y.rows(); ++j) {
      const auto yj = y.row(j);
      double sum = 0.0;
      for (std::size_t c = 0; c < xi.size(); ++c) {
        const double d = xi[c] - yj[c];
        sum += d * d;
      }
      out(i, j) = std::sqrt(sum);
    }
  }
  return out;
}

CostMatrix cost_matrix(const FeatureSeries& x, const FeatureSeries& y) {
  return cost_matrix(x.values, y.values);
}

double diagonal_distance(double i, double j, std::size_t n, std::size_t k) {
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  return std::abs(kd * i - nd * j) / std::hypot(kd, nd);
}

CostMatrix penalize(const CostMatrix& costs, double margin, double lambda) {
  if (margin < 0.0 || lambda < 0.0 || std::isnan(margin) || std::isnan(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "margin and lambda must be non-negative");
  }
  const std::size_t n = costs.rows();
  const std::size_t k = costs.cols();
  CostMatrix out = costs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double d = diagonal_distance(static_cast<double>(i + 1), static_cast<double>(j + 1), n, k);
      if (d > margin) out(i, j) = costs(i, j) * (1.0 + lambda * (d - margin));
    }
  }
  return out;
}

AlignmentResult dp_align(const CostMatrix& costs) {
  if (costs.empty()) throw Error(ErrorCode::kInvalidArgument, "cost matrix is empty");
  const std::size_t n = costs.rows();
  const std::size_t k = costs.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  Matrix acc(n, k, kInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == 0 && j == 0) {
        acc(i, j) = costs(i, j);
        continue;
      }
      double best = kInf;
      if (i > 0 && j > 0) best = acc(i - 1, j - 1);
      if (i > 0) best = std::min(best, acc(i - 1, j));
      if (j > 0) best = std::min(best, acc(i, j - 1));
      acc(i, j) = best + costs(i, j);
    }
  }

  AlignmentResult result;
  result.total_cost = acc(n - 1, k - 1);
  result.method = AlignMethod::kDtw;
  result.margin = kInf;
  result.lambda = 0.0;

  auto& steps = result.path.steps;
  steps.reserve(n + k);
  std::size_t i = n - 1;
  std::size_t j = k - 1;
  steps.push_back({static_cast<int>(i + 1), static_cast<int>(j + 1)});
  while (i > 0 || j > 0) {
    // Preference order on exact ties: diagonal, (i-1, j), (i, j-1).
    std::size_t next_i = i;
    std::size_t next_j = j;
    double best = kInf;
    if (i > 0 && j > 0) {
      best = acc(i - 1, j - 1);
      next_i = i - 1;
      next_j = j - 1;
    }
    if (i > 0 && acc(i - 1, j) < best) {
      best = acc(i - 1, j);
      next_i = i - 1;
      next_j = j;
    }
    if (j > 0 && acc(i, j - 1) < best) {
      best = acc(i, j - 1);
      next_i = i;
      next_j = j - 1;
    }
    i = next_i;
    j = next_j;
    steps.push_back({static_cast<int>(i + 1), static_cast<int>(j + 1)});
  }
  std::reverse(steps.begin(), steps.end());
  return result;
}

double path_cost(const WarpPath& path, const CostMatrix& costs) {
  double sum = 0.0;
  for (const PathStep& s : path.steps) sum += costs(s.i - 1, s.j - 1);
  return sum;
}

bool is_valid_path(const WarpPath& path, std::size_t n, std::size_t k) {
  const auto& steps = path.steps;
  if (steps.empty()) return false;
  if (steps.front() != PathStep{1, 1}) return false;
  if (steps.back() != PathStep{static_cast<int>(n), static_cast<int>(k)}) return false;
  for (std::size_t s = 1; s < steps.size(); ++s) {
    const int di = steps[s].i - steps[s - 1].i;
    const int dj = steps[s].j - steps[s - 1].j;
    const bool ok = (di == 1 && dj == 0) || (di == 0 && dj == 1) || (di == 1 && dj == 1);
    if (!ok) return false;
  }
  return true;
}

WarpPath trivial_align(std::size_t n, std::size_t k) {
  if (n < 1 || k < 1) throw Error(ErrorCode::kInvalidArgument, "video lengths must be positive");
  // round(i k / n) with halves rounded up, in exact integer arithmetic.
  auto target = [&](std::size_t i) {
    const std::size_t j = (2 * i * k + n) / (2 * n);
    return static_cast<int>(std::clamp<std::size_t>(j, 1, k));
  };

  WarpPath path;
  path.steps.reserve(n + k);
  path.steps.push_back({1, 1});
  int j = 1;
  for (int jt = target(1); j < jt;) path.steps.push_back({1, ++j});
  for (std::size_t i = 2; i <= n; ++i) {
    const int jt = target(i);
    if (jt > j) ++j;
    path.steps.push_back({static_cast<int>(i), j});
    while (j < jt) path.steps.push_back({static_cast<int>(i), ++j});
  }
  return path;
}

AlignmentResult align_costs(const CostMatrix& costs, const AlignmentConfig& config) {
  if (costs.empty()) throw Error(ErrorCode::kInvalidArgument, "cost matrix is empty");
  const std::size_t n = costs.rows();
  const std::size_t k = costs.cols();
  const double margin = config.margin.value_or(default_margin(n, k));

  AlignmentResult result;
  switch (config.method) {
    case AlignMethod::kDtw:
      result = dp_align(costs);
      break;
    case AlignMethod::kDdtw:
      result = dp_align(penalize(costs, margin, config.lambda));
      break;
    case AlignMethod::kTrivial:
      result.path = trivial_align(n, k);
      result.total_cost = path_cost(result.path, costs);
      break;
  }
  result.method = config.method;
  result.margin = margin;
  result.lambda = config.lambda;
  return result;
}

AlignmentResult dtw(const FeatureSeries& x, const FeatureSeries& y) {
  return dp_align(cost_matrix(x, y));
}

AlignmentResult ddtw(const FeatureSeries& x, const FeatureSeries& y, const AlignmentConfig& config) {
  AlignmentConfig c = config;
  c.method = AlignMethod::kDdtw;
  return align_costs(cost_matrix(x, y), c);
}

AlignmentResult align(const FeatureSeries& x, const FeatureSeries& y, const AlignmentConfig& config) {
  // The trivial path ignores content, but its cost echo still needs D.
  return align_costs(cost_matrix(x, y), config);
}

}  // namespace vidalign
