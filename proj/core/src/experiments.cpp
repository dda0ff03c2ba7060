#include "vidalign/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vidalign/error.hpp"
#include "vidalign/parallel.hpp"
#include "vidalign/random.hpp"
#include "vidalign/synth.hpp"

namespace vidalign {
namespace {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

// y of a strictly increasing polyline at abscissa x.
double truth_at(const GroundTruthPath& truth, double x) {
  const auto& a = truth.anchors;
  for (std::size_t p = 1; p < a.size(); ++p) {
    if (x <= a[p].x) {
      const double alpha = (x - a[p - 1].x) / (a[p].x - a[p - 1].x);
      return a[p - 1].y + alpha * (a[p].y - a[p - 1].y);
    }
  }
  return a.back().y;
}

struct DrawnPair {
  SynthPair pair;
  SplitMix64 rng{0};
};

DrawnPair draw_pair(const ExperimentOptions& options, std::size_t index) {
  DrawnPair out;
  out.rng = SplitMix64(derive_seed(options.seed, index));
  SplitMix64& rng = out.rng;
  SynthSpec spec;
  spec.phase_count = static_cast<int>(rng.between(options.min_phases, options.max_phases));
  spec.durations_a = random_durations(spec.phase_count, options.min_duration, options.max_duration, rng);
  spec.durations_b = random_durations(spec.phase_count, options.min_duration, options.max_duration, rng);
  spec.feature_dim = options.feature_dim;
  spec.noise_std = options.noise_std;
  spec.seed = rng();
  out.pair = generate_pair(spec, rng());
  return out;
}

PairOutcome score_methods(std::size_t index, const CostMatrix& costs, const std::vector<AlignMethod>& methods,
                          const ExperimentOptions& options, const GroundTruthPath& truth,
                          const PhaseAnnotation& a, const PhaseAnnotation& b) {
  PairOutcome outcome;
  outcome.pair = index;
  outcome.n = costs.rows();
  outcome.k = costs.cols();
  for (AlignMethod method : methods) {
    AlignmentConfig config;
    config.method = method;
    config.margin = options.margin;
    config.lambda = options.lambda;
    const AlignmentResult result = align_costs(costs, config);
    outcome.scores.push_back({method, eae(result.path, truth, outcome.n, outcome.k),
                              correct_phase_rate(result.path, a, b)});
  }
  return outcome;
}

void check(const ExperimentOptions& options) {
  if (options.pairs == 0) throw Error(ErrorCode::kInvalidArgument, "pairs must be positive");
  if (options.min_phases < 1 || options.max_phases < options.min_phases) {
    throw Error(ErrorCode::kInvalidArgument, "phase range must satisfy 1 <= min <= max");
  }
  if (options.min_duration < 2) {
    throw Error(ErrorCode::kInvalidArgument, "phase durations must be at least 2 frames");
  }
}

}  // namespace

const MethodScore& PairOutcome::score(AlignMethod method) const {
  for (const auto& s : scores) {
    if (s.method == method) return s;
  }
  throw Error(ErrorCode::kInvalidArgument, "method not scored: " + std::string(to_string(method)));
}

double SuiteReport::median_eae(AlignMethod method) const {
  std::vector<double> values;
  for (const auto& p : pairs) values.push_back(p.score(method).eae);
  return median(std::move(values));
}

double SuiteReport::median_correct_phase_rate(AlignMethod method) const {
  std::vector<double> values;
  for (const auto& p : pairs) values.push_back(p.score(method).correct_phase_rate);
  return median(std::move(values));
}

double SuiteReport::fraction_not_worse(AlignMethod better, AlignMethod baseline) const {
  if (pairs.empty()) return 0.0;
  const auto hits = std::count_if(pairs.begin(), pairs.end(), [&](const PairOutcome& p) {
    return p.score(better).eae <= p.score(baseline).eae;
  });
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

SuiteReport run_wait_phase_suite(const ExperimentOptions& options) {
  check(options);
  SuiteReport report;
  report.name = "wait";
  report.methods = {AlignMethod::kTrivial, AlignMethod::kDtw, AlignMethod::kDdtw};
  report.pairs.resize(options.pairs);
  parallel_for(options.pairs, options.jobs, [&](std::size_t index) {
    const DrawnPair drawn = draw_pair(options, index);
    const SynthPair& pair = drawn.pair;
    WaitPhaseResult waited = add_wait_phase(pair.b, pair.annotation_b);
    FeatureSeries a = options.normalize ? normalize(pair.a) : pair.a;
    FeatureSeries b = options.normalize ? normalize(waited.series) : waited.series;
    const GroundTruthPath truth = ground_truth_path(pair.annotation_a, waited.annotation);
    report.pairs[index] = score_methods(index, cost_matrix(a, b), report.methods, options, truth,
                                        pair.annotation_a, waited.annotation);
  });
  return report;
}

SuiteReport run_corridor_suite(const ExperimentOptions& options) {
  check(options);
  SuiteReport report;
  report.name = "corridor";
  report.methods = {AlignMethod::kDtw, AlignMethod::kDdtw};
  report.pairs.resize(options.pairs);
  parallel_for(options.pairs, options.jobs, [&](std::size_t index) {
    DrawnPair drawn = draw_pair(options, index);
    const SynthPair& pair = drawn.pair;
    FeatureSeries a = options.normalize ? normalize(pair.a) : pair.a;
    FeatureSeries b = options.normalize ? normalize(pair.b) : pair.b;
    CostMatrix costs = cost_matrix(a, b);

    CorridorSpec corridor;
    corridor.bulge = options.corridor_bulge;
    corridor.factor = drawn.rng.uniform(options.corridor_min_factor, options.corridor_max_factor);
    corridor.upward = (drawn.rng() & 1U) != 0;
    inject_corridor(costs, pair.truth, corridor);

    report.pairs[index] = score_methods(index, costs, report.methods, options, pair.truth,
                                        pair.annotation_a, pair.annotation_b);
  });
  return report;
}

void inject_corridor(CostMatrix& costs, const GroundTruthPath& truth, const CorridorSpec& spec) {
  const std::size_t n = costs.rows();
  const std::size_t k = costs.cols();
  if (n < 2 || k < 2) return;

  double truth_cost = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const auto j = static_cast<std::size_t>(std::lround(truth_at(truth, static_cast<double>(i))));
    truth_cost += costs(i - 1, std::clamp<std::size_t>(j, 1, k) - 1);
  }
  const double value = spec.factor * truth_cost / static_cast<double>(n);
  const double amplitude = spec.bulge * static_cast<double>(std::min(n, k));
  const double sign = spec.upward ? 1.0 : -1.0;

  auto centre = [&](std::size_t i) {
    const double t = static_cast<double>(i - 1) / static_cast<double>(n - 1);
    return truth_at(truth, static_cast<double>(i)) + sign * amplitude * std::sin(std::numbers::pi * t);
  };
  // Each column spans from the previous centre to the current one, so the
  // corridor stays connected even where it climbs steeply.
  double prev = centre(1);
  for (std::size_t i = 1; i <= n; ++i) {
    const double cur = centre(i);
    const double lo = std::min(prev, cur) - spec.half_width;
    const double hi = std::max(prev, cur) + spec.half_width;
    const auto j0 = std::max<long>(1, std::lround(std::ceil(lo)));
    const auto j1 = std::min<long>(static_cast<long>(k), std::lround(std::floor(hi)));
    for (long j = j0; j <= j1; ++j) {
      double& cell = costs(i - 1, static_cast<std::size_t>(j - 1));
      cell = std::min(cell, value);
    }
    prev = cur;
  }
}

std::vector<LabeledSeries> synthetic_phase_dataset(std::size_t videos, int phase_count,
                                                   std::uint64_t seed, double noise_std,
                                                   std::size_t feature_dim) {
  SynthSpec spec;
  spec.phase_count = phase_count;
  spec.feature_dim = feature_dim;
  spec.noise_std = noise_std;
  spec.seed = derive_seed(seed, 0);

  std::vector<LabeledSeries> out;
  out.reserve(videos);
  for (std::size_t v = 0; v < videos; ++v) {
    SplitMix64 rng(derive_seed(seed, v + 1));
    const auto durations = random_durations(phase_count, 8, 16, rng);
    std::string id = std::to_string(v);
    id.insert(0, 3 - std::min<std::size_t>(3, id.size()), '0');
    out.push_back(generate_video(spec, durations, rng(), "video_" + id));
  }
  return out;
}

}  // namespace vidalign
